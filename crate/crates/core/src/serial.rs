//! Retrograde-refined systems: contextual operations conjugated onto
//! reordered `T/I`-orbits, the RICH (retrograde inversion enchaining)
//! transformation, the order-48 duality between `<T/I, (13)>` and the
//! conjugated `PLR` group with retrograde adjoined, and the row subsystems
//! generated by `(13)R` and `(13)P`.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::contextual::{contextual_group, ti_orbit, TiOrbit};
use crate::error::{Error, Result};
use crate::groupcore::{close_generators, Carrier, FiniteGroup, Perm};
use crate::pcmath::{AffineMap, Modulus, PcSegment, VoicePerm};

/// A contextual operation of a root-position orbit, to be conjugated onto
/// reorderings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextualOp {
    K,
    Q(i64),
    J(usize, usize),
    Qbar(i64),
    W(i64),
}

impl ContextualOp {
    pub const P: ContextualOp = ContextualOp::J(1, 3);
    pub const L: ContextualOp = ContextualOp::J(2, 3);
    pub const R: ContextualOp = ContextualOp::J(1, 2);

    pub fn apply(&self, orbit: &TiOrbit, y: &PcSegment) -> Result<PcSegment> {
        match *self {
            ContextualOp::K => orbit.op_k(y),
            ContextualOp::Q(i) => orbit.op_q(i, y),
            ContextualOp::J(q, r) => orbit.op_j(q, r, y),
            ContextualOp::Qbar(j) => orbit.op_qbar(j, y),
            ContextualOp::W(a) => orbit.op_w(a, y),
        }
    }

    pub fn label(&self, n: usize) -> String {
        match *self {
            ContextualOp::K => "K".into(),
            ContextualOp::Q(i) => format!("Q{i}"),
            ContextualOp::J(q, r) => crate::contextual::j_label(q, r, n),
            ContextualOp::Qbar(j) => format!("Qbar{j}"),
            ContextualOp::W(a) => format!("W{a}"),
        }
    }
}

/// The union of the `T/I`-orbits of two orderings of a root-position seed,
/// with contextual operations acting by conjugation per orbit.
#[derive(Debug, Clone)]
pub struct RetroSystem {
    seed: PcSegment,
    orderings: [VoicePerm; 2],
    root_orbit: TiOrbit,
    carrier: Arc<Carrier<PcSegment>>,
    /// Which ordering orbit each carrier element lies in.
    tags: Vec<usize>,
}

impl RetroSystem {
    /// Build from explicit orderings.
    pub fn build(x: &PcSegment, orderings: [VoicePerm; 2]) -> Result<RetroSystem> {
        for sigma in &orderings {
            if sigma.arity() != x.len() {
                return Err(Error::ArityMismatch {
                    perm: sigma.arity(),
                    len: x.len(),
                });
            }
        }
        let root_orbit = ti_orbit(x)?;
        let mut tagged: Vec<(PcSegment, usize)> = Vec::new();
        for (t, sigma) in orderings.iter().enumerate() {
            for y in root_orbit.carrier().elements() {
                tagged.push((sigma.apply(y)?, t));
            }
        }
        let carrier = Arc::new(Carrier::new(tagged.iter().map(|(y, _)| y.clone())).map_err(
            |_| Error::Degenerate(format!("the two ordering orbits of {x} are not disjoint")),
        )?);
        let mut tags = vec![usize::MAX; carrier.len()];
        for (y, t) in tagged {
            tags[carrier.position(&y).expect("just inserted")] = t;
        }
        Ok(RetroSystem {
            seed: x.clone(),
            orderings,
            root_orbit,
            carrier,
            tags,
        })
    }

    /// The standard pair of orderings `(123)` and `(12)`: the seed
    /// `(x1,x2,x3)` contributes the orbit of `(x3,x1,x2)` and of its
    /// retrograde `(x2,x1,x3)`.
    pub fn standard(x: &PcSegment) -> Result<RetroSystem> {
        let n = x.len();
        RetroSystem::build(
            x,
            [VoicePerm::parse("(123)", n)?, VoicePerm::parse("(12)", n)?],
        )
    }

    pub fn seed(&self) -> &PcSegment {
        &self.seed
    }

    pub fn modulus(&self) -> Modulus {
        self.seed.modulus()
    }

    pub fn orderings(&self) -> &[VoicePerm; 2] {
        &self.orderings
    }

    pub fn root_orbit(&self) -> &TiOrbit {
        &self.root_orbit
    }

    pub fn carrier(&self) -> &Arc<Carrier<PcSegment>> {
        &self.carrier
    }

    pub fn contains(&self, y: &PcSegment) -> bool {
        self.carrier.contains(y)
    }

    /// Which ordering orbit `y` lies in (0 or 1).
    pub fn orbit_tag(&self, y: &PcSegment) -> Result<usize> {
        Ok(self.tags[self.carrier.position_or_err(y)?])
    }

    /// Apply a root-position contextual operation to `y` by conjugation
    /// with the ordering of `y`'s orbit: `sigma N sigma^-1`.
    pub fn conj_op(&self, op: ContextualOp, y: &PcSegment) -> Result<PcSegment> {
        let sigma = &self.orderings[self.orbit_tag(y)?];
        let z = sigma.inverse().apply(y)?;
        let w = op.apply(&self.root_orbit, &z)?;
        sigma.apply(&w)
    }

    /// The conjugated operation as a permutation of the carrier.
    pub fn conj_perm(&self, op: ContextualOp) -> Perm {
        let label = op.label(self.seed.len());
        self.perm_of(&label, |y| self.conj_op(op, y))
            .expect("conjugated contextual operations preserve the carrier")
    }

    /// The retrograde (full reversal) as a permutation of the carrier.
    pub fn retro_perm(&self) -> Perm {
        let n = self.seed.len();
        let label = VoicePerm::retrograde(n).label();
        self.perm_of(&label, |y| Ok(y.reversed()))
            .expect("the retrograde swaps the two ordering orbits")
    }

    /// A global affine map as a permutation of the carrier.
    pub fn affine_perm(&self, f: &AffineMap) -> Result<Perm> {
        self.perm_of(&f.label(), |y| f.apply(y))
    }

    fn perm_of(&self, label: &str, f: impl Fn(&PcSegment) -> Result<PcSegment>) -> Result<Perm> {
        let mut images = Vec::with_capacity(self.carrier.len());
        for y in self.carrier.elements() {
            let image = f(y)?;
            let Some(pos) = self.carrier.position(&image) else {
                return Err(Error::NotABijection(format!(
                    "{label}: image {image} of {y} leaves the carrier"
                )));
            };
            images.push(pos);
        }
        Perm::from_images(images, Some(label.to_string()))
    }

    /// Extend an element of the root contextual group to the whole carrier
    /// by per-orbit conjugation.
    fn extend_root_perm(&self, root_perm: &Perm) -> Perm {
        let mut images = vec![usize::MAX; self.carrier.len()];
        for (idx, y) in self.carrier.elements().iter().enumerate() {
            let sigma = &self.orderings[self.tags[idx]];
            let z = sigma.inverse().apply(y).expect("arity checked");
            let zi = self
                .root_orbit
                .carrier()
                .position(&z)
                .expect("unordering lands in the root orbit");
            let w = self.root_orbit.carrier().get(root_perm.apply(zi));
            let image = sigma.apply(w).expect("arity checked");
            images[idx] = self
                .carrier
                .position(&image)
                .expect("reordering lands back in the carrier");
        }
        let mut perm = Perm::from_images(images, None).expect("conjugate of a bijection");
        if let Some(l) = root_perm.label() {
            perm = perm.with_label(l);
        }
        perm
    }
}

/// Retrograde inversion enchaining: the retrograde inversion of `y`
/// beginning with `y_{n-1}, y_n` in that order. Closed form:
/// `reverse(I_{y_{n-1}+y_n}(y))`.
pub fn rich(y: &PcSegment) -> Result<PcSegment> {
    let n = y.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "RICH needs a segment of length at least 2".into(),
        ));
    }
    let axis = i64::from(y.entry(n - 2).value()) + i64::from(y.entry(n - 1).value());
    Ok(AffineMap::inversion(y.modulus(), axis).apply(y)?.reversed())
}

/// The definitional search: among all retrograde inversions `reverse(I_j y)`
/// find the one starting with the last two notes of `y`. Exactly one must
/// exist; used to cross-validate the closed form.
pub fn rich_by_search(y: &PcSegment) -> Result<PcSegment> {
    let n = y.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "RICH needs a segment of length at least 2".into(),
        ));
    }
    let m = y.modulus();
    let mut hits = Vec::new();
    for j in 0..m.get() {
        let candidate = AffineMap::inversion(m, i64::from(j)).apply(y)?.reversed();
        if candidate.entry(0) == y.entry(n - 2) && candidate.entry(1) == y.entry(n - 1) {
            hits.push(candidate);
        }
    }
    hits.sort();
    hits.dedup();
    match hits.len() {
        1 => Ok(hits.pop().expect("nonempty")),
        k => Err(Error::Internal(format!(
            "{k} retrograde inversions of {y} begin with its last two notes"
        ))),
    }
}

/// The order-`4m` dual pair on a retro system: `<T/I, (13)>` and
/// `<PLR(S), (13)>`, plus their intersection.
#[derive(Debug, Clone)]
pub struct RetroDuality {
    pub system: RetroSystem,
    /// `{T_i, I_j} x {id, retrograde}`.
    pub ti_retro: FiniteGroup<PcSegment>,
    /// Conjugated contextual group times `{id, retrograde}`.
    pub plr_retro: FiniteGroup<PcSegment>,
    /// Pointwise intersection of the two groups (with `ti_retro` labels).
    pub intersection: Vec<Perm>,
}

/// Build the retro duality for a root-position seed with the standard
/// orderings.
pub fn build_retro_duality(x: &PcSegment) -> Result<RetroDuality> {
    let system = RetroSystem::standard(x)?;
    let retro = system.retro_perm();
    let retro_label = retro.label().unwrap_or("(13)").to_string();

    let mut ti_elements = Vec::new();
    for f in crate::pcmath::ti_group(system.modulus()) {
        let base = system.affine_perm(&f)?;
        ti_elements.push(base.clone());
        ti_elements.push(
            retro
                .compose(&base)
                .with_label(format!("{}*{}", f.label(), retro_label)),
        );
    }
    let ti_retro = FiniteGroup::new(Arc::clone(system.carrier()), ti_elements)?;

    let root_ctx = contextual_group(system.root_orbit());
    let mut plr_elements = Vec::new();
    for n in root_ctx.elements() {
        let ext = system.extend_root_perm(n);
        let composed_label = format!("{}*{}", n.display_label(), retro_label);
        plr_elements.push(retro.compose(&ext).with_label(composed_label));
        plr_elements.push(ext);
    }
    let plr_retro = FiniteGroup::new(Arc::clone(system.carrier()), plr_elements)?;

    let intersection: Vec<Perm> = ti_retro
        .elements()
        .iter()
        .filter(|e| plr_retro.contains(e))
        .cloned()
        .collect();

    Ok(RetroDuality {
        system,
        ti_retro,
        plr_retro,
        intersection,
    })
}

/// The subsystem generated by `(13)R` and `(13)P` together with the walk it
/// traces from a start chord.
#[derive(Debug, Clone)]
pub struct RowSubsystem {
    /// Closure of `{(13)R, (13)P}` on the full 4m-element carrier.
    pub group: FiniteGroup<PcSegment>,
    /// The same group restricted to the orbit of the start chord.
    pub restricted: FiniteGroup<PcSegment>,
    /// From the start, alternately applying `(13)R` and `(13)P` until the
    /// walk closes.
    pub walk: Vec<PcSegment>,
}

/// Build the row subsystem of the retro system of `x` through `start`.
pub fn build_row_subsystem(x: &PcSegment, start: &PcSegment) -> Result<RowSubsystem> {
    let system = RetroSystem::standard(x)?;
    build_row_subsystem_in(&system, start)
}

/// Same, reusing an existing system.
pub fn build_row_subsystem_in(system: &RetroSystem, start: &PcSegment) -> Result<RowSubsystem> {
    let start_idx = system.carrier().position_or_err(start)?;
    let retro = system.retro_perm();
    let retro_label = retro.label().unwrap_or("(13)").to_string();
    let r = retro
        .compose(&system.conj_perm(ContextualOp::R))
        .with_label(format!("{retro_label}*R"));
    let p = retro
        .compose(&system.conj_perm(ContextualOp::P))
        .with_label(format!("{retro_label}*P"));
    let group = close_generators(Arc::clone(system.carrier()), &[r, p])?;

    let orbit: BTreeSet<usize> = group.orbit_indices(start_idx).into_iter().collect();
    let restricted = group.restrict_to(&orbit)?;

    let mut walk = vec![start.clone()];
    let mut current = start.clone();
    loop {
        let op = if walk.len() % 2 == 1 {
            ContextualOp::R
        } else {
            ContextualOp::P
        };
        let next = system.conj_op(op, &current)?.reversed();
        if next == *start {
            break;
        }
        if walk.len() > system.carrier().len() {
            return Err(Error::Internal("row walk does not close".into()));
        }
        walk.push(next.clone());
        current = next;
    }
    Ok(RowSubsystem {
        group,
        restricted,
        walk,
    })
}


/// Fixture builders for the analytical figures, as network documents.
pub mod figures {
    use crate::netio::{EdgeDecl, NetworkDoc, NodeDecl, SquareDecl, SystemDecl, SystemKind};
    use indexmap::IndexMap;

    fn retro_system(seed: &str) -> SystemDecl {
        SystemDecl {
            kind: SystemKind::Retro,
            seed: seed.into(),
            subgroup_gens: None,
            base: None,
            orderings: None,
        }
    }

    fn node(system: &str, segment: &str) -> NodeDecl {
        NodeDecl {
            system: system.into(),
            segment: segment.into(),
        }
    }

    fn edge(from: &str, to: &str, op: &str, note: Option<&str>) -> EdgeDecl {
        EdgeDecl {
            from: from.into(),
            to: to.into(),
            op: op.into(),
            note: note.map(str::to_owned),
        }
    }

    /// The opening-theme network: shark-jet RICH step, then two affine
    /// moves into the major and stride rows.
    pub fn opening_theme_network() -> NetworkDoc {
        let mut systems = IndexMap::new();
        systems.insert("shark_jet".to_string(), retro_system("1,5,2"));
        systems.insert("major_minor".to_string(), retro_system("0,4,7"));
        systems.insert("stride_strain".to_string(), retro_system("0,4,10"));
        let mut nodes = IndexMap::new();
        nodes.insert("n1".to_string(), node("shark_jet", "2,1,5"));
        nodes.insert("n2".to_string(), node("shark_jet", "1,5,4"));
        nodes.insert("n3".to_string(), node("major_minor", "2,10,5"));
        nodes.insert("n4".to_string(), node("stride_strain", "10,2,4"));
        let edges = vec![
            edge("n1", "n2", "(13)*R", Some("also RICH; mm. 1-3")),
            edge("n2", "n3", "aff(5,9)", None),
            edge("n3", "n4", "aff(2,6)", None),
        ];
        NetworkDoc {
            modulus: 12,
            systems,
            nodes,
            edges,
            squares: Vec::new(),
        }
    }

    /// The five-chord RICH chain of the cello line, measures 8-10.
    pub fn rich_chain_network() -> NetworkDoc {
        let mut systems = IndexMap::new();
        systems.insert("cello".to_string(), retro_system("2,6,9"));
        let chain = ["3,8,0", "8,0,5", "0,5,9", "5,9,2", "9,2,6"];
        let mut nodes = IndexMap::new();
        for (k, segment) in chain.iter().enumerate() {
            nodes.insert(format!("c{}", k + 1), node("cello", segment));
        }
        let mut edges = Vec::new();
        for k in 0..chain.len() - 1 {
            let op = if k % 2 == 0 { "(13)*R" } else { "(13)*P" };
            let note = if k == 0 {
                Some("also RICH; mm. 8-10")
            } else {
                Some("also RICH")
            };
            edges.push(edge(
                &format!("c{}", k + 1),
                &format!("c{}", k + 2),
                op,
                note,
            ));
        }
        NetworkDoc {
            modulus: 12,
            systems,
            nodes,
            edges,
            squares: Vec::new(),
        }
    }

    /// The six-row summary network: shark-jet cycle, the three triadic
    /// rows, and the two stride-strain rows, joined by affine maps, with
    /// the commuting square of the first two rows declared.
    pub fn summary_network() -> NetworkDoc {
        struct Row {
            key: &'static str,
            seed: &'static str,
            chords: &'static [&'static str],
            reversed: bool,
            first_note: &'static str,
        }
        let rows = [
            Row {
                key: "shark_jet",
                seed: "1,5,2",
                chords: &[
                    "2,1,5", "1,5,4", "5,4,8", "4,8,7", "8,7,11", "7,11,10", "11,10,2", "10,2,1",
                ],
                reversed: false,
                first_note: "mm. 1-2",
            },
            Row {
                key: "triadic_88_92",
                seed: "0,4,7",
                chords: &[
                    "1,6,10", "6,10,3", "10,3,7", "3,7,0", "7,0,4", "0,4,9", "4,9,1", "9,1,6",
                ],
                reversed: false,
                first_note: "mm. 88-92",
            },
            Row {
                key: "triadic_8_10",
                seed: "2,6,9",
                chords: &["3,8,0", "8,0,5", "0,5,9", "5,9,2", "9,2,6"],
                reversed: false,
                first_note: "mm. 8-10",
            },
            Row {
                key: "triadic_10_12",
                seed: "0,4,7",
                chords: &["7,0,4", "0,4,9", "4,9,1", "9,1,6", "1,6,10"],
                reversed: false,
                first_note: "mm. 10-12",
            },
            Row {
                key: "stride_strain_91",
                seed: "0,4,10",
                chords: &["10,0,4", "0,4,6", "4,6,10"],
                reversed: true,
                first_note: "m. 91",
            },
            Row {
                key: "stride_strain_90",
                seed: "0,4,10",
                chords: &["1,3,7", "3,7,9", "7,9,1"],
                reversed: false,
                first_note: "m. 90",
            },
        ];

        let mut systems = IndexMap::new();
        let mut nodes = IndexMap::new();
        let mut edges = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            systems.insert(row.key.to_string(), retro_system(row.seed));
            for (c, chord) in row.chords.iter().enumerate() {
                nodes.insert(format!("r{}c{}", r + 1, c + 1), node(row.key, chord));
            }
            for c in 0..row.chords.len() - 1 {
                let op = if c % 2 == 0 { "(13)*R" } else { "(13)*P" };
                let (from, to) = if row.reversed {
                    (
                        format!("r{}c{}", r + 1, c + 2),
                        format!("r{}c{}", r + 1, c + 1),
                    )
                } else {
                    (
                        format!("r{}c{}", r + 1, c + 1),
                        format!("r{}c{}", r + 1, c + 2),
                    )
                };
                let note = if c == 0 { Some(row.first_note) } else { None };
                edges.push(edge(&from, &to, op, note));
            }
        }
        // Extra measure marks along the shark-jet cycle.
        for (k, note) in [(2usize, "C30"), (4, "m. 85"), (6, "O13-15")] {
            if let Some(e) = edges
                .iter_mut()
                .find(|e| e.from == format!("r1c{}", k + 1) && e.to == format!("r1c{}", k + 2))
            {
                e.note = Some(note.to_string());
            }
        }
        // Vertical affine morphism edges.
        let verticals: [(usize, usize, &str, usize); 5] = [
            (2, 1, "aff(7,7)", 8),
            (2, 3, "aff(1,2)", 5),
            (3, 4, "aff(1,4)", 5),
            (4, 5, "aff(10,0)", 3),
            (5, 6, "aff(1,3)", 3),
        ];
        for (from_row, to_row, op, count) in verticals {
            for c in 1..=count {
                edges.push(edge(
                    &format!("r{from_row}c{c}"),
                    &format!("r{to_row}c{c}"),
                    op,
                    None,
                ));
            }
        }
        let squares = vec![SquareDecl {
            corners: [
                "r2c1".to_string(),
                "r2c2".to_string(),
                "r1c1".to_string(),
                "r1c2".to_string(),
            ],
        }];
        NetworkDoc {
            modulus: 12,
            systems,
            nodes,
            edges,
            squares,
        }
    }
}
