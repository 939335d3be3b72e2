//! `T/I`-orbits of pitch-class segments and the contextual operations that
//! live on them: `K`, `Q_i`, the contextual inversions `J^{q,r}` (with `P`,
//! `L`, `R` as the trichord cases), the generalized contextual group, the
//! side transformation `W_a`, generalized Schritte `Qbar_j` on affine orbit
//! systems, and the morphisms of group actions induced by affine maps.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groupcore::{close_generators, ActionMorphism, Carrier, FiniteGroup, Perm};
use crate::pcmath::{AffineMap, Modulus, PcSegment};

/// How a segment in a `T/I`-orbit arises from the seed: `Y = T_i(X)` or
/// `Y = I_j(X)`. The tritone condition guarantees the two cases are disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegForm {
    T(u32),
    I(u32),
}

/// The `T/I`-orbit of a seed segment, with every member classified as a
/// T-form or an I-form at construction time.
#[derive(Debug, Clone)]
pub struct TiOrbit {
    seed: PcSegment,
    carrier: Arc<Carrier<PcSegment>>,
    forms: Vec<SegForm>,
}

/// True iff two distinct-valued entries span an interval other than `m/2`.
/// For odd `m` any two distinct entries qualify.
pub fn tritone_condition(x: &PcSegment) -> bool {
    let m = x.modulus().get();
    for (qi, &a) in x.entries().iter().enumerate() {
        for &b in &x.entries()[qi + 1..] {
            if a == b {
                continue;
            }
            if m % 2 != 0 {
                return true;
            }
            let diff = (a.value() + m - b.value()) % m;
            if diff != m / 2 {
                return true;
            }
        }
    }
    false
}

/// Build the `T/I`-orbit of `x`. Fails when `x` misses the tritone
/// condition, and (defensively) when some member would be both a T-form and
/// an I-form.
pub fn ti_orbit(x: &PcSegment) -> Result<TiOrbit> {
    if !tritone_condition(x) {
        return Err(Error::Degenerate(format!(
            "seed {x} fails the tritone condition"
        )));
    }
    let m = x.modulus().get();
    let mut classified: HashMap<PcSegment, SegForm> = HashMap::new();
    for i in 0..m {
        let y = AffineMap::transposition(x.modulus(), i64::from(i))
            .apply(x)
            .expect("same modulus");
        classified.insert(y, SegForm::T(i));
    }
    for j in 0..m {
        let y = AffineMap::inversion(x.modulus(), i64::from(j))
            .apply(x)
            .expect("same modulus");
        if classified.contains_key(&y) {
            return Err(Error::DegenerateSymmetry(y.to_string()));
        }
        classified.insert(y, SegForm::I(j));
    }
    let carrier = Arc::new(Carrier::new(classified.keys().cloned())?);
    let forms = carrier.elements().iter().map(|y| classified[y]).collect();
    Ok(TiOrbit {
        seed: x.clone(),
        carrier,
        forms,
    })
}

impl TiOrbit {
    pub fn seed(&self) -> &PcSegment {
        &self.seed
    }

    pub fn modulus(&self) -> Modulus {
        self.seed.modulus()
    }

    pub fn carrier(&self) -> &Arc<Carrier<PcSegment>> {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn contains(&self, y: &PcSegment) -> bool {
        self.carrier.contains(y)
    }

    pub fn form_of(&self, y: &PcSegment) -> Result<SegForm> {
        Ok(self.forms[self.carrier.position_or_err(y)?])
    }

    pub fn t_forms(&self) -> Vec<PcSegment> {
        self.by_form(true)
    }

    pub fn i_forms(&self) -> Vec<PcSegment> {
        self.by_form(false)
    }

    fn by_form(&self, want_t: bool) -> Vec<PcSegment> {
        let mut out: Vec<(u32, PcSegment)> = self
            .carrier
            .elements()
            .iter()
            .zip(&self.forms)
            .filter_map(|(y, f)| match (f, want_t) {
                (SegForm::T(i), true) => Some((*i, y.clone())),
                (SegForm::I(j), false) => Some((*j, y.clone())),
                _ => None,
            })
            .collect();
        out.sort_by_key(|(k, _)| *k);
        out.into_iter().map(|(_, y)| y).collect()
    }

    /// The unique `(a, b)` with `y = T_b M_a (seed)` in the T/I picture:
    /// `(1, i)` on T-forms and `(m-1, j)` on I-forms.
    pub fn decomposition(&self, y: &PcSegment) -> Result<(u32, u32)> {
        Ok(match self.form_of(y)? {
            SegForm::T(i) => (1, i),
            SegForm::I(j) => (self.modulus().get() - 1, j),
        })
    }

    /// `K(Y) := I_{y1+y2}(Y)`.
    pub fn op_k(&self, y: &PcSegment) -> Result<PcSegment> {
        self.carrier.position_or_err(y)?;
        k_formula(y)
    }

    /// `Q_i`: transpose by `i` on T-forms and by `-i` on I-forms.
    pub fn op_q(&self, i: i64, y: &PcSegment) -> Result<PcSegment> {
        let amount = match self.form_of(y)? {
            SegForm::T(_) => i,
            SegForm::I(_) => -i,
        };
        AffineMap::transposition(self.modulus(), amount).apply(y)
    }

    /// Contextual inversion `J^{q,r}(Y) := I_{y_q+y_r}(Y)`, `1 <= q < r <= n`.
    pub fn op_j(&self, q: usize, r: usize, y: &PcSegment) -> Result<PcSegment> {
        self.carrier.position_or_err(y)?;
        j_formula(q, r, y)
    }

    /// Parallel `P = J^{1,3}` on trichords.
    pub fn op_p(&self, y: &PcSegment) -> Result<PcSegment> {
        self.op_j(1, 3, y)
    }

    /// Leading-tone `L = J^{2,3}` on trichords.
    pub fn op_l(&self, y: &PcSegment) -> Result<PcSegment> {
        self.op_j(2, 3, y)
    }

    /// Relative `R = J^{1,2}` on trichords.
    pub fn op_r(&self, y: &PcSegment) -> Result<PcSegment> {
        self.op_j(1, 2, y)
    }

    /// `Qbar_j` read through the T/I decomposition: `T_j` on T-forms,
    /// `T_{-j}` on I-forms. Coincides with `Q_j`.
    pub fn op_qbar(&self, j: i64, y: &PcSegment) -> Result<PcSegment> {
        let (a, _) = self.decomposition(y)?;
        AffineMap::transposition(self.modulus(), i64::from(a) * j).apply(y)
    }

    /// Side transformation on an orbit member. A bijection of the orbit only
    /// for `a = 1` or `a = m-1`; the result may leave the orbit otherwise.
    pub fn op_w(&self, a: i64, y: &PcSegment) -> Result<PcSegment> {
        self.carrier.position_or_err(y)?;
        w_formula(a, y)
    }

    /// Build a permutation of the orbit from a segment map.
    pub fn perm_of(
        &self,
        label: &str,
        f: impl Fn(&PcSegment) -> Result<PcSegment>,
    ) -> Result<Perm> {
        perm_from_segment_map(&self.carrier, label, f)
    }

    /// The `T/I`-group as permutations of this orbit, labeled `T0..I(m-1)`.
    pub fn ti_perm_group(&self) -> FiniteGroup<PcSegment> {
        let elements = crate::pcmath::ti_group(self.modulus())
            .iter()
            .map(|f| {
                perm_from_segment_map(&self.carrier, &f.label(), |y| f.apply(y))
                    .expect("T/I preserves its own orbit")
            })
            .collect();
        FiniteGroup::new(Arc::clone(&self.carrier), elements).expect("T/I is a group")
    }

    /// Permutation induced by `Q_i`.
    pub fn q_perm(&self, i: i64) -> Perm {
        let label = format!("Q{}", self.modulus().reduce(i));
        self.perm_of(&label, |y| self.op_q(i, y))
            .expect("Q_i preserves the orbit")
    }

    /// Permutation induced by `K`.
    pub fn k_perm(&self) -> Perm {
        self.perm_of("K", |y| self.op_k(y))
            .expect("K preserves the orbit")
    }

    /// Permutation induced by `J^{q,r}`, labeled `P`/`L`/`R` on trichords.
    pub fn j_perm(&self, q: usize, r: usize) -> Result<Perm> {
        let label = j_label(q, r, self.seed.len());
        self.perm_of(&label, |y| self.op_j(q, r, y))
    }
}

/// Conventional name of `J^{q,r}` for the segment length at hand.
pub fn j_label(q: usize, r: usize, n: usize) -> String {
    if n == 3 {
        match (q, r) {
            (1, 3) => return "P".into(),
            (2, 3) => return "L".into(),
            (1, 2) => return "R".into(),
            _ => {}
        }
    }
    format!("J({q},{r})")
}

/// The contextual inversion formula on a bare segment (no orbit needed):
/// invert about `y_q + y_r`.
pub fn j_formula(q: usize, r: usize, y: &PcSegment) -> Result<PcSegment> {
    if q < 1 || r <= q || r > y.len() {
        return Err(Error::InvalidArgument(format!(
            "J({q},{r}) is out of range for a segment of length {}",
            y.len()
        )));
    }
    let axis = i64::from(y.entry(q - 1).value()) + i64::from(y.entry(r - 1).value());
    AffineMap::inversion(y.modulus(), axis).apply(y)
}

/// `K` on a bare segment: invert about `y_1 + y_2`.
pub fn k_formula(y: &PcSegment) -> Result<PcSegment> {
    j_formula(1, 2, y)
}

/// Side transformation `W_a(Y) := T_{(1-a) y_1}(M_a(Y))`, which fixes the
/// first coordinate. Total on segments; a bijection of an orbit only for
/// unit `a`.
pub fn w_formula(a: i64, y: &PcSegment) -> Result<PcSegment> {
    let m = y.modulus();
    let scaled = AffineMap::multiplication(m, a).apply(y)?;
    let shift = (1 - a) * i64::from(y.entry(0).value());
    AffineMap::transposition(m, shift).apply(&scaled)
}

fn perm_from_segment_map(
    carrier: &Arc<Carrier<PcSegment>>,
    label: &str,
    f: impl Fn(&PcSegment) -> Result<PcSegment>,
) -> Result<Perm> {
    let mut images = Vec::with_capacity(carrier.len());
    for y in carrier.elements() {
        let image = f(y)?;
        let Some(pos) = carrier.position(&image) else {
            return Err(Error::NotABijection(format!(
                "{label}: image {image} of {y} leaves the carrier"
            )));
        };
        images.push(pos);
    }
    Perm::from_images(images, Some(label.to_string()))
}

/// The generalized contextual group `<K, Q_1>` of an orbit, with every
/// element canonically labeled `Q<i>` or `Q<i>*K`.
pub fn contextual_group(orbit: &TiOrbit) -> FiniteGroup<PcSegment> {
    let closure = close_generators(
        Arc::clone(orbit.carrier()),
        &[orbit.k_perm(), orbit.q_perm(1)],
    )
    .expect("K and Q1 are bijections of the orbit");

    // Every element is a Schritt Q_i or a Wechsel Q_i K; relabel canonically.
    let m = orbit.modulus().get();
    let k = orbit.k_perm();
    let mut names: HashMap<Vec<usize>, String> = HashMap::new();
    for i in 0..m {
        let q = orbit.q_perm(i64::from(i));
        names.insert(q.images().to_vec(), format!("Q{i}"));
        names.insert(q.compose(&k).images().to_vec(), format!("Q{i}*K"));
    }
    let mut group = closure;
    assert!(
        group.order() == names.len()
            && group
                .elements()
                .iter()
                .all(|e| names.contains_key(e.images())),
        "contextual group is not {{Q_i, Q_i K}}: library bug"
    );
    group.relabel_by(&names);
    group
}

/// Closure of a set of contextual inversions `J^{q,r}` inside `Sym(orbit)`.
pub fn j_subgroup(orbit: &TiOrbit, pairs: &[(usize, usize)]) -> Result<FiniteGroup<PcSegment>> {
    let gens: Vec<Perm> = pairs
        .iter()
        .map(|&(q, r)| orbit.j_perm(q, r))
        .collect::<Result<_>>()?;
    close_generators(Arc::clone(orbit.carrier()), &gens)
}

/// An orbit of a seed under a chosen affine group `{x -> ax+b : a in units}`,
/// acting simply transitively, together with the decomposition of each
/// member as `T_b M_a (seed)`.
#[derive(Debug, Clone)]
pub struct AffOrbitSystem {
    seed: PcSegment,
    units: Vec<u32>,
    maps: Vec<AffineMap>,
    carrier: Arc<Carrier<PcSegment>>,
    decomp: Vec<(u32, u32)>,
}

impl AffOrbitSystem {
    /// Build the system. `units` must be a subgroup of `Z_m^*`; the affine
    /// group it spans must act simply transitively on the orbit of `x`.
    pub fn new(x: &PcSegment, units: &[i64]) -> Result<AffOrbitSystem> {
        let m = x.modulus();
        let mut unit_set: BTreeSet<u32> = BTreeSet::new();
        for &u in units {
            let a = m.reduce(u);
            if !AffineMap::multiplication(m, i64::from(a.value())).is_invertible() {
                return Err(Error::InvalidArgument(format!(
                    "{a} is not invertible mod {m}"
                )));
            }
            unit_set.insert(a.value());
        }
        if !unit_set.contains(&1) {
            return Err(Error::InvalidArgument("units must contain 1".into()));
        }
        for &a in &unit_set {
            for &b in &unit_set {
                let prod = (u64::from(a) * u64::from(b) % u64::from(m.get())) as u32;
                if !unit_set.contains(&prod) {
                    return Err(Error::InvalidArgument(format!(
                        "units are not multiplicatively closed: {a}*{b} = {prod} is missing"
                    )));
                }
            }
        }

        let units: Vec<u32> = unit_set.into_iter().collect();
        let mut maps = Vec::new();
        let mut seen: HashMap<PcSegment, (u32, u32)> = HashMap::new();
        for &a in &units {
            for b in 0..m.get() {
                let f = AffineMap::new(m, i64::from(a), i64::from(b));
                let y = f.apply(x)?;
                if let Some(&(a0, b0)) = seen.get(&y) {
                    return Err(Error::NotSimplyTransitive(format!(
                        "aff({a0},{b0}) and aff({a},{b}) act identically on {x}"
                    )));
                }
                seen.insert(y, (a, b));
                maps.push(f);
            }
        }
        let carrier = Arc::new(Carrier::new(seen.keys().cloned())?);
        let decomp = carrier.elements().iter().map(|y| seen[y]).collect();
        Ok(AffOrbitSystem {
            seed: x.clone(),
            units,
            maps,
            carrier,
            decomp,
        })
    }

    pub fn seed(&self) -> &PcSegment {
        &self.seed
    }

    pub fn modulus(&self) -> Modulus {
        self.seed.modulus()
    }

    pub fn units(&self) -> &[u32] {
        &self.units
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn carrier(&self) -> &Arc<Carrier<PcSegment>> {
        &self.carrier
    }

    /// The unique `(a, b)` with `y = T_b M_a (seed)`.
    pub fn decomposition(&self, y: &PcSegment) -> Result<(u32, u32)> {
        Ok(self.decomp[self.carrier.position_or_err(y)?])
    }

    /// Side transformation `W_a` on an orbit member, for a unit `a`.
    pub fn op_w(&self, a: i64, y: &PcSegment) -> Result<PcSegment> {
        let a_red = self.modulus().reduce(a).value();
        if !self.units.contains(&a_red) {
            return Err(Error::InvalidArgument(format!(
                "{a_red} is not one of the system units"
            )));
        }
        self.carrier.position_or_err(y)?;
        w_formula(a, y)
    }

    /// Generalized Schritt `Qbar_j(Y) := T_{a j}(Y)` where `Y = T_b M_a X`.
    pub fn op_qbar(&self, j: i64, y: &PcSegment) -> Result<PcSegment> {
        let (a, _) = self.decomposition(y)?;
        AffineMap::transposition(self.modulus(), i64::from(a) * j).apply(y)
    }

    /// The affine group as permutations of the carrier.
    pub fn affine_perm_group(&self) -> FiniteGroup<PcSegment> {
        let elements = self
            .maps
            .iter()
            .map(|f| {
                perm_from_segment_map(&self.carrier, &f.label(), |y| f.apply(y))
                    .expect("group maps preserve the orbit")
            })
            .collect();
        FiniteGroup::new(Arc::clone(&self.carrier), elements).expect("affine group is a group")
    }

    /// The contextual dual `{Qbar_j W_a : a in units, j in Z_m}`.
    pub fn qbar_w_dual(&self) -> FiniteGroup<PcSegment> {
        let m = self.modulus().get();
        let mut elements = Vec::new();
        for &a in &self.units {
            for j in 0..m {
                let label = format!("Qbar{j}*W{a}");
                let perm = perm_from_segment_map(&self.carrier, &label, |y| {
                    self.op_qbar(i64::from(j), &w_formula(i64::from(a), y)?)
                })
                .expect("Qbar_j W_a preserves the orbit");
                elements.push(perm);
            }
        }
        FiniteGroup::new(Arc::clone(&self.carrier), elements)
            .expect("the Qbar/W maps close into a group")
    }
}

/// Build the affine orbit system of `x` together with its contextual dual.
pub fn affine_system(
    x: &PcSegment,
    units: &[i64],
) -> Result<(AffOrbitSystem, FiniteGroup<PcSegment>)> {
    let system = AffOrbitSystem::new(x, units)?;
    let dual = system.qbar_w_dual();
    Ok((system, dual))
}

/// One failed commutation instance.
#[derive(Debug, Clone)]
pub struct CommutationCounterexample {
    pub op: String,
    pub input: PcSegment,
    pub lhs: PcSegment,
    pub rhs: PcSegment,
}

/// Outcome of an affine-commutation sweep.
#[derive(Debug, Clone)]
pub struct CommutationReport {
    pub checks: usize,
    pub counterexample: Option<CommutationCounterexample>,
}

impl CommutationReport {
    pub fn pass(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Check that `f` commutes with every contextual inversion `J^{q,r}` on the
/// orbit, with `W_a` for every `a`, and (when `f` preserves the orbit) with
/// `Qbar_j` read through the T/I decomposition. `f` need not be invertible.
pub fn verify_affine_commutation(orbit: &TiOrbit, f: &AffineMap) -> Result<CommutationReport> {
    orbit.modulus().check_match(f.modulus())?;
    let n = orbit.seed().len();
    let m = orbit.modulus().get();
    let mut checks = 0;
    fn fail(
        checks: usize,
        op: String,
        input: &PcSegment,
        lhs: PcSegment,
        rhs: PcSegment,
    ) -> CommutationReport {
        CommutationReport {
            checks,
            counterexample: Some(CommutationCounterexample {
                op,
                input: input.clone(),
                lhs,
                rhs,
            }),
        }
    }

    for y in orbit.carrier().elements() {
        let fy = f.apply(y)?;
        for q in 1..=n {
            for r in (q + 1)..=n {
                let lhs = f.apply(&j_formula(q, r, y)?)?;
                let rhs = j_formula(q, r, &fy)?;
                checks += 1;
                if lhs != rhs {
                    return Ok(fail(checks, format!("J({q},{r})"), y, lhs, rhs));
                }
            }
        }
        for a in 0..m {
            let lhs = f.apply(&w_formula(i64::from(a), y)?)?;
            let rhs = w_formula(i64::from(a), &fy)?;
            checks += 1;
            if lhs != rhs {
                return Ok(fail(checks, format!("W{a}"), y, lhs, rhs));
            }
        }
    }

    // Qbar is contextual in the decomposition Y = T_b M_a X, and its
    // commutation law needs decompositions to stay multiplicative under f:
    // the linear part of f must lie in the system units ({1, m-1} here).
    // Merely preserving the orbit as a set is not enough.
    let c = f.linear().value();
    if c == 1 || c == m - 1 {
        for y in orbit.carrier().elements() {
            let fy = f.apply(y)?;
            for j in 0..m {
                let lhs = f.apply(&orbit.op_qbar(i64::from(j), y)?)?;
                let rhs = orbit.op_qbar(i64::from(j), &fy)?;
                checks += 1;
                if lhs != rhs {
                    return Ok(fail(checks, format!("Qbar{j}"), y, lhs, rhs));
                }
            }
        }
    }

    Ok(CommutationReport {
        checks,
        counterexample: None,
    })
}

/// The analogous sweep on an affine orbit system: `W_a` for every residue
/// (the identity is formula-level) and `Qbar_j` whenever `f` maps the
/// carrier into itself.
pub fn verify_affine_commutation_on_system(
    system: &AffOrbitSystem,
    f: &AffineMap,
) -> Result<CommutationReport> {
    system.modulus().check_match(f.modulus())?;
    let m = system.modulus().get();
    let mut checks = 0;

    for y in system.carrier().elements() {
        let fy = f.apply(y)?;
        for a in 0..m {
            let lhs = f.apply(&w_formula(i64::from(a), y)?)?;
            let rhs = w_formula(i64::from(a), &fy)?;
            checks += 1;
            if lhs != rhs {
                return Ok(CommutationReport {
                    checks,
                    counterexample: Some(CommutationCounterexample {
                        op: format!("W{a}"),
                        input: y.clone(),
                        lhs,
                        rhs,
                    }),
                });
            }
        }
    }

    // Same gate as on T/I-orbits: Qbar commutation needs the linear part of
    // `f` inside the system units, which is exactly when `f` maps the
    // carrier into itself compatibly with the decomposition.
    if system.units.contains(&f.linear().value()) {
        for y in system.carrier().elements() {
            let fy = f.apply(y)?;
            for j in 0..m {
                let lhs = f.apply(&system.op_qbar(i64::from(j), y)?)?;
                let rhs = system.op_qbar(i64::from(j), &fy)?;
                checks += 1;
                if lhs != rhs {
                    return Ok(CommutationReport {
                        checks,
                        counterexample: Some(CommutationCounterexample {
                            op: format!("Qbar{j}"),
                            input: y.clone(),
                            lhs,
                            rhs,
                        }),
                    });
                }
            }
        }
    }

    Ok(CommutationReport {
        checks,
        counterexample: None,
    })
}

/// The morphism of group actions induced by an affine map out of a subgroup
/// generated by contextual inversions.
#[derive(Debug, Clone)]
pub struct AffineActionMorphism {
    pub map: AffineMap,
    pub source_orbit: TiOrbit,
    pub target_orbit: TiOrbit,
    /// The subgroup generated by the requested `J^{q,r}` on the full source
    /// orbit.
    pub subgroup: FiniteGroup<PcSegment>,
    /// The full contextual group of the image seed on the full target orbit.
    pub target_group: FiniteGroup<PcSegment>,
    /// `(G_0 restricted to S_0, S_0) -> (G', S')` where `S_0 = G_0 X`.
    pub on_sub_orbit: ActionMorphism<PcSegment, PcSegment>,
    /// The same morphism with the target cut down to the image subgroup and
    /// its orbit of `f(X)`.
    pub onto_image: ActionMorphism<PcSegment, PcSegment>,
}

/// Build the morphism `(f, phi)` where `phi(g)` is the unique element of the
/// target contextual group with `phi(g) . f(X) = f(g . X)`. Verifies that
/// `phi` is a homomorphism fixing the generator labels `J^{q,r}` and that
/// the intertwining law holds on the whole source orbit.
pub fn morphism_from_affine(
    orbit: &TiOrbit,
    gen_pairs: &[(usize, usize)],
    f: &AffineMap,
) -> Result<AffineActionMorphism> {
    orbit.modulus().check_match(f.modulus())?;
    if gen_pairs.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one contextual inversion generator is required".into(),
        ));
    }
    let subgroup = j_subgroup(orbit, gen_pairs)?;
    let target_seed = f.apply(orbit.seed())?;
    let target_orbit = ti_orbit(&target_seed)
        .map_err(|e| Error::Degenerate(format!("image seed {target_seed} is degenerate: {e}")))?;
    let target_group = contextual_group(&target_orbit);

    // phi via simple transitivity of the target group at the base point.
    let fx = target_seed.clone();
    let fx_idx = target_orbit.carrier().position_or_err(&fx)?;
    let x_idx = orbit.carrier().position_or_err(orbit.seed())?;
    let mut phi_on_full: Vec<usize> = Vec::with_capacity(subgroup.order());
    for g in subgroup.elements() {
        let gx = orbit.carrier().get(g.apply(x_idx));
        let fgx = f.apply(gx)?;
        let fgx_idx = target_orbit.carrier().position_or_err(&fgx)?;
        let mut image = None;
        for (k, h) in target_group.elements().iter().enumerate() {
            if h.apply(fx_idx) == fgx_idx {
                image = Some(k);
                break;
            }
        }
        phi_on_full.push(image.expect("target contextual group is simply transitive"));
    }

    // Generators must map to the target's own contextual inversions.
    for &(q, r) in gen_pairs {
        let src = orbit.j_perm(q, r)?;
        let idx = subgroup
            .position(&src)
            .expect("generators lie in their closure");
        let image = &target_group.elements()[phi_on_full[idx]];
        let expected = target_orbit.j_perm(q, r)?;
        if image != &expected {
            return Err(Error::Internal(format!(
                "phi(J({q},{r})) is not the target J({q},{r})"
            )));
        }
    }

    // Full intertwining on the whole source orbit.
    for (gi, g) in subgroup.elements().iter().enumerate() {
        let h = &target_group.elements()[phi_on_full[gi]];
        for s in orbit.carrier().elements() {
            let lhs = f.apply(
                &orbit
                    .carrier()
                    .get(g.apply(orbit.carrier().position_or_err(s)?))
                    .clone(),
            )?;
            let rhs_point = target_orbit
                .carrier()
                .get(h.apply(target_orbit.carrier().position_or_err(&f.apply(s)?)?))
                .clone();
            if lhs != rhs_point {
                return Err(Error::Internal(format!(
                    "intertwining fails for {} at {s}",
                    g.display_label()
                )));
            }
        }
    }

    // Restrict the source to S_0 = G_0 X.
    let sub_orbit_indices: BTreeSet<usize> = subgroup.orbit_indices(x_idx).into_iter().collect();
    let restricted_source = subgroup.restrict_to(&sub_orbit_indices)?;

    // Match restricted elements back to their extensions for phi.
    let mut phi_restricted = Vec::with_capacity(restricted_source.order());
    let mut f_restricted = Vec::with_capacity(restricted_source.carrier().len());
    for e in restricted_source.elements() {
        let mut found = None;
        for (gi, g) in subgroup.elements().iter().enumerate() {
            let matches = sub_orbit_indices.iter().all(|&i| {
                let from = restricted_source
                    .carrier()
                    .position(orbit.carrier().get(i))
                    .expect("sub-carrier point");
                restricted_source
                    .carrier()
                    .position(orbit.carrier().get(g.apply(i)))
                    == Some(e.apply(from))
            });
            if matches {
                found = Some(gi);
                break;
            }
        }
        phi_restricted.push(phi_on_full[found.expect("restriction is injective")]);
    }
    for s in restricted_source.carrier().elements() {
        f_restricted.push(target_orbit.carrier().position_or_err(&f.apply(s)?)?);
    }

    let on_sub_orbit = ActionMorphism::new(
        restricted_source.clone(),
        target_group.clone(),
        f_restricted.clone(),
        phi_restricted.clone(),
    )?;

    // Image-restricted variant: target subgroup = phi(G_0), target space =
    // its orbit of f(X).
    let image_elements: BTreeSet<usize> = phi_restricted.iter().copied().collect();
    let image_group = FiniteGroup::new(
        Arc::clone(target_group.carrier()),
        image_elements
            .iter()
            .map(|&k| target_group.elements()[k].clone())
            .collect(),
    )?;
    let image_orbit: BTreeSet<usize> = image_group.orbit_indices(fx_idx).into_iter().collect();
    let image_restricted = image_group.restrict_to(&image_orbit)?;
    let f_image: Vec<usize> = restricted_source
        .carrier()
        .elements()
        .iter()
        .map(|s| {
            image_restricted
                .carrier()
                .position_or_err(&f.apply(s).expect("same modulus"))
        })
        .collect::<Result<_>>()?;
    // Restrict each phi image to the sub-orbit and look it up there.
    let restrict_full = |full: &Perm| -> Perm {
        let mut images = vec![usize::MAX; image_restricted.carrier().len()];
        for &i in &image_orbit {
            let from = image_restricted
                .carrier()
                .position(target_group.carrier().get(i))
                .expect("point present");
            let to = image_restricted
                .carrier()
                .position(target_group.carrier().get(full.apply(i)))
                .expect("image subgroup preserves its orbit");
            images[from] = to;
        }
        Perm::from_images(images, None).expect("restriction of a bijection")
    };
    let phi_image: Vec<usize> = phi_restricted
        .iter()
        .map(|&k| {
            image_restricted
                .position(&restrict_full(&target_group.elements()[k]))
                .expect("restricted image present")
        })
        .collect();
    let onto_image = ActionMorphism::new(restricted_source, image_restricted, f_image, phi_image)?;

    Ok(AffineActionMorphism {
        map: *f,
        source_orbit: orbit.clone(),
        target_orbit,
        subgroup,
        target_group,
        on_sub_orbit,
        onto_image,
    })
}
