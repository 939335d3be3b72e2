//! The intervallic picture: generalized interval systems `(S, IVLS, int)`,
//! their morphisms with monic/epic/iso classification, and the equivalences
//! with simply transitive group actions and with groups under affine maps.
//!
//! Interval groups are stored as multiplication tables over labeled
//! elements, deliberately decoupled from any permutation representation, so
//! that moving between the intervallic and transformational descriptions is
//! a genuine computation.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groupcore::{
    is_injective, is_surjective, simple_transitivity_witness, ActionMorphism, Carrier, FiniteGroup,
    MorphismClass, Perm, Point,
};
use crate::pcmath::AffineMap;

/// A finite group given by its multiplication table over labeled elements.
/// `mul(i, j)` means "apply `j` first, then `i`", matching function
/// composition everywhere else in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractGroup {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    identity: usize,
}

impl AbstractGroup {
    pub fn new(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<AbstractGroup> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::BadGroup("empty group".into()));
        }
        {
            let mut sorted = labels.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != n {
                return Err(Error::BadGroup("duplicate element labels".into()));
            }
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::BadGroup("table shape mismatch".into()));
        }
        for row in &table {
            if row.iter().any(|&v| v >= n) {
                return Err(Error::BadGroup("table entry out of range".into()));
            }
        }
        // Identity.
        let identity = (0..n)
            .find(|&e| (0..n).all(|i| table[e][i] == i && table[i][e] == i))
            .ok_or_else(|| Error::BadGroup("no identity element".into()))?;
        // Associativity.
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::BadGroup(format!(
                            "associativity fails at ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        // Inverses.
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == identity && table[b][a] == identity) {
                Some(b) => inverse[a] = b,
                None => {
                    return Err(Error::BadGroup(format!("{} has no inverse", labels[a])));
                }
            }
        }
        Ok(AbstractGroup {
            labels,
            table,
            inverse,
            identity,
        })
    }

    /// The cyclic group `Z_n` with elements labeled `0..n-1`.
    pub fn cyclic(n: usize) -> AbstractGroup {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let table = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        AbstractGroup::new(labels, table).expect("Z_n is a group")
    }

    /// Abstract group of a closed set of affine maps, labeled `T3`, `I1`, ...
    pub fn from_affine_maps(maps: &[AffineMap]) -> Result<AbstractGroup> {
        let labels: Vec<String> = maps.iter().map(|f| f.label()).collect();
        let index: HashMap<AffineMap, usize> =
            maps.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut table = vec![vec![0usize; maps.len()]; maps.len()];
        for (i, f) in maps.iter().enumerate() {
            for (j, g) in maps.iter().enumerate() {
                let fg = f.compose(g)?;
                let Some(&k) = index.get(&fg) else {
                    return Err(Error::NotAGroup(format!(
                        "{} * {} = {} is not in the set",
                        f.label(),
                        g.label(),
                        fg.label()
                    )));
                };
                table[i][j] = k;
            }
        }
        AbstractGroup::new(labels, table)
    }

    /// Forget the permutation representation of a finite group. Element `i`
    /// here is element `i` of `group.elements()`; labels are reused when
    /// unique, positional otherwise.
    pub fn from_perm_group<P: Point>(group: &FiniteGroup<P>) -> AbstractGroup {
        let mut labels: Vec<String> = group.elements().iter().map(|e| e.display_label()).collect();
        {
            let mut sorted = labels.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != labels.len() {
                labels = (0..group.order()).map(|i| format!("g{i}")).collect();
            }
        }
        let table = group
            .elements()
            .iter()
            .map(|a| {
                group
                    .elements()
                    .iter()
                    .map(|b| group.position(&a.compose(b)).expect("closed"))
                    .collect()
            })
            .collect();
        AbstractGroup::new(labels, table).expect("a permutation group is a group")
    }

    /// The opposite group: same elements, reversed multiplication.
    pub fn opposite(&self) -> AbstractGroup {
        let n = self.order();
        let table = (0..n)
            .map(|i| (0..n).map(|j| self.table[j][i]).collect())
            .collect();
        AbstractGroup::new(self.labels.clone(), table).expect("opposite of a group is a group")
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn inv(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn position_of_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Validate that `phi` (an element map by index) is a homomorphism into
    /// `target`.
    pub fn check_homomorphism(&self, target: &AbstractGroup, phi: &[usize]) -> Result<()> {
        if phi.len() != self.order() || phi.iter().any(|&i| i >= target.order()) {
            return Err(Error::BadHomomorphism(
                "element map has the wrong shape".into(),
            ));
        }
        for a in 0..self.order() {
            for b in 0..self.order() {
                if phi[self.mul(a, b)] != target.mul(phi[a], phi[b]) {
                    return Err(Error::BadHomomorphism(format!(
                        "phi({} * {}) != phi({}) * phi({})",
                        self.label(a),
                        self.label(b),
                        self.label(a),
                        self.label(b)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A point of an abstract musical space: just a display label. Used as the
/// space of canonical generalized interval systems.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupPoint(pub String);

impl fmt::Display for GroupPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A generalized interval system `(S, IVLS, int)`. Construction checks both
/// axioms: unique `t` with `int(s,t) = i` for each `s, i`, and the cocycle
/// law `int(s,t) int(t,u) = int(s,u)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gis<P: Point> {
    space: Arc<Carrier<P>>,
    ivls: AbstractGroup,
    int_table: Vec<Vec<usize>>,
}

impl<P: Point> Gis<P> {
    pub fn new(
        space: Arc<Carrier<P>>,
        ivls: AbstractGroup,
        int_table: Vec<Vec<usize>>,
    ) -> Result<Gis<P>> {
        let n = space.len();
        if ivls.order() != n {
            return Err(Error::BadGroup(format!(
                "interval group order {} differs from space size {n}",
                ivls.order()
            )));
        }
        if int_table.len() != n || int_table.iter().any(|row| row.len() != n) {
            return Err(Error::BadGroup("interval table shape mismatch".into()));
        }
        // Axiom (i): for each s, t -> int(s,t) is a bijection onto IVLS.
        for (s, row) in int_table.iter().enumerate() {
            let mut seen = vec![false; n];
            for &i in row {
                if i >= n || seen[i] {
                    return Err(Error::BadGroup(format!(
                        "axiom (i) fails at {}: intervals from it are not uniquely solvable",
                        space.get(s)
                    )));
                }
                seen[i] = true;
            }
        }
        // Axiom (ii): int(s,t) int(t,u) = int(s,u).
        for s in 0..n {
            for t in 0..n {
                for u in 0..n {
                    if ivls.mul(int_table[s][t], int_table[t][u]) != int_table[s][u] {
                        return Err(Error::BadGroup(format!(
                            "axiom (ii) fails at ({}, {}, {})",
                            space.get(s),
                            space.get(t),
                            space.get(u)
                        )));
                    }
                }
            }
        }
        Ok(Gis {
            space,
            ivls,
            int_table,
        })
    }

    pub fn space(&self) -> &Arc<Carrier<P>> {
        &self.space
    }

    pub fn ivls(&self) -> &AbstractGroup {
        &self.ivls
    }

    pub fn int(&self, s: usize, t: usize) -> usize {
        self.int_table[s][t]
    }

    /// Interval between two points, as an interval-group index.
    pub fn int_of(&self, s: &P, t: &P) -> Result<usize> {
        Ok(self.int_table[self.space.position_or_err(s)?][self.space.position_or_err(t)?])
    }

    /// Interval between two points, by label.
    pub fn int_label(&self, s: &P, t: &P) -> Result<&str> {
        Ok(self.ivls.label(self.int_of(s, t)?))
    }
}

/// The GIS of a simply transitive action: `IVLS` is the opposite group of
/// the acting group and `int(s,t)` is the unique element sending `s` to `t`.
pub fn gis_from_action<P: Point>(action: &FiniteGroup<P>) -> Result<Gis<P>> {
    if let Some(witness) = simple_transitivity_witness(action) {
        return Err(Error::NotSimplyTransitive(witness));
    }
    let n = action.carrier().len();
    let ivls = AbstractGroup::from_perm_group(action).opposite();
    let mut int_table = vec![vec![usize::MAX; n]; n];
    for (gi, g) in action.elements().iter().enumerate() {
        for s in 0..n {
            int_table[s][g.apply(s)] = gi;
        }
    }
    Gis::new(Arc::clone(action.carrier()), ivls, int_table)
}

/// The transformational face of a GIS: the simply transitive group of
/// transpositions `T_i`, where `T_i(s)` is the unique `t` with
/// `int(s, t) = i`. The map `i -> T_i` is an anti-isomorphism.
pub fn action_from_gis<P: Point>(g: &Gis<P>) -> FiniteGroup<P> {
    let n = g.space().len();
    let mut elements = Vec::with_capacity(n);
    for i in 0..n {
        let mut images = vec![usize::MAX; n];
        for s in 0..n {
            let t = (0..n)
                .find(|&t| g.int(s, t) == i)
                .expect("axiom (i) guarantees a solution");
            images[s] = t;
        }
        let label = format!("T({})", g.ivls().label(i));
        elements.push(Perm::from_images(images, Some(label)).expect("axiom (i): bijection"));
    }
    FiniteGroup::new(Arc::clone(g.space()), elements).expect("transpositions of a GIS form a group")
}

/// The canonical GIS of a group: space and intervals are both the group,
/// with `int(g, h) = g^-1 h`.
pub fn canonical_gis(group: &AbstractGroup) -> Gis<GroupPoint> {
    let points: Vec<GroupPoint> = group
        .labels()
        .iter()
        .map(|l| GroupPoint(l.clone()))
        .collect();
    let space = Arc::new(Carrier::new(points).expect("labels are unique"));
    // Carrier sorting permutes the elements; go through labels.
    let to_group: Vec<usize> = space
        .elements()
        .iter()
        .map(|p| group.position_of_label(&p.0).expect("same labels"))
        .collect();
    let n = group.order();
    let int_table = (0..n)
        .map(|s| {
            (0..n)
                .map(|t| group.mul(group.inv(to_group[s]), to_group[t]))
                .collect()
        })
        .collect();
    Gis::new(space, group.clone(), int_table).expect("canonical construction satisfies the axioms")
}

/// A morphism of generalized interval systems: a space map `f` and an
/// interval homomorphism `phi` with `int_2(f(s), f(t)) = phi(int_1(s, t))`.
#[derive(Debug, Clone)]
pub struct GisMorphism<P: Point, Q: Point> {
    source: Gis<P>,
    target: Gis<Q>,
    f: Vec<usize>,
    phi: Vec<usize>,
}

/// Validate the defining square on every pair of points; on failure, the
/// error carries the first violating pair with both interval values.
pub fn check_gis_morphism<P: Point, Q: Point>(
    source: &Gis<P>,
    target: &Gis<Q>,
    f: Vec<usize>,
    phi: Vec<usize>,
) -> Result<GisMorphism<P, Q>> {
    if f.len() != source.space().len() || f.iter().any(|&i| i >= target.space().len()) {
        return Err(Error::InvalidArgument(
            "space map does not land in the target space".into(),
        ));
    }
    source.ivls().check_homomorphism(target.ivls(), &phi)?;
    for s in 0..source.space().len() {
        for t in 0..source.space().len() {
            let lhs = target.int(f[s], f[t]);
            let rhs = phi[source.int(s, t)];
            if lhs != rhs {
                return Err(Error::MorphismViolation {
                    s: source.space().get(s).to_string(),
                    t: source.space().get(t).to_string(),
                    lhs: target.ivls().label(lhs).to_string(),
                    rhs: target.ivls().label(rhs).to_string(),
                });
            }
        }
    }
    Ok(GisMorphism {
        source: source.clone(),
        target: target.clone(),
        f,
        phi,
    })
}

impl<P: Point, Q: Point> GisMorphism<P, Q> {
    pub fn identity(gis: &Gis<P>) -> GisMorphism<P, P> {
        let n = gis.space().len();
        check_gis_morphism(gis, gis, (0..n).collect(), (0..n).collect())
            .expect("identity is a morphism")
    }

    pub fn source(&self) -> &Gis<P> {
        &self.source
    }

    pub fn target(&self) -> &Gis<Q> {
        &self.target
    }

    pub fn space_map(&self) -> &[usize] {
        &self.f
    }

    pub fn interval_map(&self) -> &[usize] {
        &self.phi
    }

    /// `other` after `self`.
    pub fn then<R: Point>(&self, other: &GisMorphism<Q, R>) -> Result<GisMorphism<P, R>> {
        if self.target != other.source {
            return Err(Error::InvalidArgument(
                "morphism composition endpoint mismatch".into(),
            ));
        }
        let f = self.f.iter().map(|&i| other.f[i]).collect();
        let phi = self.phi.iter().map(|&i| other.phi[i]).collect();
        check_gis_morphism(&self.source, &other.target, f, phi)
    }

    /// Monic/epic/iso, decided by injectivity/surjectivity of `f`. The same
    /// answers must come from `phi`; any disagreement is a library bug and
    /// panics.
    pub fn classify(&self) -> MorphismClass {
        let f_inj = is_injective(&self.f);
        let f_surj = is_surjective(&self.f, self.target.space().len());
        let phi_inj = is_injective(&self.phi);
        let phi_surj = is_surjective(&self.phi, self.target.ivls().order());
        assert_eq!(
            f_inj, phi_inj,
            "monic criterion disagreement between f and phi: library bug"
        );
        assert_eq!(
            f_surj, phi_surj,
            "epic criterion disagreement between f and phi: library bug"
        );
        MorphismClass {
            monic: f_inj,
            epic: f_surj,
            iso: f_inj && f_surj,
        }
    }
}

/// Free-function spelling of the classification.
pub fn classify_morphism<P: Point, Q: Point>(m: &GisMorphism<P, Q>) -> MorphismClass {
    m.classify()
}

/// All bijections of the space preserving every interval. Each candidate is
/// pinned by the image of the base point and then verified on all pairs; the
/// passers form a simply transitive group, pointwise equal to the dual of
/// the transposition action.
pub fn interval_preserving_maps<P: Point>(g: &Gis<P>) -> FiniteGroup<P> {
    let n = g.space().len();
    let mut elements = Vec::new();
    for t0 in 0..n {
        let mut images = vec![usize::MAX; n];
        let mut total = true;
        for s in 0..n {
            let want = g.int(0, s);
            match (0..n).find(|&u| g.int(t0, u) == want) {
                Some(u) => images[s] = u,
                None => {
                    total = false;
                    break;
                }
            }
        }
        if !total {
            continue;
        }
        let preserves = (0..n).all(|s| (0..n).all(|t| g.int(images[s], images[t]) == g.int(s, t)));
        if !preserves {
            continue;
        }
        if let Ok(perm) = Perm::from_images(images, Some(format!("p({})", g.space().get(t0)))) {
            elements.push(perm);
        }
    }
    FiniteGroup::new(Arc::clone(g.space()), elements)
        .expect("interval preserving maps form a group")
}

/// The functor from the intervallic to the transformational picture, on
/// morphisms: `(f, phi) -> (f, phi-bar)` with `phi-bar(T_i) = T_{phi(i)}`.
pub fn action_morphism_from_gis_morphism<P: Point, Q: Point>(
    m: &GisMorphism<P, Q>,
) -> Result<ActionMorphism<P, Q>> {
    let source_action = action_from_gis(m.source());
    let target_action = action_from_gis(m.target());
    // T_i lives at some sorted position in the action group; map through it.
    fn pos_of<R: Point>(gis: &Gis<R>, action: &FiniteGroup<R>, i: usize) -> usize {
        let n = gis.space().len();
        let mut images = vec![usize::MAX; n];
        for s in 0..n {
            images[s] = (0..n).find(|&t| gis.int(s, t) == i).expect("axiom (i)");
        }
        action
            .position(&Perm::from_images(images, None).expect("bijection"))
            .expect("transposition is in the action group")
    }
    let mut phi_bar = vec![usize::MAX; source_action.order()];
    for i in 0..m.source().ivls().order() {
        let from = pos_of(m.source(), &source_action, i);
        let to = pos_of(m.target(), &target_action, m.interval_map()[i]);
        phi_bar[from] = to;
    }
    ActionMorphism::new(
        source_action,
        target_action,
        m.space_map().to_vec(),
        phi_bar,
    )
}

/// The inverse passage on morphisms: a morphism of simply transitive actions
/// induces a GIS morphism between the associated interval systems, with the
/// same space map and the group map read through `i -> T_i`.
pub fn gis_morphism_from_action_morphism<P: Point, Q: Point>(
    m: &ActionMorphism<P, Q>,
) -> Result<GisMorphism<P, Q>> {
    let source = gis_from_action(m.source())?;
    let target = gis_from_action(m.target())?;
    // gis_from_action indexes intervals by the acting group's element order,
    // so the action-level group map is already the interval map.
    check_gis_morphism(
        &source,
        &target,
        m.space_map().to_vec(),
        m.group_map().to_vec(),
    )
}

/// The canonical-GIS functor on morphisms: an affine map of groups
/// `g -> a * phi(g)` becomes the GIS morphism `(a phi, phi)` between the
/// canonical systems.
pub fn canonical_gis_morphism(
    source: &AbstractGroup,
    target: &AbstractGroup,
    phi: &[usize],
    a: usize,
) -> Result<GisMorphism<GroupPoint, GroupPoint>> {
    source.check_homomorphism(target, phi)?;
    if a >= target.order() {
        return Err(Error::InvalidArgument("constant out of range".into()));
    }
    let source_gis = canonical_gis(source);
    let target_gis = canonical_gis(target);
    let f: Vec<usize> = source_gis
        .space()
        .elements()
        .iter()
        .map(|p| {
            let g = source.position_of_label(&p.0).expect("same labels");
            let image = target.mul(a, phi[g]);
            target_gis
                .space()
                .position(&GroupPoint(target.label(image).to_string()))
                .expect("same labels")
        })
        .collect();
    // Intervals of a canonical GIS are indexed by the group itself.
    check_gis_morphism(&source_gis, &target_gis, f, phi.to_vec())
}
