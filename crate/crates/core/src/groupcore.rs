//! Finite permutation groups over an indexed carrier: generator closure,
//! simple transitivity, dual-group computation, dihedral recognition,
//! set-wise stabilizers, and conjugation transfer.
//!
//! Everything here is explicit-element and exact; the groups in play have at
//! most ~100 elements, so no stabilizer-chain machinery is needed or wanted.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::pcmath::{AffineMap, PitchClass};

/// Anything a carrier can index: ordered, hashable, printable.
pub trait Point: Clone + Ord + Eq + Hash + fmt::Debug + fmt::Display {}
impl<T: Clone + Ord + Eq + Hash + fmt::Debug + fmt::Display> Point for T {}

/// A canonically ordered list of distinct points with reverse lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Carrier<P: Point> {
    elements: Vec<P>,
    index: HashMap<P, usize>,
}

impl<P: Point> Carrier<P> {
    /// Sorts the input; duplicate points are an error.
    pub fn new(elements: impl IntoIterator<Item = P>) -> Result<Carrier<P>> {
        let mut elements: Vec<P> = elements.into_iter().collect();
        elements.sort();
        let mut index = HashMap::with_capacity(elements.len());
        for (i, p) in elements.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate carrier element {p}"
                )));
            }
        }
        Ok(Carrier { elements, index })
    }

    pub fn from_set(set: BTreeSet<P>) -> Carrier<P> {
        Carrier::new(set).expect("sets have no duplicates")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[P] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &P {
        &self.elements[i]
    }

    pub fn position(&self, p: &P) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn position_or_err(&self, p: &P) -> Result<usize> {
        self.position(p)
            .ok_or_else(|| Error::NotInCarrier(p.to_string()))
    }

    pub fn contains(&self, p: &P) -> bool {
        self.index.contains_key(p)
    }
}

/// A permutation of carrier indices. The label is documentation only:
/// equality, ordering and hashing all ignore it.
#[derive(Debug, Clone)]
pub struct Perm {
    images: Vec<usize>,
    label: Option<String>,
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm {
            images: (0..n).collect(),
            label: None,
        }
    }

    pub fn from_images(images: Vec<usize>, label: Option<String>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::NotABijection(
                    label.unwrap_or_else(|| format!("{images:?}")),
                ));
            }
            seen[i] = true;
        }
        Ok(Perm { images, label })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Perm {
        self.label = Some(label.into());
        self
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.images.len(), other.images.len());
        Perm {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
            label: None,
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (i, &img) in self.images.iter().enumerate() {
            images[img] = i;
        }
        Perm {
            images,
            label: None,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &img)| i == img)
    }

    /// Multiplicative order.
    pub fn order(&self) -> usize {
        let mut acc = self.clone();
        let mut k = 1;
        while !acc.is_identity() {
            acc = acc.compose(self);
            k += 1;
        }
        k
    }

    pub fn display_label(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| format!("{:?}", self.images))
    }
}

impl PartialEq for Perm {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images
    }
}
impl Eq for Perm {}
impl PartialOrd for Perm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Perm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.images.cmp(&other.images)
    }
}
impl Hash for Perm {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.images.hash(state);
    }
}

/// An explicit subgroup of `Sym(carrier)`, acting naturally on its carrier.
/// Construction verifies the group axioms: identity present, closed under
/// composition and inverse.
#[derive(Debug, Clone)]
pub struct FiniteGroup<P: Point> {
    carrier: Arc<Carrier<P>>,
    /// Sorted by image vectors for canonical set semantics.
    elements: Vec<Perm>,
    index: HashMap<Vec<usize>, usize>,
}

impl<P: Point> PartialEq for FiniteGroup<P> {
    /// Pointwise equality of carriers and element sets; labels ignored.
    fn eq(&self, other: &Self) -> bool {
        self.carrier == other.carrier && self.elements == other.elements
    }
}
impl<P: Point> Eq for FiniteGroup<P> {}

impl<P: Point> FiniteGroup<P> {
    pub fn new(carrier: Arc<Carrier<P>>, mut elements: Vec<Perm>) -> Result<FiniteGroup<P>> {
        let n = carrier.len();
        for e in &elements {
            if e.degree() != n {
                return Err(Error::NotABijection(e.display_label()));
            }
        }
        elements.sort();
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.images().to_vec(), i).is_some() {
                return Err(Error::NotAGroup(format!(
                    "duplicate element {}",
                    e.display_label()
                )));
            }
        }
        let group = FiniteGroup {
            carrier,
            elements,
            index,
        };
        if !group.contains(&Perm::identity(n)) {
            return Err(Error::NotAGroup("identity is missing".into()));
        }
        for a in &group.elements {
            if !group.contains(&a.inverse()) {
                return Err(Error::NotAGroup(format!(
                    "inverse of {} is missing",
                    a.display_label()
                )));
            }
            for b in &group.elements {
                if !group.contains(&a.compose(b)) {
                    return Err(Error::NotAGroup(format!(
                        "product {} * {} is missing",
                        a.display_label(),
                        b.display_label()
                    )));
                }
            }
        }
        Ok(group)
    }

    pub fn trivial(carrier: Arc<Carrier<P>>) -> FiniteGroup<P> {
        let n = carrier.len();
        FiniteGroup::new(carrier, vec![Perm::identity(n).with_label("e")])
            .expect("trivial group is a group")
    }

    pub fn carrier(&self) -> &Arc<Carrier<P>> {
        &self.carrier
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.index.contains_key(p.images())
    }

    pub fn position(&self, p: &Perm) -> Option<usize> {
        self.index.get(p.images()).copied()
    }

    /// Same element with its stored label, if present in the group.
    pub fn find(&self, p: &Perm) -> Option<&Perm> {
        self.position(p).map(|i| &self.elements[i])
    }

    pub fn is_subgroup_of(&self, other: &FiniteGroup<P>) -> bool {
        self.carrier == other.carrier && self.elements.iter().all(|e| other.contains(e))
    }

    /// Apply element `g` to a point.
    pub fn apply(&self, g: &Perm, p: &P) -> Result<P> {
        let i = self.carrier.position_or_err(p)?;
        Ok(self.carrier.get(g.apply(i)).clone())
    }

    /// Indices of the orbit of `start`, sorted.
    pub fn orbit_indices(&self, start: usize) -> Vec<usize> {
        let mut orbit: BTreeSet<usize> = BTreeSet::new();
        for g in &self.elements {
            orbit.insert(g.apply(start));
        }
        orbit.into_iter().collect()
    }

    /// Number of group elements mapping `s` to `t`.
    pub fn transporter_count(&self, s: usize, t: usize) -> usize {
        self.elements.iter().filter(|g| g.apply(s) == t).count()
    }

    /// Relabel elements via a lookup; elements without a match keep their
    /// existing label.
    pub fn relabel_by(&mut self, names: &HashMap<Vec<usize>, String>) {
        for e in &mut self.elements {
            if let Some(name) = names.get(e.images()) {
                e.label = Some(name.clone());
            }
        }
    }

    /// Restrict every element to the sub-carrier spanned by `indices`
    /// (which each element must preserve). Fails if some element moves a
    /// point out of the subset or if the restriction is not injective.
    pub fn restrict_to(&self, indices: &BTreeSet<usize>) -> Result<FiniteGroup<P>> {
        let sub: Vec<P> = indices
            .iter()
            .map(|&i| self.carrier.get(i).clone())
            .collect();
        let sub_carrier = Arc::new(Carrier::new(sub)?);
        let mut old_to_new: HashMap<usize, usize> = HashMap::new();
        for &i in indices {
            let pos = sub_carrier
                .position(self.carrier.get(i))
                .expect("subset element present");
            old_to_new.insert(i, pos);
        }
        let mut elements = Vec::with_capacity(self.elements.len());
        for g in &self.elements {
            let mut images = vec![usize::MAX; sub_carrier.len()];
            for &i in indices {
                let img = g.apply(i);
                let Some(&new_img) = old_to_new.get(&img) else {
                    return Err(Error::NotASubgroup(format!(
                        "{} does not preserve the subset: {} maps outside",
                        g.display_label(),
                        self.carrier.get(i)
                    )));
                };
                images[old_to_new[&i]] = new_img;
            }
            let mut perm = Perm::from_images(images, g.label.clone())?;
            if perm.label.is_none() {
                perm.label = g.label.clone();
            }
            elements.push(perm);
        }
        elements.sort();
        elements.dedup();
        if elements.len() != self.elements.len() {
            return Err(Error::BadGroup(
                "restriction to the subset is not injective".into(),
            ));
        }
        FiniteGroup::new(sub_carrier, elements)
    }
}

/// Smallest subgroup of `Sym(carrier)` containing the generators. Each
/// element is labeled with a shortest discovered generator word, ties broken
/// lexicographically.
pub fn close_generators<P: Point>(
    carrier: Arc<Carrier<P>>,
    gens: &[Perm],
) -> Result<FiniteGroup<P>> {
    let n = carrier.len();
    for g in gens {
        if g.degree() != n {
            return Err(Error::NotABijection(g.display_label()));
        }
    }
    let mut gens: Vec<(String, Perm)> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| {
            (
                g.label().map(str::to_owned).unwrap_or(format!("g{i}")),
                g.clone(),
            )
        })
        .collect();
    gens.sort_by(|a, b| a.0.cmp(&b.0));

    let mut words: BTreeMap<Vec<usize>, String> = BTreeMap::new();
    let identity = Perm::identity(n);
    words.insert(identity.images().to_vec(), "e".to_string());
    let mut frontier: Vec<Perm> = vec![identity];
    while !frontier.is_empty() {
        // Generate the next BFS level in deterministic word order.
        let mut candidates: Vec<(String, Perm)> = Vec::new();
        for parent in &frontier {
            let parent_word = words[parent.images()].clone();
            for (name, g) in &gens {
                let next = g.compose(parent);
                let word = if parent.is_identity() {
                    name.clone()
                } else {
                    format!("{name}*{parent_word}")
                };
                candidates.push((word, next));
            }
        }
        candidates.sort_by(|a, b| a.0.cmp(&b.0));
        let mut next_frontier = Vec::new();
        for (word, perm) in candidates {
            if !words.contains_key(perm.images()) {
                words.insert(perm.images().to_vec(), word);
                next_frontier.push(perm);
            }
        }
        frontier = next_frontier;
    }

    let elements = words
        .into_iter()
        .map(|(images, word)| Perm {
            images,
            label: Some(word),
        })
        .collect();
    FiniteGroup::new(carrier, elements)
}

/// True iff every ordered pair of carrier points is connected by exactly one
/// group element.
pub fn is_simply_transitive<P: Point>(group: &FiniteGroup<P>) -> bool {
    simple_transitivity_witness(group).is_none()
}

/// `None` when simply transitive, otherwise a description of an offending
/// pair.
pub fn simple_transitivity_witness<P: Point>(group: &FiniteGroup<P>) -> Option<String> {
    let n = group.carrier().len();
    for s in 0..n {
        let mut counts = vec![0usize; n];
        for g in group.elements() {
            counts[g.apply(s)] += 1;
        }
        for (t, &c) in counts.iter().enumerate() {
            if c != 1 {
                return Some(format!(
                    "{} element(s) map {} to {}",
                    c,
                    group.carrier().get(s),
                    group.carrier().get(t)
                ));
            }
        }
    }
    None
}

/// The dual of a simply transitive group: the group `{h_t}` where, for the
/// lexicographically least base point `s_0`, `h_t(g s_0) := g t`. The result
/// commutes elementwise with the input and is again simply transitive; it is
/// the full centralizer of the input in `Sym(S)`.
pub fn dual_group<P: Point>(group: &FiniteGroup<P>) -> Result<FiniteGroup<P>> {
    dual_group_from_base(group, 0)
}

/// Same construction from an arbitrary base point; the resulting element set
/// does not depend on the choice.
pub fn dual_group_from_base<P: Point>(
    group: &FiniteGroup<P>,
    base: usize,
) -> Result<FiniteGroup<P>> {
    if let Some(witness) = simple_transitivity_witness(group) {
        return Err(Error::NotSimplyTransitive(witness));
    }
    let n = group.carrier().len();
    // reach[x] = the unique g with g(base) = x.
    let mut reach: Vec<Option<&Perm>> = vec![None; n];
    for g in group.elements() {
        reach[g.apply(base)] = Some(g);
    }
    let mut elements = Vec::with_capacity(n);
    for t in 0..n {
        let images: Vec<usize> = (0..n)
            .map(|x| reach[x].expect("simply transitive").apply(t))
            .collect();
        let label = format!("h({})", group.carrier().get(t));
        elements.push(Perm::from_images(images, Some(label))?);
    }
    let dual = FiniteGroup::new(Arc::clone(group.carrier()), elements)?;
    debug_assert!(is_simply_transitive(&dual));
    debug_assert!(commute_elementwise(group, &dual).unwrap_or(false));
    Ok(dual)
}

/// True iff every element of `g1` commutes with every element of `g2`.
pub fn commute_elementwise<P: Point>(g1: &FiniteGroup<P>, g2: &FiniteGroup<P>) -> Result<bool> {
    if g1.carrier() != g2.carrier() {
        return Err(Error::CarrierMismatch);
    }
    for a in g1.elements() {
        for b in g2.elements() {
            if a.compose(b) != b.compose(a) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff the group has order `two_n` and admits generators `s` of order
/// `two_n/2` and `t` of order 2 with `t s t = s^-1`. Searches all pairs,
/// which is fine at these orders. A Klein 4-group counts as dihedral of
/// order 4.
pub fn is_dihedral_of_order<P: Point>(group: &FiniteGroup<P>, two_n: usize) -> bool {
    if two_n % 2 != 0 || two_n < 2 || group.order() != two_n {
        return false;
    }
    let half = two_n / 2;
    for s in group.elements() {
        if s.order() != half {
            continue;
        }
        let s_inv = s.inverse();
        for t in group.elements() {
            if t.order() != 2 {
                continue;
            }
            if t.compose(s).compose(t) != s_inv {
                continue;
            }
            let gen = close_generators(
                Arc::clone(group.carrier()),
                &[s.clone().with_label("s"), t.clone().with_label("t")],
            );
            if let Ok(gen) = gen {
                if gen.order() == two_n {
                    return true;
                }
            }
        }
    }
    false
}

/// All affine maps in `maps` fixing `subset` as a set.
pub fn setwise_stabilizer(maps: &[AffineMap], subset: &BTreeSet<PitchClass>) -> Vec<AffineMap> {
    maps.iter()
        .filter(|g| {
            let image: BTreeSet<PitchClass> = subset.iter().map(|&x| g.apply_class(x)).collect();
            image == *subset
        })
        .copied()
        .collect()
}

/// A morphism of group actions `(f, phi): (G1, S1) -> (G2, S2)` with
/// `f(g s) = phi(g) f(s)`. Construction verifies that `phi` is a
/// homomorphism and that the intertwining square commutes everywhere.
#[derive(Debug, Clone)]
pub struct ActionMorphism<P: Point, Q: Point> {
    source: FiniteGroup<P>,
    target: FiniteGroup<Q>,
    f: Vec<usize>,
    phi: Vec<usize>,
}

/// Monic/epic/iso classification of a morphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MorphismClass {
    pub monic: bool,
    pub epic: bool,
    pub iso: bool,
}

impl<P: Point, Q: Point> ActionMorphism<P, Q> {
    pub fn new(
        source: FiniteGroup<P>,
        target: FiniteGroup<Q>,
        f: Vec<usize>,
        phi: Vec<usize>,
    ) -> Result<ActionMorphism<P, Q>> {
        if f.len() != source.carrier().len() || f.iter().any(|&i| i >= target.carrier().len()) {
            return Err(Error::InvalidArgument(
                "space map does not land in the target carrier".into(),
            ));
        }
        if phi.len() != source.order() || phi.iter().any(|&i| i >= target.order()) {
            return Err(Error::InvalidArgument(
                "group map does not land in the target group".into(),
            ));
        }
        // phi must be a homomorphism.
        for (i, a) in source.elements().iter().enumerate() {
            for (j, b) in source.elements().iter().enumerate() {
                let ab = source.position(&a.compose(b)).expect("source is closed");
                let im = target.elements()[phi[i]].compose(&target.elements()[phi[j]]);
                if target.position(&im) != Some(phi[ab]) {
                    return Err(Error::BadHomomorphism(format!(
                        "phi({} * {}) differs from phi({}) * phi({})",
                        a.display_label(),
                        b.display_label(),
                        a.display_label(),
                        b.display_label()
                    )));
                }
            }
        }
        // Intertwining: f(g s) = phi(g) f(s) for all g, s.
        for (i, g) in source.elements().iter().enumerate() {
            let h = &target.elements()[phi[i]];
            for s in 0..source.carrier().len() {
                let lhs = f[g.apply(s)];
                let rhs = h.apply(f[s]);
                if lhs != rhs {
                    return Err(Error::MorphismViolation {
                        s: g.display_label(),
                        t: source.carrier().get(s).to_string(),
                        lhs: target.carrier().get(lhs).to_string(),
                        rhs: target.carrier().get(rhs).to_string(),
                    });
                }
            }
        }
        Ok(ActionMorphism {
            source,
            target,
            f,
            phi,
        })
    }

    pub fn source(&self) -> &FiniteGroup<P> {
        &self.source
    }

    pub fn target(&self) -> &FiniteGroup<Q> {
        &self.target
    }

    pub fn space_map(&self) -> &[usize] {
        &self.f
    }

    pub fn group_map(&self) -> &[usize] {
        &self.phi
    }

    pub fn apply_f(&self, p: &P) -> Result<Q> {
        let i = self.source.carrier().position_or_err(p)?;
        Ok(self.target.carrier().get(self.f[i]).clone())
    }

    pub fn apply_phi(&self, g: &Perm) -> Result<Perm> {
        let i = self.source.position(g).ok_or_else(|| {
            Error::InvalidArgument(format!("{} not in source group", g.display_label()))
        })?;
        Ok(self.target.elements()[self.phi[i]].clone())
    }

    /// Monic/epic/iso via injectivity/surjectivity of `f`. For morphisms of
    /// simply transitive actions the same answers must come from `phi`; a
    /// disagreement is a library bug and panics.
    pub fn classify(&self) -> MorphismClass {
        let f_inj = is_injective(&self.f);
        let f_surj = is_surjective(&self.f, self.target.carrier().len());
        let phi_inj = is_injective(&self.phi);
        let phi_surj = is_surjective(&self.phi, self.target.order());
        if is_simply_transitive(&self.source) && is_simply_transitive(&self.target) {
            assert_eq!(
                f_inj, phi_inj,
                "monic criterion disagreement between f and phi: library bug"
            );
            assert_eq!(
                f_surj, phi_surj,
                "epic criterion disagreement between f and phi: library bug"
            );
        }
        MorphismClass {
            monic: f_inj,
            epic: f_surj,
            iso: f_inj && f_surj,
        }
    }
}

pub(crate) fn is_injective(map: &[usize]) -> bool {
    let mut seen = BTreeSet::new();
    map.iter().all(|&i| seen.insert(i))
}

pub(crate) fn is_surjective(map: &[usize], codomain: usize) -> bool {
    let seen: BTreeSet<usize> = map.iter().copied().collect();
    seen.len() == codomain
}

/// Transfer an action along a bijection of carriers: the result is
/// `(f G f^-1, S2)` together with the isomorphism `(f, g -> f g f^-1)`.
pub fn conjugate_transfer<P: Point, Q: Point>(
    group: &FiniteGroup<P>,
    target_carrier: Arc<Carrier<Q>>,
    f: &[usize],
) -> Result<(FiniteGroup<Q>, ActionMorphism<P, Q>)> {
    let n = group.carrier().len();
    if target_carrier.len() != n || f.len() != n || !is_injective(f) || f.iter().any(|&i| i >= n) {
        return Err(Error::NotABijection("carrier map".into()));
    }
    let mut f_inv = vec![0usize; n];
    for (i, &img) in f.iter().enumerate() {
        f_inv[img] = i;
    }
    let mut elements = Vec::with_capacity(group.order());
    for g in group.elements() {
        let images: Vec<usize> = (0..n).map(|x| f[g.apply(f_inv[x])]).collect();
        let mut perm = Perm::from_images(images, None)?;
        perm.label = g.label().map(str::to_owned);
        elements.push(perm);
    }
    let conjugated = FiniteGroup::new(target_carrier, elements)?;
    let phi: Vec<usize> = group
        .elements()
        .iter()
        .map(|g| {
            let images: Vec<usize> = (0..n).map(|x| f[g.apply(f_inv[x])]).collect();
            conjugated
                .position(&Perm {
                    images,
                    label: None,
                })
                .expect("conjugate present")
        })
        .collect();
    let morphism = ActionMorphism::new(group.clone(), conjugated.clone(), f.to_vec(), phi)?;
    Ok((conjugated, morphism))
}

/// Conjugate a permutation: `k g k^-1`.
pub fn conjugate_perm(k: &Perm, g: &Perm) -> Perm {
    k.compose(g).compose(&k.inverse())
}
