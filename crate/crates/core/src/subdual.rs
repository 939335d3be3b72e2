//! The sub-dual-group construction: given dual groups `(G, H)` on a carrier,
//! a subgroup `G_0 <= G`, and a base chord `s_0`, the orbit `S_0 = G_0 s_0`
//! carries a new dual pair, namely `G_0` and `H_0 = {h in H : h s_0 in S_0}`
//! restricted to `S_0`. All six clauses of the theorem are verified
//! constructively on every build. Also the three octatonic cover systems.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::contextual::{contextual_group, ti_orbit, TiOrbit};
use crate::error::{Error, Result};
use crate::groupcore::{
    commute_elementwise, dual_group, setwise_stabilizer, simple_transitivity_witness, FiniteGroup,
    Perm, Point,
};
use crate::pcmath::{ti_group, AffineMap, Modulus, PcSegment, PitchClass};

/// A verified sub dual system.
#[derive(Debug, Clone)]
pub struct SubDualSystem<P: Point> {
    parent_g: FiniteGroup<P>,
    parent_h: FiniteGroup<P>,
    g0: FiniteGroup<P>,
    base: P,
    orbit: BTreeSet<usize>,
    h0: FiniteGroup<P>,
    g0_restricted: FiniteGroup<P>,
    h0_restricted: FiniteGroup<P>,
}

impl<P: Point> SubDualSystem<P> {
    pub fn parent_g(&self) -> &FiniteGroup<P> {
        &self.parent_g
    }

    pub fn parent_h(&self) -> &FiniteGroup<P> {
        &self.parent_h
    }

    pub fn g0(&self) -> &FiniteGroup<P> {
        &self.g0
    }

    pub fn h0(&self) -> &FiniteGroup<P> {
        &self.h0
    }

    pub fn base(&self) -> &P {
        &self.base
    }

    /// `S_0` as elements of the parent carrier, sorted.
    pub fn sub_carrier(&self) -> Vec<P> {
        self.orbit
            .iter()
            .map(|&i| self.parent_g.carrier().get(i).clone())
            .collect()
    }

    pub fn g0_restricted(&self) -> &FiniteGroup<P> {
        &self.g0_restricted
    }

    pub fn h0_restricted(&self) -> &FiniteGroup<P> {
        &self.h0_restricted
    }

    /// Rebuild with the two parent groups swapped, around the same base:
    /// the subgroup becomes `H_0`.
    pub fn swap_roles(&self) -> Result<SubDualSystem<P>> {
        build_sub_dual(
            self.parent_h.clone(),
            self.parent_g.clone(),
            self.h0.clone(),
            &self.base,
        )
    }
}

/// Build and verify a sub dual system. `parent_g` and `parent_h` must be
/// dual on a shared carrier, `g0` a subgroup of `parent_g`, `s0` a carrier
/// element. Clause failures beyond the preconditions indicate library bugs
/// and surface as internal errors.
pub fn build_sub_dual<P: Point>(
    parent_g: FiniteGroup<P>,
    parent_h: FiniteGroup<P>,
    g0: FiniteGroup<P>,
    s0: &P,
) -> Result<SubDualSystem<P>> {
    if parent_g.carrier() != parent_h.carrier() {
        return Err(Error::CarrierMismatch);
    }
    if let Some(w) = simple_transitivity_witness(&parent_g) {
        return Err(Error::NotDual(format!("first parent group: {w}")));
    }
    if let Some(w) = simple_transitivity_witness(&parent_h) {
        return Err(Error::NotDual(format!("second parent group: {w}")));
    }
    if !commute_elementwise(&parent_g, &parent_h)? {
        return Err(Error::NotDual(
            "the parent groups do not commute elementwise".into(),
        ));
    }
    if dual_group(&parent_g)? != parent_h {
        return Err(Error::NotDual(
            "second parent is not the centralizer of the first".into(),
        ));
    }
    if !g0.is_subgroup_of(&parent_g) {
        return Err(Error::NotASubgroup(
            "the designated subgroup does not sit inside the first parent".into(),
        ));
    }
    let s0_idx = parent_g.carrier().position_or_err(s0)?;

    // Clause (i): G_0 acts simply transitively on S_0 = G_0 s_0.
    let orbit: BTreeSet<usize> = g0.orbit_indices(s0_idx).into_iter().collect();
    let g0_restricted = g0
        .restrict_to(&orbit)
        .map_err(|e| Error::Internal(format!("clause (i)/(iv): {e}")))?;
    if let Some(w) = simple_transitivity_witness(&g0_restricted) {
        return Err(Error::Internal(format!("clause (i): {w}")));
    }

    // Clause (ii): any g in G with g s_0 in S_0 already lies in G_0 and
    // preserves S_0.
    for g in parent_g.elements() {
        if orbit.contains(&g.apply(s0_idx)) {
            if !g0.contains(g) {
                return Err(Error::Internal(format!(
                    "clause (ii): {} moves the base into the orbit but is not in G_0",
                    g.display_label()
                )));
            }
            if !orbit.iter().all(|&i| orbit.contains(&g.apply(i))) {
                return Err(Error::Internal(format!(
                    "clause (ii): {} does not preserve the orbit",
                    g.display_label()
                )));
            }
        }
    }

    // Clause (iii): H_0 = {h in H : h s_0 in S_0} acts simply transitively
    // on S_0.
    let h0_elements: Vec<Perm> = parent_h
        .elements()
        .iter()
        .filter(|h| orbit.contains(&h.apply(s0_idx)))
        .cloned()
        .collect();
    let h0 = FiniteGroup::new(Arc::clone(parent_h.carrier()), h0_elements)
        .map_err(|e| Error::Internal(format!("clause (iii): H_0 is not a group: {e}")))?;
    let h0_restricted = h0
        .restrict_to(&orbit)
        .map_err(|e| Error::Internal(format!("clause (iii)/(iv): {e}")))?;
    if let Some(w) = simple_transitivity_witness(&h0_restricted) {
        return Err(Error::Internal(format!("clause (iii): {w}")));
    }

    // Clause (iv) (restriction embeds injectively) is enforced by
    // `restrict_to` above for both groups.

    // Clause (v): anything in Sym(S_0) commuting with one restricted group
    // extends uniquely into the opposite parent. The commutant is computed
    // constructively as the dual group on S_0.
    verify_unique_extension(&h0_restricted, &parent_g, &g0, &orbit, "(v)")?;
    verify_unique_extension(&g0_restricted, &parent_h, &h0, &orbit, "(v')")?;

    // Clause (vi): the restrictions are dual in Sym(S_0).
    if dual_group(&g0_restricted)? != h0_restricted {
        return Err(Error::Internal(
            "clause (vi): restricted groups are not dual".into(),
        ));
    }
    if !commute_elementwise(&g0_restricted, &h0_restricted)? {
        return Err(Error::Internal(
            "clause (vi): restricted groups do not commute".into(),
        ));
    }

    Ok(SubDualSystem {
        parent_g,
        parent_h,
        g0,
        base: s0.clone(),
        orbit,
        h0,
        g0_restricted,
        h0_restricted,
    })
}

/// Every element of the commutant of `restricted` extends to exactly one
/// element of `parent`, which lies in `designated`.
fn verify_unique_extension<P: Point>(
    restricted: &FiniteGroup<P>,
    parent: &FiniteGroup<P>,
    designated: &FiniteGroup<P>,
    orbit: &BTreeSet<usize>,
    clause: &str,
) -> Result<()> {
    let commutant = dual_group(restricted)?;
    let indices: Vec<usize> = orbit.iter().copied().collect();
    for p in commutant.elements() {
        let mut extensions = Vec::new();
        for g in parent.elements() {
            let agrees = indices.iter().enumerate().all(|(sub_from, &full_from)| {
                let full_to = g.apply(full_from);
                restricted
                    .carrier()
                    .position(parent.carrier().get(full_to))
                    .map(|sub_to| sub_to == p.apply(sub_from))
                    .unwrap_or(false)
            });
            if agrees {
                extensions.push(g);
            }
        }
        if extensions.len() != 1 {
            return Err(Error::Internal(format!(
                "clause {clause}: {} extensions found for a commutant element",
                extensions.len()
            )));
        }
        if !designated.contains(extensions[0]) {
            return Err(Error::Internal(format!(
                "clause {clause}: the unique extension is not in the designated subgroup"
            )));
        }
    }
    Ok(())
}

/// Move a sub dual system to the conjugate orbit of `k s_0` for `k` in the
/// second parent: the orbit becomes `k S_0` and the opposite subgroup
/// becomes `k H_0 k^-1`.
pub fn conjugate_orbit<P: Point>(system: &SubDualSystem<P>, k: &Perm) -> Result<SubDualSystem<P>> {
    if !system.parent_h.contains(k) {
        return Err(Error::InvalidArgument(
            "the conjugating element is not in the second parent group".into(),
        ));
    }
    let base_idx = system.parent_g.carrier().position_or_err(&system.base)?;
    let new_base = system.parent_g.carrier().get(k.apply(base_idx)).clone();
    let moved = build_sub_dual(
        system.parent_g.clone(),
        system.parent_h.clone(),
        system.g0.clone(),
        &new_base,
    )?;
    // The theorem predicts the new orbit and the conjugated dual exactly.
    let expected_orbit: BTreeSet<usize> = system.orbit.iter().map(|&i| k.apply(i)).collect();
    if moved.orbit != expected_orbit {
        return Err(Error::Internal("conjugate orbit differs from k S_0".into()));
    }
    let expected_h0: BTreeSet<Vec<usize>> = system
        .h0
        .elements()
        .iter()
        .map(|h| crate::groupcore::conjugate_perm(k, h).images().to_vec())
        .collect();
    let actual_h0: BTreeSet<Vec<usize>> = moved
        .h0
        .elements()
        .iter()
        .map(|h| h.images().to_vec())
        .collect();
    if expected_h0 != actual_h0 {
        return Err(Error::Internal(
            "conjugate dual differs from k H_0 k^-1".into(),
        ));
    }
    Ok(moved)
}

/// One of the three octatonic collections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OctatonicId {
    O01,
    O12,
    O23,
}

impl OctatonicId {
    pub fn parse(text: &str) -> Result<OctatonicId> {
        match text {
            "01" => Ok(OctatonicId::O01),
            "12" => Ok(OctatonicId::O12),
            "23" => Ok(OctatonicId::O23),
            other => Err(Error::InvalidArgument(format!(
                "unknown octatonic id `{other}` (expected 01, 12 or 23)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OctatonicId::O01 => "01",
            OctatonicId::O12 => "12",
            OctatonicId::O23 => "23",
        }
    }

    fn shift(&self) -> i64 {
        match self {
            OctatonicId::O01 => 0,
            OctatonicId::O12 => 1,
            OctatonicId::O23 => 2,
        }
    }
}

/// The eight pitch classes of the chosen octatonic collection.
pub fn octatonic_set(id: OctatonicId) -> BTreeSet<PitchClass> {
    let m = Modulus::TWELVE;
    [0i64, 1, 3, 4, 6, 7, 9, 10]
        .iter()
        .map(|&v| m.reduce(v + id.shift()))
        .collect()
}

/// The octatonic seed triads: major, jet, and stride types shifted into the
/// collection.
pub fn octatonic_seeds(id: OctatonicId) -> Vec<PcSegment> {
    let m = Modulus::TWELVE;
    let s = id.shift();
    [[0, 4, 7], [0, 4, 1], [0, 4, 10]]
        .iter()
        .map(|t| PcSegment::new(m, &[t[0] + s, t[1] + s, t[2] + s]).expect("nonempty"))
        .collect()
}

/// One row of the octatonic table: the sub dual system of one seed under
/// the collection's set-wise stabilizer.
#[derive(Debug, Clone)]
pub struct OctatonicSystem {
    pub seed: PcSegment,
    pub octatonic: BTreeSet<PitchClass>,
    /// The set-wise stabilizer `G_0` of the collection, as affine maps.
    pub stabilizer: Vec<AffineMap>,
    pub orbit: TiOrbit,
    pub system: SubDualSystem<PcSegment>,
    /// `S_0` members that are T-forms, by ascending transposition index.
    pub t_row: Vec<PcSegment>,
    /// `S_0` members that are I-forms, by ascending inversion index.
    pub i_row: Vec<PcSegment>,
}

/// Build the three cover systems (major-, jet-, and stride-type) of an
/// octatonic collection.
pub fn build_octatonic_table(id: OctatonicId) -> Result<Vec<OctatonicSystem>> {
    let m = Modulus::TWELVE;
    let octatonic = octatonic_set(id);
    let stabilizer = setwise_stabilizer(&ti_group(m), &octatonic);
    let mut out = Vec::new();
    for seed in octatonic_seeds(id) {
        let orbit = ti_orbit(&seed)?;
        let ti = orbit.ti_perm_group();
        let ctx = contextual_group(&orbit);
        let g0_elements: Vec<Perm> = stabilizer
            .iter()
            .map(|f| {
                orbit
                    .perm_of(&f.label(), |y| f.apply(y))
                    .expect("the stabilizer preserves the orbit")
            })
            .collect();
        let g0 = FiniteGroup::new(Arc::clone(orbit.carrier()), g0_elements)?;
        let system = build_sub_dual(ti, ctx, g0, &seed)?;

        let mut t_row: Vec<(u32, PcSegment)> = Vec::new();
        let mut i_row: Vec<(u32, PcSegment)> = Vec::new();
        for y in system.sub_carrier() {
            match orbit.form_of(&y)? {
                crate::contextual::SegForm::T(i) => t_row.push((i, y)),
                crate::contextual::SegForm::I(j) => i_row.push((j, y)),
            }
        }
        t_row.sort_by_key(|(i, _)| *i);
        i_row.sort_by_key(|(j, _)| *j);
        out.push(OctatonicSystem {
            seed,
            octatonic: octatonic.clone(),
            stabilizer: stabilizer.clone(),
            orbit,
            system,
            t_row: t_row.into_iter().map(|(_, y)| y).collect(),
            i_row: i_row.into_iter().map(|(_, y)| y).collect(),
        });
    }
    Ok(out)
}

/// The two-octagon/two-square diagram of the three octatonic cover systems
/// joined by the multiplication morphisms: P/R cycles on the major and jet
/// covers, the P/R squares plus `Q_3`/`Q_9` connectors on the stride cover,
/// `M7` edges from majors to jets, and `M10` edges onto the strides.
pub fn build_m7_m10_network() -> crate::netio::NetworkDoc {
    use crate::netio::{EdgeDecl, NetworkDoc, NodeDecl, SystemDecl, SystemKind};
    use indexmap::IndexMap;

    fn node_id(prefix: &str, seg: &[i64; 3]) -> String {
        format!("{prefix}_{}_{}_{}", seg[0], seg[1], seg[2])
    }
    fn seg_text(seg: &[i64; 3]) -> String {
        format!("{},{},{}", seg[0], seg[1], seg[2])
    }

    let mut systems = IndexMap::new();
    systems.insert(
        "major".to_string(),
        SystemDecl {
            kind: SystemKind::SubDual,
            seed: "0,4,7".into(),
            subgroup_gens: Some(vec!["P".into(), "R".into()]),
            base: Some("0,4,7".into()),
            orderings: None,
        },
    );
    systems.insert(
        "jet".to_string(),
        SystemDecl {
            kind: SystemKind::SubDual,
            seed: "0,4,1".into(),
            subgroup_gens: Some(vec!["P".into(), "R".into()]),
            base: Some("0,4,1".into()),
            orderings: None,
        },
    );
    systems.insert(
        "stride".to_string(),
        SystemDecl {
            kind: SystemKind::SubDual,
            seed: "0,4,10".into(),
            subgroup_gens: Some(vec!["T3".into(), "I1".into()]),
            base: Some("0,4,10".into()),
            orderings: None,
        },
    );

    let major_cycle: [[i64; 3]; 8] = [
        [0, 4, 7],
        [4, 0, 9],
        [9, 1, 4],
        [1, 9, 6],
        [6, 10, 1],
        [10, 6, 3],
        [3, 7, 10],
        [7, 3, 0],
    ];
    let jet_cycle: [[i64; 3]; 8] = [
        [0, 4, 1],
        [4, 0, 3],
        [3, 7, 4],
        [7, 3, 6],
        [6, 10, 7],
        [10, 6, 9],
        [9, 1, 10],
        [1, 9, 0],
    ];
    let stride_square: [[i64; 3]; 4] = [[0, 4, 10], [4, 0, 6], [6, 10, 4], [10, 6, 0]];
    let strain_square: [[i64; 3]; 4] = [[3, 7, 1], [7, 3, 9], [9, 1, 7], [1, 9, 3]];

    let mut nodes = IndexMap::new();
    for s in &major_cycle {
        nodes.insert(
            node_id("maj", s),
            NodeDecl {
                system: "major".into(),
                segment: seg_text(s),
            },
        );
    }
    for s in &jet_cycle {
        nodes.insert(
            node_id("jet", s),
            NodeDecl {
                system: "jet".into(),
                segment: seg_text(s),
            },
        );
    }
    for s in stride_square.iter().chain(&strain_square) {
        nodes.insert(
            node_id("str", s),
            NodeDecl {
                system: "stride".into(),
                segment: seg_text(s),
            },
        );
    }

    let mut edges = Vec::new();
    let mut edge = |from: String, to: String, op: &str| {
        edges.push(EdgeDecl {
            from,
            to,
            op: op.into(),
            note: None,
        });
    };
    for (cycle, prefix) in [(&major_cycle, "maj"), (&jet_cycle, "jet")] {
        for (k, s) in cycle.iter().enumerate() {
            let next = &cycle[(k + 1) % cycle.len()];
            let op = if k % 2 == 0 { "R" } else { "P" };
            edge(node_id(prefix, s), node_id(prefix, next), op);
        }
    }
    for square in [&stride_square, &strain_square] {
        for (k, s) in square.iter().enumerate() {
            let next = &square[(k + 1) % square.len()];
            let op = if k % 2 == 0 { "R" } else { "P" };
            edge(node_id("str", s), node_id("str", next), op);
        }
    }
    // Q connectors between the two squares.
    for (from, to, op) in [
        ([0, 4, 10], [3, 7, 1], "Q3"),
        ([4, 0, 6], [7, 3, 9], "Q9"),
        ([6, 10, 4], [9, 1, 7], "Q3"),
        ([10, 6, 0], [1, 9, 3], "Q9"),
    ] {
        edge(node_id("str", &from), node_id("str", &to), op);
    }
    // M7: major -> jet, componentwise.
    for (from, to) in [
        ([0, 4, 7], [0, 4, 1]),
        ([4, 0, 9], [4, 0, 3]),
        ([9, 1, 4], [3, 7, 4]),
        ([1, 9, 6], [7, 3, 6]),
        ([6, 10, 1], [6, 10, 7]),
        ([10, 6, 3], [10, 6, 9]),
        ([3, 7, 10], [9, 1, 10]),
        ([7, 3, 0], [1, 9, 0]),
    ] {
        edge(node_id("maj", &from), node_id("jet", &to), "M7");
    }
    // M10: major -> stride.
    for (from, to) in [
        ([0, 4, 7], [0, 4, 10]),
        ([10, 6, 3], [4, 0, 6]),
        ([3, 7, 10], [6, 10, 4]),
        ([7, 3, 0], [10, 6, 0]),
    ] {
        edge(node_id("maj", &from), node_id("str", &to), "M10");
    }

    NetworkDoc {
        modulus: 12,
        systems,
        nodes,
        edges,
        squares: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupcore::close_generators;

    const M12: Modulus = Modulus::TWELVE;

    fn seg(entries: &[i64]) -> PcSegment {
        PcSegment::new(M12, entries).unwrap()
    }

    fn segs(rows: &[[i64; 3]]) -> Vec<PcSegment> {
        rows.iter().map(|r| seg(r)).collect()
    }

    #[test]
    fn major_minor_octatonic_system() {
        let table = build_octatonic_table(OctatonicId::O01).unwrap();
        let major = &table[0];
        assert_eq!(major.seed, seg(&[0, 4, 7]));
        let labels: Vec<String> = major.stabilizer.iter().map(|f| f.label()).collect();
        assert_eq!(labels, ["T0", "T3", "T6", "T9", "I1", "I4", "I7", "I10"]);
        assert_eq!(
            major.t_row,
            segs(&[[0, 4, 7], [3, 7, 10], [6, 10, 1], [9, 1, 4]])
        );
        assert_eq!(
            major.i_row,
            segs(&[[1, 9, 6], [4, 0, 9], [7, 3, 0], [10, 6, 3]])
        );

        // H_0 = {Q_0, Q_3, Q_6, Q_9, P, Q_3 P, Q_6 P, Q_9 P} pointwise.
        let orbit = &major.orbit;
        let p = orbit.j_perm(1, 3).unwrap();
        let mut expected: Vec<Perm> = Vec::new();
        for i in [0i64, 3, 6, 9] {
            expected.push(orbit.q_perm(i));
            expected.push(orbit.q_perm(i).compose(&p));
        }
        let expected: BTreeSet<Vec<usize>> =
            expected.into_iter().map(|e| e.images().to_vec()).collect();
        let actual: BTreeSet<Vec<usize>> = major
            .system
            .h0()
            .elements()
            .iter()
            .map(|e| e.images().to_vec())
            .collect();
        assert_eq!(actual, expected);
    }

    #[test]
    fn jet_and_stride_rows_match_the_table() {
        let table = build_octatonic_table(OctatonicId::O01).unwrap();
        let jet = &table[1];
        assert_eq!(
            jet.t_row,
            segs(&[[0, 4, 1], [3, 7, 4], [6, 10, 7], [9, 1, 10]])
        );
        assert_eq!(
            jet.i_row,
            segs(&[[1, 9, 0], [4, 0, 3], [7, 3, 6], [10, 6, 9]])
        );
        let stride = &table[2];
        assert_eq!(
            stride.t_row,
            segs(&[[0, 4, 10], [3, 7, 1], [6, 10, 4], [9, 1, 7]])
        );
        assert_eq!(
            stride.i_row,
            segs(&[[1, 9, 3], [4, 0, 6], [7, 3, 9], [10, 6, 0]])
        );
    }

    #[test]
    fn o12_table_matches_the_transposed_figure() {
        let table = build_octatonic_table(OctatonicId::O12).unwrap();
        let labels: Vec<String> = table[0].stabilizer.iter().map(|f| f.label()).collect();
        assert_eq!(labels, ["T0", "T3", "T6", "T9", "I0", "I3", "I6", "I9"]);
        assert_eq!(
            table[0].t_row,
            segs(&[[1, 5, 8], [4, 8, 11], [7, 11, 2], [10, 2, 5]])
        );
        assert_eq!(
            table[0].i_row,
            segs(&[[11, 7, 4], [2, 10, 7], [5, 1, 10], [8, 4, 1]])
        );
        assert_eq!(
            table[1].t_row,
            segs(&[[1, 5, 2], [4, 8, 5], [7, 11, 8], [10, 2, 11]])
        );
        assert_eq!(
            table[1].i_row,
            segs(&[[11, 7, 10], [2, 10, 1], [5, 1, 4], [8, 4, 7]])
        );
        assert_eq!(
            table[2].t_row,
            segs(&[[1, 5, 11], [4, 8, 2], [7, 11, 5], [10, 2, 8]])
        );
        assert_eq!(
            table[2].i_row,
            segs(&[[11, 7, 1], [2, 10, 4], [5, 1, 7], [8, 4, 10]])
        );
    }

    #[test]
    fn whole_parent_is_a_trivial_sub_dual() {
        let orbit = ti_orbit(&seg(&[0, 4, 7])).unwrap();
        let ti = orbit.ti_perm_group();
        let ctx = contextual_group(&orbit);
        let system = build_sub_dual(ti.clone(), ctx.clone(), ti.clone(), &seg(&[0, 4, 7])).unwrap();
        assert_eq!(system.sub_carrier().len(), 24);
        assert_eq!(system.h0(), &ctx);
        assert_eq!(system.g0_restricted(), &ti);
    }

    #[test]
    fn pr_group_sub_dual_of_the_full_plr_action() {
        // Swapped roles: the contextual group is the acting parent and
        // <P, R> is the subgroup; the opposite side is the octatonic
        // stabilizer inside T/I.
        let orbit = ti_orbit(&seg(&[0, 4, 7])).unwrap();
        let ti = orbit.ti_perm_group();
        let ctx = contextual_group(&orbit);
        let pr = close_generators(
            Arc::clone(orbit.carrier()),
            &[orbit.j_perm(1, 3).unwrap(), orbit.j_perm(1, 2).unwrap()],
        )
        .unwrap();
        assert_eq!(pr.order(), 8);
        let system = build_sub_dual(ctx, ti, pr, &seg(&[0, 4, 7])).unwrap();
        assert_eq!(system.sub_carrier().len(), 8);
        // The opposite group is the octatonic set-wise stabilizer.
        let expected: BTreeSet<Vec<usize>> = ["T0", "T3", "T6", "T9", "I1", "I4", "I7", "I10"]
            .iter()
            .map(|s| {
                let f = AffineMap::parse(s, M12).unwrap();
                orbit.perm_of(s, |y| f.apply(y)).unwrap().images().to_vec()
            })
            .collect();
        let actual: BTreeSet<Vec<usize>> = system
            .h0()
            .elements()
            .iter()
            .map(|e| e.images().to_vec())
            .collect();
        assert_eq!(actual, expected);
        // And the 8 chords are an octatonic cover.
        let mut union: BTreeSet<PitchClass> = BTreeSet::new();
        for y in system.sub_carrier() {
            union.extend(y.entries().iter().copied());
        }
        assert_eq!(union, octatonic_set(OctatonicId::O01));
    }

    #[test]
    fn conjugate_orbit_by_t1_reaches_the_o12_system() {
        // Orient the major/minor system with the contextual group acting, so
        // that T_1 lives in the opposite parent.
        let table = build_octatonic_table(OctatonicId::O01).unwrap();
        let swapped = table[0].system.swap_roles().unwrap();
        let t1 = table[0]
            .orbit
            .perm_of("T1", |y| AffineMap::transposition(M12, 1).apply(y))
            .unwrap();
        let moved = conjugate_orbit(&swapped, &t1).unwrap();
        assert_eq!(moved.base(), &seg(&[1, 5, 8]));
        let new_carrier: BTreeSet<PcSegment> = moved.sub_carrier().into_iter().collect();
        let expected: BTreeSet<PcSegment> = segs(&[
            [1, 5, 8],
            [4, 8, 11],
            [7, 11, 2],
            [10, 2, 5],
            [8, 4, 1],
            [11, 7, 4],
            [2, 10, 7],
            [5, 1, 10],
        ])
        .into_iter()
        .collect();
        assert_eq!(new_carrier, expected);
        // The new opposite group is T_1 G_0 T_1^-1.
        let expected_labels: BTreeSet<Vec<usize>> =
            ["T0", "T3", "T6", "T9", "I0", "I3", "I6", "I9"]
                .iter()
                .map(|s| {
                    let f = AffineMap::parse(s, M12).unwrap();
                    table[0]
                        .orbit
                        .perm_of(s, |y| f.apply(y))
                        .unwrap()
                        .images()
                        .to_vec()
                })
                .collect();
        let actual: BTreeSet<Vec<usize>> = moved
            .h0()
            .elements()
            .iter()
            .map(|e| e.images().to_vec())
            .collect();
        assert_eq!(actual, expected_labels);

        // Identity conjugation is a no-op.
        let id = Perm::identity(24);
        let same = conjugate_orbit(&swapped, &id).unwrap();
        assert_eq!(same.base(), swapped.base());

        // k outside the parent is rejected.
        let p = table[0].orbit.j_perm(1, 3).unwrap();
        assert!(conjugate_orbit(&swapped, &p).is_err());
    }

    #[test]
    fn conjugate_orbit_by_t2_reaches_the_o23_system() {
        let table = build_octatonic_table(OctatonicId::O01).unwrap();
        let swapped = table[0].system.swap_roles().unwrap();
        let t2 = table[0]
            .orbit
            .perm_of("T2", |y| AffineMap::transposition(M12, 2).apply(y))
            .unwrap();
        let moved = conjugate_orbit(&swapped, &t2).unwrap();
        assert_eq!(moved.base(), &seg(&[2, 6, 9]));
        let o23 = build_octatonic_table(OctatonicId::O23).unwrap();
        let expected: BTreeSet<PcSegment> = o23[0].system.sub_carrier().into_iter().collect();
        let actual: BTreeSet<PcSegment> = moved.sub_carrier().into_iter().collect();
        assert_eq!(actual, expected);
    }

    #[test]
    fn p_and_r_analogue_tables() {
        // Componentwise formulas from the octatonic figures, exhaustive over
        // each 8-element family.
        let table = build_octatonic_table(OctatonicId::O01).unwrap();
        let cases: [(usize, i64, i64, i64, i64); 3] = [
            // (table row, P t-delta, P i-delta, R t-delta, R i-delta)
            (0, -1, 1, 2, -2),
            (1, 5, -5, 2, -2),
            (2, 2, -2, -4, 4),
        ];
        for (row, p_t, p_i, r_t, r_i) in cases {
            let sys = &table[row];
            let m = M12;
            for y in &sys.t_row {
                let (a, b, c) = (y.entry(0), y.entry(1), y.entry(2));
                let p = sys.orbit.op_p(y).unwrap();
                assert_eq!(
                    p,
                    PcSegment::new(
                        m,
                        &[
                            i64::from(c.value()),
                            i64::from(b.value()) + p_t,
                            i64::from(a.value())
                        ]
                    )
                    .unwrap(),
                    "P on t-form {y} of row {row}"
                );
                let r = sys.orbit.op_r(y).unwrap();
                assert_eq!(
                    r,
                    PcSegment::new(
                        m,
                        &[
                            i64::from(b.value()),
                            i64::from(a.value()),
                            i64::from(c.value()) + r_t
                        ]
                    )
                    .unwrap(),
                    "R on t-form {y} of row {row}"
                );
            }
            for y in &sys.i_row {
                let (a, b, c) = (y.entry(0), y.entry(1), y.entry(2));
                let p = sys.orbit.op_p(y).unwrap();
                assert_eq!(
                    p,
                    PcSegment::new(
                        m,
                        &[
                            i64::from(c.value()),
                            i64::from(b.value()) + p_i,
                            i64::from(a.value())
                        ]
                    )
                    .unwrap(),
                    "P on i-form {y} of row {row}"
                );
                let r = sys.orbit.op_r(y).unwrap();
                assert_eq!(
                    r,
                    PcSegment::new(
                        m,
                        &[
                            i64::from(b.value()),
                            i64::from(a.value()),
                            i64::from(c.value()) + r_i
                        ]
                    )
                    .unwrap(),
                    "R on i-form {y} of row {row}"
                );
            }
        }
    }

    #[test]
    fn pr_closures_inside_the_dual_groups() {
        let table = build_octatonic_table(OctatonicId::O01).unwrap();
        let orders = [8usize, 8, 4];
        for (sys, expected_order) in table.iter().zip(orders) {
            let pr = close_generators(
                Arc::clone(sys.orbit.carrier()),
                &[
                    sys.orbit.j_perm(1, 3).unwrap(),
                    sys.orbit.j_perm(1, 2).unwrap(),
                ],
            )
            .unwrap();
            assert_eq!(pr.order(), expected_order, "seed {}", sys.seed);
            assert!(pr.is_subgroup_of(sys.system.h0()));
            if expected_order == 4 {
                // Klein group, properly contained in the order-8 dual.
                assert!(pr.elements().iter().all(|e| e.order() <= 2));
            } else {
                assert_eq!(
                    pr,
                    FiniteGroup::new(
                        Arc::clone(sys.orbit.carrier()),
                        sys.system.h0().elements().to_vec()
                    )
                    .unwrap(),
                    "PR-group equals the dual group for {}",
                    sys.seed
                );
            }
        }
    }

    #[test]
    fn m7_transfer_carries_the_major_cover_to_the_jet_cover() {
        // Componentwise multiplication by 7 moves the major/minor cover to
        // the jet/shark cover; it normalizes the stabilizer and commutes
        // with the contextual side, so the conjugated dual is the jet
        // cover's own dual group.
        let table = build_octatonic_table(OctatonicId::O01).unwrap();
        let major = &table[0];
        let jet = &table[1];
        let m7 = AffineMap::multiplication(M12, 7);

        let source = major.system.g0_restricted().clone();
        let moved: Vec<PcSegment> = source
            .carrier()
            .elements()
            .iter()
            .map(|y| m7.apply(y).unwrap())
            .collect();
        let target = Arc::new(crate::groupcore::Carrier::new(moved).unwrap());
        let f_map: Vec<usize> = source
            .carrier()
            .elements()
            .iter()
            .map(|y| target.position(&m7.apply(y).unwrap()).unwrap())
            .collect();
        let (conjugated, morphism) =
            crate::groupcore::conjugate_transfer(&source, Arc::clone(&target), &f_map).unwrap();
        assert!(morphism.classify().iso);
        // Same carrier as the jet system, and the same stabilizer action:
        // M7 normalizes {T0,T3,T6,T9,I1,I4,I7,I10}.
        assert_eq!(&conjugated, jet.system.g0_restricted());
        // Conjugated dual = dual of the conjugate = the jet dual group.
        assert_eq!(
            &dual_group(&conjugated).unwrap(),
            jet.system.h0_restricted()
        );
        // Pointwise: conjugating every element of the source dual by f gives
        // exactly the dual of the transferred action.
        let f_perm = crate::groupcore::Perm::from_images(f_map.clone(), None).unwrap();
        let conjugated_dual: std::collections::BTreeSet<Vec<usize>> = dual_group(&source)
            .unwrap()
            .elements()
            .iter()
            .map(|h| {
                crate::groupcore::conjugate_perm(&f_perm, h)
                    .images()
                    .to_vec()
            })
            .collect();
        let direct_dual: std::collections::BTreeSet<Vec<usize>> = dual_group(&conjugated)
            .unwrap()
            .elements()
            .iter()
            .map(|h| h.images().to_vec())
            .collect();
        assert_eq!(conjugated_dual, direct_dual);
    }

    #[test]
    fn aff77_maps_the_major_pr_system_onto_the_shark_jet_system() {
        let orbit = ti_orbit(&seg(&[0, 4, 7])).unwrap();
        let f = AffineMap::new(M12, 7, 7);
        let morphism =
            crate::contextual::morphism_from_affine(&orbit, &[(1, 3), (1, 2)], &f).unwrap();
        assert!(morphism.onto_image.classify().iso);
        // The image carrier is the jet/shark O_12 cover.
        let o12 = build_octatonic_table(OctatonicId::O12).unwrap();
        let expected: BTreeSet<PcSegment> = o12[1].system.sub_carrier().into_iter().collect();
        let actual: BTreeSet<PcSegment> = morphism
            .onto_image
            .target()
            .carrier()
            .elements()
            .iter()
            .cloned()
            .collect();
        assert_eq!(actual, expected);
    }
}
