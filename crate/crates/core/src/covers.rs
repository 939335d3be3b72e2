//! Simply transitive covers of a scale: a subgroup `G_0` of the `T/I`-group
//! preserving and acting transitively on a subset `O` of `Z_m` acts simply
//! transitively on the orbit of a 3-element chord `X` exactly when no
//! nontrivial element of `G_0` fixes `X` as a set. Both sides of that
//! equivalence are computed independently on every check.
//!
//! Unlike the ordered-segment machinery elsewhere, everything in this module
//! works with unordered pitch-class sets.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::groupcore::setwise_stabilizer;
use crate::pcmath::{ti_group, AffineMap, Modulus, PitchClass};
use crate::subdual::{octatonic_set, OctatonicId};

/// Outcome of a cover check. The verdict is triple-checked: trivial
/// stabilizer, orbit size matching the group order, and a direct uniqueness
/// test on every ordered pair of cover members must all agree.
#[derive(Debug, Clone)]
pub struct CoverReport {
    /// The generating chord, as an unordered set.
    pub subset: BTreeSet<PitchClass>,
    /// Elements of `G_0` fixing the chord as a set.
    pub stabilizer: Vec<AffineMap>,
    /// The orbit `G_0 X`, sorted.
    pub cover: Vec<BTreeSet<PitchClass>>,
    pub simply_transitive: bool,
}

fn apply_set(f: &AffineMap, set: &BTreeSet<PitchClass>) -> BTreeSet<PitchClass> {
    set.iter().map(|&x| f.apply_class(x)).collect()
}

fn check_is_affine_group(maps: &[AffineMap]) -> Result<()> {
    if maps.is_empty() {
        return Err(Error::NotAGroup("empty set of maps".into()));
    }
    let modulus = maps[0].modulus();
    let identity = AffineMap::identity(modulus);
    if !maps.contains(&identity) {
        return Err(Error::NotAGroup("identity is missing".into()));
    }
    for f in maps {
        f.modulus().check_match(modulus)?;
        if !f.is_invertible() {
            return Err(Error::NotAGroup(format!("{f} is not invertible")));
        }
        if !maps.contains(&f.inverse()?) {
            return Err(Error::NotAGroup(format!("inverse of {f} is missing")));
        }
        for g in maps {
            if !maps.contains(&f.compose(g)?) {
                return Err(Error::NotAGroup(format!("{f} * {g} is missing")));
            }
        }
    }
    Ok(())
}

/// Checked preconditions: `g0` is an affine group preserving `o` setwise and
/// transitive on it, and `x` is a 3-element subset of `o`.
pub fn cover_check(
    o: &BTreeSet<PitchClass>,
    g0: &[AffineMap],
    x: &BTreeSet<PitchClass>,
) -> Result<CoverReport> {
    check_is_affine_group(g0)?;
    if x.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "the chord must have 3 elements, got {}",
            x.len()
        )));
    }
    if !x.is_subset(o) {
        return Err(Error::InvalidArgument(
            "the chord is not contained in the scale".into(),
        ));
    }
    for g in g0 {
        if apply_set(g, o) != *o {
            return Err(Error::InvalidArgument(format!(
                "{g} does not preserve the scale setwise"
            )));
        }
    }
    // Transitivity on the scale.
    let base = *o
        .iter()
        .next()
        .ok_or_else(|| Error::InvalidArgument("the scale must be nonempty".into()))?;
    let point_orbit: BTreeSet<PitchClass> = g0.iter().map(|g| g.apply_class(base)).collect();
    if point_orbit != *o {
        return Err(Error::InvalidArgument(
            "the group is not transitive on the scale".into(),
        ));
    }

    // Side one: the set-wise stabilizer of the chord inside g0.
    let stabilizer = setwise_stabilizer(g0, x);
    let stabilizer_trivial = stabilizer.len() == 1;

    // Side two: the orbit, with a direct uniqueness check on every ordered
    // pair of cover members.
    let mut cover: BTreeSet<BTreeSet<PitchClass>> = BTreeSet::new();
    for g in g0 {
        cover.insert(apply_set(g, x));
    }
    let cover: Vec<BTreeSet<PitchClass>> = cover.into_iter().collect();
    let counting_st = cover.len() == g0.len();
    let mut direct_st = true;
    'outer: for a in &cover {
        for b in &cover {
            let witnesses = g0.iter().filter(|g| apply_set(g, a) == *b).count();
            if witnesses != 1 {
                direct_st = false;
                break 'outer;
            }
        }
    }

    if stabilizer_trivial != direct_st || counting_st != direct_st {
        return Err(Error::Internal(format!(
            "cover criteria disagree on {{{}}}: stabilizer {}, counting {}, direct {}",
            x.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(","),
            stabilizer_trivial,
            counting_st,
            direct_st
        )));
    }

    Ok(CoverReport {
        subset: x.clone(),
        stabilizer,
        cover,
        simply_transitive: direct_st,
    })
}

/// Check all `C(8,3) = 56` three-element chords of an octatonic collection
/// against its set-wise stabilizer.
pub fn enumerate_octatonic_covers(id: OctatonicId) -> Vec<CoverReport> {
    let o = octatonic_set(id);
    let g0 = setwise_stabilizer(&ti_group(Modulus::TWELVE), &o);
    let points: Vec<PitchClass> = o.iter().copied().collect();
    let mut reports = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            for k in (j + 1)..points.len() {
                let x: BTreeSet<PitchClass> = [points[i], points[j], points[k]].into();
                reports
                    .push(cover_check(&o, &g0, &x).expect("octatonic preconditions always hold"));
            }
        }
    }
    reports
}

/// All 3-element subsets of `Z_m` fixed setwise by a nontrivial translation,
/// found by brute force. For `m = 12` these are exactly the four augmented
/// sets `{k, k+4, k+8}`, each fixed precisely by `T_4` and `T_8`.
pub fn translation_fixed_triples(modulus: Modulus) -> Vec<BTreeSet<PitchClass>> {
    let m = modulus.get();
    let mut out = Vec::new();
    if m < 3 {
        return out;
    }
    for i in 0..m {
        for j in (i + 1)..m {
            for k in (j + 1)..m {
                let x: BTreeSet<PitchClass> = [i, j, k]
                    .iter()
                    .map(|&v| modulus.reduce(i64::from(v)))
                    .collect();
                let fixed = (1..m)
                    .any(|t| apply_set(&AffineMap::transposition(modulus, i64::from(t)), &x) == x);
                if fixed {
                    out.push(x);
                }
            }
        }
    }
    out
}

/// The nontrivial translations fixing a set, for the lemma's second claim.
pub fn fixing_translations(modulus: Modulus, x: &BTreeSet<PitchClass>) -> Vec<AffineMap> {
    (1..modulus.get())
        .map(|t| AffineMap::transposition(modulus, i64::from(t)))
        .filter(|f| apply_set(f, x) == *x)
        .collect()
}
