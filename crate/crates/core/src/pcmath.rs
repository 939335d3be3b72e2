//! Exact arithmetic over `Z_m`: pitch classes, pitch-class segments, affine
//! maps `x -> a*x + b`, and voice permutations.
//!
//! Every value carries its modulus and operations check it at the boundary;
//! mixing moduli is a hard error, never a coercion.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chromatic cardinality. Must be at least 2; bounded above so that all
/// intermediate products stay well inside `i64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Modulus(u32);

/// Largest supported modulus.
pub const MAX_MODULUS: u32 = 1 << 16;

impl Modulus {
    pub fn new(m: u32) -> Result<Modulus> {
        if m < 2 || m > MAX_MODULUS {
            return Err(Error::InvalidModulus(m));
        }
        Ok(Modulus(m))
    }

    /// The usual twelve-tone setting.
    pub const TWELVE: Modulus = Modulus(12);

    pub fn get(self) -> u32 {
        self.0
    }

    /// Reduce an integer into `[0, m)`.
    pub fn reduce(self, value: i64) -> PitchClass {
        let m = i64::from(self.0);
        PitchClass(value.rem_euclid(m) as u32)
    }

    pub(crate) fn check_match(self, other: Modulus) -> Result<()> {
        if self != other {
            return Err(Error::ModulusMismatch(self.0, other.0));
        }
        Ok(())
    }

    /// All residues `0..m`.
    pub fn residues(self) -> impl Iterator<Item = PitchClass> {
        (0..self.0).map(PitchClass)
    }

    /// The invertible residues (units) of `Z_m`.
    pub fn units(self) -> Vec<PitchClass> {
        (0..self.0)
            .filter(|&a| gcd(a, self.0) == 1)
            .map(PitchClass)
            .collect()
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A residue in `[0, m)`. Always stored reduced; the modulus lives on the
/// containing value.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct PitchClass(u32);

impl PitchClass {
    pub fn value(self) -> u32 {
        self.0
    }
}

impl fmt::Display for PitchClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An ordered tuple of pitch classes over a common modulus. Order is
/// significant and duplicate entries are permitted; orbit machinery rejects
/// degenerate inputs itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PcSegment {
    entries: Vec<PitchClass>,
    modulus: Modulus,
}

impl PcSegment {
    pub fn new(modulus: Modulus, entries: &[i64]) -> Result<PcSegment> {
        if entries.is_empty() {
            return Err(Error::EmptySegment);
        }
        Ok(PcSegment {
            entries: entries.iter().map(|&v| modulus.reduce(v)).collect(),
            modulus,
        })
    }

    /// Parse the textual form `0,4,7`.
    pub fn parse(text: &str, modulus: Modulus) -> Result<PcSegment> {
        let mut entries = Vec::new();
        for part in text.split(',') {
            let part = part.trim();
            let v: i64 = part
                .parse()
                .map_err(|_| Error::parse(text, format!("bad residue `{part}`")))?;
            entries.push(v);
        }
        PcSegment::new(modulus, &entries)
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[PitchClass] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> PitchClass {
        self.entries[i]
    }

    pub fn reversed(&self) -> PcSegment {
        let mut entries = self.entries.clone();
        entries.reverse();
        PcSegment {
            entries,
            modulus: self.modulus,
        }
    }

    /// The underlying unordered pitch-class set.
    pub fn to_set(&self) -> std::collections::BTreeSet<PitchClass> {
        self.entries.iter().copied().collect()
    }
}

impl fmt::Display for PcSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in &self.entries {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
            first = false;
        }
        Ok(())
    }
}

/// The affine map `x -> a*x + b` on `Z_m`. It is a bijection exactly when
/// `gcd(a, m) = 1`.
///
/// `T_i` is `(a=1, b=i)`, `I_j` is `(a=m-1, b=j)`, `M_a` is `(a, b=0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffineMap {
    a: PitchClass,
    b: PitchClass,
    modulus: Modulus,
}

impl AffineMap {
    pub fn new(modulus: Modulus, a: i64, b: i64) -> AffineMap {
        AffineMap {
            a: modulus.reduce(a),
            b: modulus.reduce(b),
            modulus,
        }
    }

    pub fn identity(modulus: Modulus) -> AffineMap {
        AffineMap::new(modulus, 1, 0)
    }

    /// Transposition `T_i: x -> x + i`.
    pub fn transposition(modulus: Modulus, i: i64) -> AffineMap {
        AffineMap::new(modulus, 1, i)
    }

    /// Inversion `I_j: x -> -x + j`.
    pub fn inversion(modulus: Modulus, j: i64) -> AffineMap {
        AffineMap::new(modulus, i64::from(modulus.get()) - 1, j)
    }

    /// Multiplication `M_a: x -> a*x`.
    pub fn multiplication(modulus: Modulus, a: i64) -> AffineMap {
        AffineMap::new(modulus, a, 0)
    }

    /// Parse `T<i>`, `I<j>`, `M<a>` or `aff(<a>,<b>)`.
    pub fn parse(text: &str, modulus: Modulus) -> Result<AffineMap> {
        let s = text.trim();
        let int = |t: &str| -> Result<i64> {
            t.trim()
                .parse()
                .map_err(|_| Error::parse(text, format!("bad integer `{t}`")))
        };
        if let Some(rest) = s.strip_prefix("aff(").and_then(|r| r.strip_suffix(')')) {
            let mut parts = rest.splitn(2, ',');
            let a = parts
                .next()
                .ok_or_else(|| Error::parse(text, "aff needs two arguments"))?;
            let b = parts
                .next()
                .ok_or_else(|| Error::parse(text, "aff needs two arguments"))?;
            return Ok(AffineMap::new(modulus, int(a)?, int(b)?));
        }
        match s.split_at(1) {
            ("T", rest) if !rest.is_empty() => Ok(AffineMap::transposition(modulus, int(rest)?)),
            ("I", rest) if !rest.is_empty() => Ok(AffineMap::inversion(modulus, int(rest)?)),
            ("M", rest) if !rest.is_empty() => Ok(AffineMap::multiplication(modulus, int(rest)?)),
            _ => Err(Error::parse(text, "expected T<i>, I<j>, M<a> or aff(a,b)")),
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn linear(&self) -> PitchClass {
        self.a
    }

    pub fn translation(&self) -> PitchClass {
        self.b
    }

    pub fn apply_class(&self, x: PitchClass) -> PitchClass {
        let m = self.modulus;
        m.reduce(i64::from(self.a.value()) * i64::from(x.value()) + i64::from(self.b.value()))
    }

    /// Componentwise application to a segment.
    pub fn apply(&self, s: &PcSegment) -> Result<PcSegment> {
        self.modulus.check_match(s.modulus())?;
        Ok(PcSegment {
            entries: s.entries.iter().map(|&x| self.apply_class(x)).collect(),
            modulus: s.modulus,
        })
    }

    /// `self` after `g`: `x -> a_self * (a_g x + b_g) + b_self`.
    pub fn compose(&self, g: &AffineMap) -> Result<AffineMap> {
        self.modulus.check_match(g.modulus)?;
        let a = i64::from(self.a.value()) * i64::from(g.a.value());
        let b = i64::from(self.a.value()) * i64::from(g.b.value()) + i64::from(self.b.value());
        Ok(AffineMap {
            a: self.modulus.reduce(a),
            b: self.modulus.reduce(b),
            modulus: self.modulus,
        })
    }

    pub fn is_invertible(&self) -> bool {
        gcd(self.a.value(), self.modulus.get()) == 1
    }

    /// Inverse map, when the linear part is a unit.
    pub fn inverse(&self) -> Result<AffineMap> {
        let m = self.modulus.get();
        let a_inv = (0..m)
            .find(|&c| (c as u64 * self.a.value() as u64) % m as u64 == 1)
            .ok_or_else(|| Error::InvalidArgument(format!("{self} is not invertible")))?;
        // x -> a_inv * (x - b)
        Ok(AffineMap::new(
            self.modulus,
            i64::from(a_inv),
            -(i64::from(a_inv) * i64::from(self.b.value())),
        ))
    }

    /// Preferred symbolic name: `T<i>`, `I<j>`, `M<a>`, or `aff(a,b)`.
    pub fn label(&self) -> String {
        let (a, b, m) = (self.a.value(), self.b.value(), self.modulus.get());
        if a == 1 {
            format!("T{b}")
        } else if a == m - 1 {
            format!("I{b}")
        } else if b == 0 {
            format!("M{a}")
        } else {
            format!("aff({a},{b})")
        }
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A permutation of the positions `{1, ..., n}` of a segment, acting by
/// `sigma(y_1,...,y_n) := (y_{sigma^-1(1)}, ..., y_{sigma^-1(n)})`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VoicePerm {
    /// `images[i]` is the 0-based image of 0-based position `i`.
    images: Vec<usize>,
}

impl VoicePerm {
    pub fn identity(n: usize) -> VoicePerm {
        VoicePerm {
            images: (0..n).collect(),
        }
    }

    /// Full reversal `(1 n)(2 n-1)...`; the retrograde on 3-tuples is `(13)`.
    pub fn retrograde(n: usize) -> VoicePerm {
        VoicePerm {
            images: (0..n).rev().collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<VoicePerm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::BadCycles(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(VoicePerm { images })
    }

    /// Parse cycle notation such as `(13)` or `(123)(45)` into a permutation
    /// on `{1,...,n}`. Positions are single decimal digits, 1-based; `(321)`
    /// is the 3-cycle `3 -> 2 -> 1 -> 3`, the inverse of `(123)`.
    pub fn parse(text: &str, n: usize) -> Result<VoicePerm> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::BadCycles("empty cycle expression".into()));
        }
        let mut images: Vec<usize> = (0..n).collect();
        let mut chars = s.chars().peekable();
        while let Some(c) = chars.next() {
            if c != '(' {
                return Err(Error::BadCycles(format!("expected `(` in `{text}`")));
            }
            let mut cycle: Vec<usize> = Vec::new();
            loop {
                match chars.next() {
                    Some(')') => break,
                    Some(d) if d.is_ascii_digit() => {
                        let pos = d.to_digit(10).unwrap() as usize;
                        if pos == 0 || pos > n {
                            return Err(Error::BadCycles(format!(
                                "position {pos} out of range 1..={n} in `{text}`"
                            )));
                        }
                        if cycle.contains(&(pos - 1)) {
                            return Err(Error::BadCycles(format!(
                                "repeated position {pos} in `{text}`"
                            )));
                        }
                        cycle.push(pos - 1);
                    }
                    _ => return Err(Error::BadCycles(format!("unterminated cycle in `{text}`"))),
                }
            }
            // Cycles listed left to right compose right to left, like functions.
            let mut step: Vec<usize> = (0..n).collect();
            for w in 0..cycle.len() {
                step[cycle[w]] = cycle[(w + 1) % cycle.len()];
            }
            images = images.iter().map(|&i| step[i]).collect();
        }
        Ok(VoicePerm { images })
    }

    pub fn arity(&self) -> usize {
        self.images.len()
    }

    /// Apply by the stated convention: entry at position `i` moves to
    /// position `sigma(i)`.
    pub fn apply(&self, s: &PcSegment) -> Result<PcSegment> {
        if self.images.len() != s.len() {
            return Err(Error::ArityMismatch {
                perm: self.images.len(),
                len: s.len(),
            });
        }
        let mut entries = vec![PitchClass::default(); s.len()];
        for (i, &img) in self.images.iter().enumerate() {
            entries[img] = s.entry(i);
        }
        Ok(PcSegment {
            entries,
            modulus: s.modulus(),
        })
    }

    /// `self` after `g` (right-to-left function composition).
    pub fn compose(&self, g: &VoicePerm) -> Result<VoicePerm> {
        if self.images.len() != g.images.len() {
            return Err(Error::ArityMismatch {
                perm: self.images.len(),
                len: g.images.len(),
            });
        }
        Ok(VoicePerm {
            images: (0..self.images.len())
                .map(|i| self.images[g.images[i]])
                .collect(),
        })
    }

    pub fn inverse(&self) -> VoicePerm {
        let mut images = vec![0; self.images.len()];
        for (i, &img) in self.images.iter().enumerate() {
            images[img] = i;
        }
        VoicePerm { images }
    }

    /// Cycle notation on 1-based positions; the identity prints as `()`.
    pub fn label(&self) -> String {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            out.push('(');
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                out.push_str(&(i + 1).to_string());
                i = self.images[i];
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl fmt::Display for VoicePerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Componentwise application of an affine map; spec-level free function.
pub fn affine_apply(f: &AffineMap, s: &PcSegment) -> Result<PcSegment> {
    f.apply(s)
}

/// `f` after `g`.
pub fn affine_compose(f: &AffineMap, g: &AffineMap) -> Result<AffineMap> {
    f.compose(g)
}

pub fn affine_is_invertible(f: &AffineMap) -> bool {
    f.is_invertible()
}

pub fn voice_perm_apply(sigma: &VoicePerm, s: &PcSegment) -> Result<PcSegment> {
    sigma.apply(s)
}

/// All `2m` transpositions and inversions of `Z_m`, transpositions first.
pub fn ti_group(modulus: Modulus) -> Vec<AffineMap> {
    let m = i64::from(modulus.get());
    (0..m)
        .map(|i| AffineMap::transposition(modulus, i))
        .chain((0..m).map(|j| AffineMap::inversion(modulus, j)))
        .collect()
}

/// All `phi(m) * m` invertible affine maps of `Z_m`, ordered by `(a, b)`.
pub fn affine_group(modulus: Modulus) -> Vec<AffineMap> {
    let m = i64::from(modulus.get());
    let mut out = Vec::new();
    for a in 0..m {
        let f = AffineMap::new(modulus, a, 0);
        if !f.is_invertible() {
            continue;
        }
        for b in 0..m {
            out.push(AffineMap::new(modulus, a, b));
        }
    }
    out
}

/// All `m^2` affine maps of `Z_m`, invertible or not, ordered by `(a, b)`.
pub fn all_affine_maps(modulus: Modulus) -> Vec<AffineMap> {
    let m = i64::from(modulus.get());
    let mut out = Vec::new();
    for a in 0..m {
        for b in 0..m {
            out.push(AffineMap::new(modulus, a, b));
        }
    }
    out
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn modulus_strategy() -> impl Strategy<Value = Modulus> {
        (2u32..=24).prop_map(|m| Modulus::new(m).unwrap())
    }

    proptest! {
        #[test]
        fn compose_then_apply_matches_apply_twice(
            m in modulus_strategy(),
            a1 in 0i64..24, b1 in 0i64..24,
            a2 in 0i64..24, b2 in 0i64..24,
            entries in proptest::collection::vec(0i64..24, 1..5),
        ) {
            let f = AffineMap::new(m, a1, b1);
            let g = AffineMap::new(m, a2, b2);
            let s = PcSegment::new(m, &entries).unwrap();
            let composed = f.compose(&g).unwrap().apply(&s).unwrap();
            let stepwise = f.apply(&g.apply(&s).unwrap()).unwrap();
            prop_assert_eq!(composed, stepwise);
        }

        #[test]
        fn affine_maps_commute_with_voice_perms(
            m in modulus_strategy(),
            a in 0i64..24, b in 0i64..24,
            entries in proptest::collection::vec(0i64..24, 3..5),
            swap in 0usize..3,
        ) {
            let f = AffineMap::new(m, a, b);
            let s = PcSegment::new(m, &entries).unwrap();
            let n = s.len();
            let sigma = match swap {
                0 => VoicePerm::retrograde(n),
                1 => VoicePerm::parse("(12)", n).unwrap(),
                _ => VoicePerm::parse("(123)", n).unwrap(),
            };
            let lhs = f.apply(&sigma.apply(&s).unwrap()).unwrap();
            let rhs = sigma.apply(&f.apply(&s).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn perm_composition_matches_stepwise_application(
            entries in proptest::collection::vec(0i64..12, 3..6),
            seed in any::<u64>(),
        ) {
            let m = Modulus::TWELVE;
            let s = PcSegment::new(m, &entries).unwrap();
            let n = s.len();
            // Two pseudorandom permutations from the seed.
            let mut images: Vec<usize> = (0..n).collect();
            let mut state = seed | 1;
            let mut shuffle = |v: &mut Vec<usize>| {
                for i in (1..v.len()).rev() {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    let j = (state as usize) % (i + 1);
                    v.swap(i, j);
                }
            };
            shuffle(&mut images);
            let sigma = VoicePerm::from_images(images.clone()).unwrap();
            shuffle(&mut images);
            let tau = VoicePerm::from_images(images).unwrap();
            let composed = sigma.compose(&tau).unwrap().apply(&s).unwrap();
            let stepwise = sigma.apply(&tau.apply(&s).unwrap()).unwrap();
            prop_assert_eq!(composed, stepwise);
        }
    }
}

#[cfg(test)]
mod modulus_bounds {
    use super::*;

    #[test]
    fn modulus_upper_bound() {
        assert!(Modulus::new(MAX_MODULUS).is_ok());
        assert!(Modulus::new(MAX_MODULUS + 1).is_err());
        // Products at the extreme stay exact.
        let m = Modulus::new(MAX_MODULUS).unwrap();
        let f = AffineMap::new(m, i64::from(MAX_MODULUS) - 1, i64::from(MAX_MODULUS) - 1);
        let x = m.reduce(i64::from(MAX_MODULUS) - 1);
        // (m-1)^2 + (m-1) mod m == 0 since m-1 = -1 mod m.
        assert_eq!(f.apply_class(x).value(), 0);
    }
}
