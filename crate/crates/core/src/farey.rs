//! Farey fractions, coprime sector pairs and paths in the Stern–Brocot tree.
//!
//! The tree used throughout the crate is rooted at `1/2`; its two top
//! neighbours `0/1` and `1/1` are not tree nodes. A node's interval is the pair
//! of Farey parents it is the mediant of.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A reduced non-negative fraction `p/q`, including the formal `1/0`.
///
/// Which fractions an operation accepts is checked by that operation; the
/// type itself only guarantees reducedness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(u64, u64)", into = "(u64, u64)")]
pub struct FareyFraction {
    p: u64,
    q: u64,
}

impl FareyFraction {
    pub const ZERO: FareyFraction = FareyFraction { p: 0, q: 1 };
    pub const ONE: FareyFraction = FareyFraction { p: 1, q: 1 };
    pub const HALF: FareyFraction = FareyFraction { p: 1, q: 2 };
    pub const INFINITY: FareyFraction = FareyFraction { p: 1, q: 0 };

    /// A reduced fraction; unreduced input is an error rather than silently
    /// normalized.
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p.gcd(&q) != 1 {
            return Err(Error::NotReduced { p, q });
        }
        Ok(FareyFraction { p, q })
    }

    /// Reduce `p/q` first. `(0, 0)` is rejected.
    pub fn reduced(p: u64, q: u64) -> Result<Self> {
        let g = p.gcd(&q);
        if g == 0 {
            return Err(Error::NotReduced { p, q });
        }
        Ok(FareyFraction { p: p / g, q: q / g })
    }

    pub fn p(self) -> u64 {
        self.p
    }

    pub fn q(self) -> u64 {
        self.q
    }

    pub fn is_infinity(self) -> bool {
        self.q == 0
    }

    pub fn in_unit_interval(self) -> bool {
        self.q > 0 && self.p <= self.q
    }

    /// Inside `[0, 1/2]`, the domain of Fock's function.
    pub fn in_lower_half(self) -> bool {
        self.q > 0 && 2 * self.p <= self.q
    }

    pub(crate) fn require_unit(self) -> Result<Self> {
        if self.in_unit_interval() {
            Ok(self)
        } else {
            Err(self.out_of("[0,1]"))
        }
    }

    pub(crate) fn require_lower_half(self) -> Result<Self> {
        if self.in_lower_half() {
            Ok(self)
        } else {
            Err(self.out_of("[0,1/2]"))
        }
    }

    pub(crate) fn out_of(self, domain: &'static str) -> Error {
        Error::OutOfDomain {
            p: self.p,
            q: self.q,
            domain,
        }
    }

    pub fn mediant(self, o: FareyFraction) -> FareyFraction {
        FareyFraction {
            p: self.p + o.p,
            q: self.q + o.q,
        }
    }

    /// `|p q' - q p'| = 1`.
    pub fn is_farey_neighbour(self, o: FareyFraction) -> bool {
        let a = self.p as u128 * o.q as u128;
        let b = self.q as u128 * o.p as u128;
        a.abs_diff(b) == 1
    }

    pub fn to_f64(self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl Ord for FareyFraction {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.p as u128 * o.q as u128).cmp(&(o.p as u128 * self.q as u128))
    }
}

impl PartialOrd for FareyFraction {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for FareyFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for FareyFraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected p/q, got {s:?}"));
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let p = p.trim().parse::<u64>().map_err(|_| bad())?;
        let q = q.trim().parse::<u64>().map_err(|_| bad())?;
        FareyFraction::new(p, q)
    }
}

impl TryFrom<(u64, u64)> for FareyFraction {
    type Error = Error;

    fn try_from((p, q): (u64, u64)) -> Result<Self> {
        FareyFraction::new(p, q)
    }
}

impl From<FareyFraction> for (u64, u64) {
    fn from(f: FareyFraction) -> Self {
        (f.p, f.q)
    }
}

/// A point `(q, p)` of the sector `q >= p >= 0` with `gcd(q, p) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(u64, u64)", into = "(u64, u64)")]
pub struct CoprimePair {
    q: u64,
    p: u64,
}

impl CoprimePair {
    pub fn new(q: u64, p: u64) -> Result<Self> {
        if p > q || q.gcd(&p) != 1 {
            return Err(Error::NotCoprimePair { q, p });
        }
        Ok(CoprimePair { q, p })
    }

    pub fn q(self) -> u64 {
        self.q
    }

    pub fn p(self) -> u64 {
        self.p
    }

    pub fn fraction(self) -> FareyFraction {
        FareyFraction {
            p: self.p,
            q: self.q,
        }
    }

    pub fn from_fraction(f: FareyFraction) -> Result<Self> {
        f.require_unit()?;
        Ok(CoprimePair { q: f.q, p: f.p })
    }

    /// All coprime pairs with `q <= max_q`, ordered by `q` then `p`.
    pub fn enumerate(max_q: u64) -> impl Iterator<Item = CoprimePair> {
        (1..=max_q).flat_map(|q| {
            (0..=q)
                .filter(move |&p| q.gcd(&p) == 1)
                .map(move |p| CoprimePair { q, p })
        })
    }
}

impl fmt::Display for CoprimePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.q, self.p)
    }
}

impl TryFrom<(u64, u64)> for CoprimePair {
    type Error = Error;

    fn try_from((q, p): (u64, u64)) -> Result<Self> {
        CoprimePair::new(q, p)
    }
}

impl From<CoprimePair> for (u64, u64) {
    fn from(c: CoprimePair) -> Self {
        (c.q, c.p)
    }
}

/// Three fractions `left < center < right` spanning a Farey triangle, with
/// `center` the mediant of the other two.
///
/// At the boundary fractions `0/1` and `1/1` a neighbour is the formal `1/0`,
/// read as `-1/0` on the left of `0/1`; the mediant property is then only
/// formal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FareyTriple {
    pub left: FareyFraction,
    pub center: FareyFraction,
    pub right: FareyFraction,
}

impl FareyTriple {
    /// True for the two boundary triples built around `0/1` and `1/1`.
    pub fn is_formal(&self) -> bool {
        self.left.is_infinity() || self.right.is_infinity()
    }

    /// Checks order, unimodularity of both edges and the mediant property.
    pub fn is_valid(&self) -> bool {
        let (l, c, r) = (self.left, self.center, self.right);
        !self.is_formal()
            && l < c
            && c < r
            && l.is_farey_neighbour(c)
            && c.is_farey_neighbour(r)
            && l.mediant(r) == c
    }
}

impl fmt::Display for FareyTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.left, self.center, self.right)
    }
}

/// Modular inverse of `a` mod `m` for coprime `a`, `m >= 2`.
fn mod_inverse(a: u64, m: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(m as i128));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m as i128) as u64
}

/// The Farey triangle centred at `f`.
///
/// For `q >= 2` the left parent `r/s` solves `p s - q r = 1` with `0 < s < q`,
/// found with the extended Euclidean algorithm. `0/1` and `1/1` get the
/// formal neighbour `1/0`.
pub fn farey_parents(f: FareyFraction) -> Result<FareyTriple> {
    f.require_unit()?;
    if f == FareyFraction::ZERO {
        return Ok(FareyTriple {
            left: FareyFraction::INFINITY,
            center: f,
            right: FareyFraction::ONE,
        });
    }
    if f == FareyFraction::ONE {
        return Ok(FareyTriple {
            left: FareyFraction::ZERO,
            center: f,
            right: FareyFraction::INFINITY,
        });
    }
    let s1 = mod_inverse(f.p, f.q);
    let r1 = ((f.p as u128 * s1 as u128 - 1) / f.q as u128) as u64;
    let left = FareyFraction { p: r1, q: s1 };
    let right = FareyFraction {
        p: f.p - r1,
        q: f.q - s1,
    };
    Ok(FareyTriple {
        left,
        center: f,
        right,
    })
}

/// `T(q, p) = (q - p, p)` on integer pairs.
pub fn t_map(x: CoprimePair) -> (u64, u64) {
    (x.q - x.p, x.p)
}

/// `T(p/q) = p/(q - p)`, mapping `[0,1]` onto `[0, 1/0]`.
pub fn t_map_fraction(f: FareyFraction) -> Result<FareyFraction> {
    f.require_unit()?;
    Ok(FareyFraction {
        p: f.p,
        q: f.q - f.p,
    })
}

/// `T^{-1}(p/q) = p/(p + q)`, mapping `[0, 1/0]` onto `[0, 1]` and `[0, 1]`
/// onto `[0, 1/2]`.
pub fn t_inverse(f: FareyFraction) -> FareyFraction {
    FareyFraction {
        p: f.p,
        q: f.p + f.q,
    }
}

/// Continued-fraction partial quotients of `p/q` (for `q >= 1`).
pub fn continued_fraction(f: FareyFraction) -> Vec<u64> {
    let (mut a, mut b) = (f.p, f.q);
    let mut out = Vec::new();
    while b != 0 {
        out.push(a / b);
        (a, b) = (b, a % b);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    /// Towards the left parent.
    L,
    /// Towards the right parent.
    R,
}

impl Step {
    pub fn flip(self) -> Step {
        match self {
            Step::L => Step::R,
            Step::R => Step::L,
        }
    }
}

/// A path from the root `1/2`, stored as runs of equal steps.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreePath {
    runs: Vec<(Step, u64)>,
}

impl TreePath {
    pub fn runs(&self) -> &[(Step, u64)] {
        &self.runs
    }

    pub fn len(&self) -> u64 {
        self.runs.iter().map(|&(_, k)| k).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn steps(&self) -> impl Iterator<Item = Step> + '_ {
        self.runs
            .iter()
            .flat_map(|&(s, k)| std::iter::repeat_n(s, k as usize))
    }

    fn push(&mut self, s: Step, k: u64) {
        if k == 0 {
            return;
        }
        match self.runs.last_mut() {
            Some((last, n)) if *last == s => *n += k,
            _ => self.runs.push((s, k)),
        }
    }
}

impl fmt::Display for TreePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.steps() {
            f.write_str(match s {
                Step::L => "L",
                Step::R => "R",
            })?;
        }
        Ok(())
    }
}

/// The path from `1/2` to `f`, read off the continued fraction
/// `[0; a1, ..., an]` as `L^(a1-1) R^a2 L^a3 ...` with the last run shortened
/// by one.
pub fn tree_path(f: FareyFraction) -> Result<TreePath> {
    f.require_unit()?;
    if f.q < 2 {
        return Err(Error::Endpoint("0/1 and 1/1 are not nodes of the tree"));
    }
    let cf = continued_fraction(f);
    let n = cf.len();
    let mut path = TreePath::default();
    for (i, &a) in cf.iter().enumerate().skip(1) {
        let step = if i % 2 == 1 { Step::L } else { Step::R };
        let mut k = a;
        if i == 1 {
            k -= 1;
        }
        if i == n - 1 {
            k -= 1;
        }
        path.push(step, k);
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fr(p: u64, q: u64) -> FareyFraction {
        FareyFraction::new(p, q).unwrap()
    }

    #[test]
    fn parents_examples() {
        let t = farey_parents(fr(1, 2)).unwrap();
        assert_eq!((t.left, t.right), (fr(0, 1), fr(1, 1)));
        let t = farey_parents(fr(2, 5)).unwrap();
        assert_eq!((t.left, t.right), (fr(1, 3), fr(1, 2)));
        let t = farey_parents(fr(3, 5)).unwrap();
        assert_eq!((t.left, t.right), (fr(1, 2), fr(2, 3)));
        assert!(t.is_valid());
    }

    #[test]
    fn boundary_parents_are_formal() {
        let t = farey_parents(FareyFraction::ZERO).unwrap();
        assert!(t.left.is_infinity() && t.right == FareyFraction::ONE && t.is_formal());
        let t = farey_parents(FareyFraction::ONE).unwrap();
        assert!(t.left == FareyFraction::ZERO && t.right.is_infinity());
        assert!(farey_parents(fr(3, 2)).is_err());
    }

    #[test]
    fn unreduced_input_is_rejected() {
        assert_eq!(
            FareyFraction::new(2, 4),
            Err(Error::NotReduced { p: 2, q: 4 })
        );
        assert!("2/4".parse::<FareyFraction>().is_err());
        assert_eq!("2/5".parse::<FareyFraction>().unwrap(), fr(2, 5));
    }

    #[test]
    fn t_examples() {
        assert_eq!(t_map_fraction(fr(1, 2)).unwrap(), fr(1, 1));
        assert_eq!(t_map_fraction(fr(0, 1)).unwrap(), fr(0, 1));
        assert_eq!(t_map_fraction(fr(2, 5)).unwrap(), fr(2, 3));
        assert_eq!(t_map_fraction(fr(1, 1)).unwrap(), FareyFraction::INFINITY);
        assert_eq!(t_inverse(fr(1, 1)), fr(1, 2));
        assert_eq!(t_inverse(fr(0, 1)), fr(0, 1));
        assert_eq!(t_inverse(fr(2, 3)), fr(2, 5));
        assert_eq!(t_map(CoprimePair::new(5, 2).unwrap()), (3, 2));
    }

    #[test]
    fn path_examples() {
        assert_eq!(tree_path(fr(1, 2)).unwrap().to_string(), "");
        assert_eq!(tree_path(fr(1, 3)).unwrap().to_string(), "L");
        assert_eq!(tree_path(fr(2, 3)).unwrap().to_string(), "R");
        assert_eq!(tree_path(fr(2, 5)).unwrap().to_string(), "LR");
        assert_eq!(tree_path(fr(3, 5)).unwrap().to_string(), "RL");
        assert!(tree_path(fr(0, 1)).is_err());
        assert!(tree_path(fr(1, 1)).is_err());
    }

    #[test]
    fn path_matches_descent() {
        for q in 2..60u64 {
            for p in 1..q {
                let Ok(f) = FareyFraction::new(p, q) else {
                    continue;
                };
                let (mut lo, mut hi) = (FareyFraction::ZERO, FareyFraction::ONE);
                let mut node = lo.mediant(hi);
                for s in tree_path(f).unwrap().steps() {
                    match s {
                        Step::L => hi = node,
                        Step::R => lo = node,
                    }
                    node = lo.mediant(hi);
                }
                assert_eq!(node, f);
            }
        }
    }

    #[test]
    fn ordering_includes_infinity() {
        assert!(fr(1, 3) < fr(2, 5));
        assert!(fr(7, 1) < FareyFraction::INFINITY);
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(CoprimePair::enumerate(5).count(), 11);
        assert!(CoprimePair::new(4, 2).is_err());
        assert!(CoprimePair::new(0, 0).is_err());
        assert!(CoprimePair::new(2, 3).is_err());
    }
}
