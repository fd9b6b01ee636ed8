//! The stable norm on `H_1 = Z^2` of the modular torus.
//!
//! On a primitive sector class `(q, p)` the norm is the length of the simple
//! closed geodesic, `2 acosh(3 m / 2)` with `m` the Markov number of `p/q`.
//! It is extended homogeneously and then to the whole plane by the order-12
//! group generated by `(x, y) -> (y, x)` and `(x, y) -> (-y, x + y)`; the
//! cone `x >= y >= 0` is a fundamental domain.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith::{enclose_acosh, RealEnclosure};
use crate::error::{Error, Result};
use crate::farey::CoprimePair;
use crate::markov::primitive_label;

/// Working precision for norm values unless a caller asks for more.
pub const DEFAULT_NORM_PRECISION: u32 = 192;

/// An integer homology class `(x, y)`; the sector coordinates are `(q, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HomologyClass {
    pub x: i64,
    pub y: i64,
}

impl HomologyClass {
    pub fn new(x: i64, y: i64) -> Self {
        HomologyClass { x, y }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn scale(self, n: i64) -> Self {
        HomologyClass::new(self.x * n, self.y * n)
    }

    pub fn gcd(self) -> u64 {
        self.x.unsigned_abs().gcd(&self.y.unsigned_abs())
    }

    pub fn in_sector(self) -> bool {
        self.x >= self.y && self.y >= 0 && !self.is_zero()
    }
}

impl From<CoprimePair> for HomologyClass {
    fn from(c: CoprimePair) -> Self {
        HomologyClass::new(c.q() as i64, c.p() as i64)
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// An element `swap^s R^k` of the symmetry group, `s` in {0,1}, `k` in 0..6.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Symmetry {
    pub swap: bool,
    pub rotation: u8,
}

impl Symmetry {
    /// All twelve elements.
    pub fn all() -> impl Iterator<Item = Symmetry> {
        [false, true]
            .into_iter()
            .flat_map(|swap| (0..6u8).map(move |rotation| Symmetry { swap, rotation }))
    }

    pub fn apply(self, v: HomologyClass) -> HomologyClass {
        let mut w = v;
        for _ in 0..self.rotation {
            w = HomologyClass::new(-w.y, w.x + w.y);
        }
        if self.swap {
            w = HomologyClass::new(w.y, w.x);
        }
        w
    }
}

/// A sector representative of `v` and a group element carrying `v` to it.
pub fn reduce_to_sector(v: HomologyClass) -> Result<(HomologyClass, Symmetry)> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let found = Symmetry::all()
        .map(|g| (g.apply(v), g))
        .find(|(w, _)| w.in_sector())
        .expect("the twelve images of the sector cover the plane");
    Ok(found)
}

/// `acosh(3 m / 2)`, half the length of the geodesic labelled `m`.
pub fn half_length(m: &BigInt, precision_bits: u32) -> Result<RealEnclosure> {
    enclose_acosh(
        &BigRational::new(BigInt::from(3) * m, BigInt::from(2)),
        precision_bits,
    )
}

/// `||(q, p)||_s = g * 2 acosh(3 m / 2)` for a sector point with gcd `g`.
pub fn stable_norm(q: u64, p: u64, precision_bits: u32) -> Result<RealEnclosure> {
    if q == 0 && p == 0 {
        return Err(Error::ZeroVector);
    }
    let (g, m) = primitive_label(q, p)?;
    Ok(half_length(&m, precision_bits + 2)?.scale(2 * g))
}

/// The stable norm of any non-zero class, through its sector representative.
pub fn extend_norm(v: HomologyClass, precision_bits: u32) -> Result<RealEnclosure> {
    let (w, _) = reduce_to_sector(v)?;
    stable_norm(w.x as u64, w.y as u64, precision_bits)
}

/// A point `v / ||v||_s` on the boundary of the unit ball.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub direction: CoprimePair,
    pub x: RealEnclosure,
    pub y: RealEnclosure,
}

pub fn sphere_point(v: CoprimePair, precision_bits: u32) -> Result<SpherePoint> {
    let n = stable_norm(v.q(), v.p(), precision_bits + 4)?;
    Ok(SpherePoint {
        direction: v,
        x: RealEnclosure::from_int(v.q(), precision_bits).div(&n)?,
        y: RealEnclosure::from_int(v.p(), precision_bits).div(&n)?,
    })
}
