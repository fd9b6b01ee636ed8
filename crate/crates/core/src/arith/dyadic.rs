//! Dyadic rationals `mant * 2^exp` with directed rounding.
//!
//! These are the endpoints of every [`RealEnclosure`](super::RealEnclosure).
//! Addition, subtraction and multiplication are exact; division, square
//! roots and explicit rounding take a [`Round`] direction so that callers can
//! build outward-rounded bounds.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Rounding direction for inexact operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Round {
    Down,
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// A dyadic rational `mant * 2^exp`, normalized so that `mant` is odd
/// (or zero with `exp == 0`). Normalization makes equality structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

/// `floor(m / 2^shift)` or `ceil(m / 2^shift)`.
pub(crate) fn shr_round(m: &BigInt, shift: u64, dir: Round) -> BigInt {
    if shift == 0 {
        return m.clone();
    }
    // `>>` on BigInt rounds toward negative infinity.
    let floor = m >> shift;
    match dir {
        Round::Down => floor,
        Round::Up => {
            if (&floor << shift) == *m {
                floor
            } else {
                floor + 1u32
            }
        }
    }
}

/// Integer division rounded in the given direction.
pub(crate) fn div_round(n: &BigInt, d: &BigInt, dir: Round) -> BigInt {
    match dir {
        Round::Down => n.div_floor(d),
        Round::Up => {
            let (q, r) = n.div_mod_floor(d);
            if r.is_zero() {
                q
            } else {
                q + 1u32
            }
        }
    }
}

/// Integer square root of a non-negative integer, rounded in `dir`.
pub(crate) fn isqrt_round(n: &BigInt, dir: Round) -> BigInt {
    let r = n.sqrt();
    match dir {
        Round::Down => r,
        Round::Up => {
            if &r * &r == *n {
                r
            } else {
                r + 1u32
            }
        }
    }
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return Dyadic { mant, exp: 0 };
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { mant, exp }
        } else {
            Dyadic {
                mant: mant >> tz,
                exp: exp + tz as i64,
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic::new(v.into(), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `floor(log2 |x|)` for non-zero `x`.
    pub fn log2_floor(&self) -> i64 {
        debug_assert!(!self.is_zero());
        self.mant.bits() as i64 - 1 + self.exp
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    /// Multiply by `2^k` exactly.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    /// Round to at most `prec` significant bits.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        Dyadic::new(shr_round(&self.mant, shift, dir), self.exp + shift as i64)
    }

    /// Fixed-point image `x * 2^frac_bits`, rounded to an integer.
    pub fn to_fixed(&self, frac_bits: u32, dir: Round) -> BigInt {
        let e = self.exp + frac_bits as i64;
        if e >= 0 {
            &self.mant << (e as u64)
        } else {
            shr_round(&self.mant, (-e) as u64, dir)
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.mant << ((self.exp - e) as u64);
        let b = &o.mant << ((o.exp - e) as u64);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Dyadic::new(&self.mant * &o.mant, self.exp + o.exp)
    }

    /// `self / o` rounded to `prec` bits in direction `dir`.
    pub fn div(&self, o: &Self, prec: u32, dir: Round) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Dyadic::zero());
        }
        let shift = (prec as i64 + o.mant.bits() as i64 - self.mant.bits() as i64 + 2).max(0);
        let num = &self.mant << (shift as u64);
        // Normalize the divisor sign so that floor/ceil act on the true quotient.
        let (num, den) = if o.mant.is_negative() {
            (-num, -&o.mant)
        } else {
            (num, o.mant.clone())
        };
        let q = div_round(&num, &den, dir);
        Ok(Dyadic::new(q, self.exp - o.exp - shift).round(prec, dir))
    }

    /// `sqrt(self)` rounded to `prec` bits in direction `dir`.
    pub fn sqrt(&self, prec: u32, dir: Round) -> Result<Self> {
        if self.is_negative() {
            return Err(Error::NegativeSqrt);
        }
        if self.is_zero() {
            return Ok(Dyadic::zero());
        }
        let bits = self.mant.bits() as i64;
        let mut shift = (2 * prec as i64 + 4 - bits).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let n = &self.mant << (shift as u64);
        let r = isqrt_round(&n, dir);
        Ok(Dyadic::new(r, (self.exp - shift) / 2).round(prec, dir))
    }

    /// Bound `num / den` in direction `dir` with `prec` significant bits.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32, dir: Round) -> Result<Self> {
        Dyadic::from_int(num.clone()).div(&Dyadic::from_int(den.clone()), prec, dir)
    }

    pub fn from_rational(r: &BigRational, prec: u32, dir: Round) -> Self {
        if r.denom().is_one() {
            return Dyadic::from_int(r.numer().clone()).round(prec, dir);
        }
        Dyadic::from_ratio(r.numer(), r.denom(), prec, dir)
            .expect("rational denominators are non-zero")
    }

    /// The exact value as a rational, if it is dyadic.
    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << (self.exp as u64))
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << ((-self.exp) as u64))
        }
    }

    /// Recover a dyadic from a rational whose denominator is a power of two.
    pub fn try_from_rational(r: &BigRational) -> Option<Self> {
        let d = r.denom();
        let tz = d.trailing_zeros().unwrap_or(0);
        if (d >> tz).is_one() {
            Some(Dyadic::new(r.numer().clone(), -(tz as i64)))
        } else {
            None
        }
    }

    /// Nearest-ish `f64`; only for display and quick filters.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (m, e) = if bits > 60 {
            let s = bits - 60;
            (&self.mant >> s, self.exp + s as i64)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mf = m.to_f64().unwrap_or(f64::NAN);
        ldexp(mf, e)
    }

    /// Exact decimal expansion (dyadics always have a finite one).
    pub fn to_decimal_string(&self) -> String {
        if self.exp >= 0 {
            return (&self.mant << (self.exp as u64)).to_string();
        }
        let k = (-self.exp) as usize;
        let scaled = self.mant.abs() * num_traits::pow(BigInt::from(5u32), k);
        let mut digits = scaled.to_string();
        if digits.len() <= k {
            digits = "0".repeat(k + 1 - digits.len()) + &digits;
        }
        let split = digits.len() - k;
        let sign = if self.mant.is_negative() { "-" } else { "" };
        format!("{}{}.{}", sign, &digits[..split], &digits[split..])
    }

    /// Parse an exact decimal produced by [`Dyadic::to_decimal_string`].
    pub fn parse_decimal(s: &str) -> Result<Self> {
        let r = parse_decimal_rational(s)?;
        Dyadic::try_from_rational(&r)
            .ok_or_else(|| Error::Parse(format!("{s} is not a dyadic rational")))
    }
}

/// Parse `[-]digits[.digits]` into an exact rational.
pub fn parse_decimal_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("invalid decimal {s:?}"));
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut n: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        n = -n;
    }
    let d = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Ok(BigRational::new(n, d))
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), o.signum());
        if sa != sb || sa == 0 {
            return sa.cmp(&sb);
        }
        // Same non-zero sign: compare magnitudes first by binary exponent.
        let (la, lb) = (self.log2_floor(), o.log2_floor());
        if la != lb {
            let mag = la.cmp(&lb);
            return if sa > 0 { mag } else { mag.reverse() };
        }
        let e = self.exp.min(o.exp);
        let a = &self.mant << ((self.exp - e) as u64);
        let b = &o.mant << ((o.exp - e) as u64);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn shift_rounds_toward_negative_infinity() {
        assert_eq!(
            shr_round(&BigInt::from(-5), 1, Round::Down),
            BigInt::from(-3)
        );
        assert_eq!(shr_round(&BigInt::from(-5), 1, Round::Up), BigInt::from(-2));
        assert_eq!(shr_round(&BigInt::from(5), 1, Round::Up), BigInt::from(3));
        assert_eq!(shr_round(&BigInt::from(4), 1, Round::Up), BigInt::from(2));
    }

    #[test]
    fn normalization_is_structural() {
        assert_eq!(d(4, 0), d(1, 2));
        assert_eq!(d(0, 17), Dyadic::zero());
        assert_eq!(d(6, -1), d(3, 0));
    }

    #[test]
    fn ordering_across_exponents() {
        assert!(d(1, -1000) > Dyadic::zero());
        assert!(d(-1, -1000) < Dyadic::zero());
        assert!(d(3, -1) < d(2, 0));
        assert!(d(-3, -1) > d(-2, 0));
        assert!(d(5, 10) > d(1, 12));
    }

    #[test]
    fn directed_division_brackets() {
        let one = Dyadic::one();
        let three = d(3, 0);
        let lo = one.div(&three, 64, Round::Down).unwrap();
        let hi = one.div(&three, 64, Round::Up).unwrap();
        let third = BigRational::new(1.into(), 3.into());
        assert!(lo.to_rational() < third && third < hi.to_rational());
        assert!(hi.sub(&lo) <= d(1, -63));
        let nlo = one.div(&three.neg(), 64, Round::Down).unwrap();
        assert!(nlo.to_rational() < -third);
    }

    #[test]
    fn sqrt_exact_and_inexact() {
        let nine_quarters = d(9, -2);
        assert_eq!(nine_quarters.sqrt(64, Round::Down).unwrap(), d(3, -1));
        assert_eq!(nine_quarters.sqrt(64, Round::Up).unwrap(), d(3, -1));
        let two = d(2, 0);
        let lo = two.sqrt(80, Round::Down).unwrap();
        let hi = two.sqrt(80, Round::Up).unwrap();
        assert!(lo.mul(&lo) < two && hi.mul(&hi) > two);
        assert!(Dyadic::from_int(-1).sqrt(10, Round::Down).is_err());
    }

    #[test]
    fn decimal_round_trip() {
        for x in [d(-3, -5), d(12345, -17), d(7, 3), Dyadic::zero(), d(-1, -1)] {
            let s = x.to_decimal_string();
            assert_eq!(Dyadic::parse_decimal(&s).unwrap(), x, "{s}");
        }
        assert_eq!(d(-1, -1).to_decimal_string(), "-0.5");
        assert!(Dyadic::parse_decimal("0.1").is_err());
    }
}
