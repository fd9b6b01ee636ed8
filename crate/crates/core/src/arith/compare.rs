use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::enclosure::RealEnclosure;
use crate::error::{Error, Result};

/// A real number that can be enclosed at any requested precision.
pub trait Refinable {
    fn enclose(&self, precision_bits: u32) -> RealEnclosure;
}

impl<F> Refinable for F
where
    F: Fn(u32) -> RealEnclosure,
{
    fn enclose(&self, precision_bits: u32) -> RealEnclosure {
        self(precision_bits)
    }
}

impl Refinable for BigRational {
    fn enclose(&self, precision_bits: u32) -> RealEnclosure {
        RealEnclosure::from_rational(self, precision_bits)
    }
}

impl Refinable for RealEnclosure {
    /// A fixed enclosure does not refine; comparisons against it succeed only
    /// once the other side separates from it.
    fn enclose(&self, _precision_bits: u32) -> RealEnclosure {
        self.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparison {
    Less,
    Greater,
    Equal,
    UndecidedAtCap,
}

impl Comparison {
    pub fn is_decided(self) -> bool {
        self != Comparison::UndecidedAtCap
    }

    /// Convert to an error naming `what` when the cap was reached.
    pub fn decided(self, what: &str) -> Result<std::cmp::Ordering> {
        use std::cmp::Ordering;
        match self {
            Comparison::Less => Ok(Ordering::Less),
            Comparison::Greater => Ok(Ordering::Greater),
            Comparison::Equal => Ok(Ordering::Equal),
            Comparison::UndecidedAtCap => Err(Error::UndecidedAtCap(what.to_string())),
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Comparison::Less => "Less",
            Comparison::Greater => "Greater",
            Comparison::Equal => "Equal",
            Comparison::UndecidedAtCap => "UndecidedAtCap",
        };
        f.write_str(s)
    }
}

/// Doubling precision schedule used by [`certified_compare`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionSchedule {
    pub start_bits: u32,
    pub cap_bits: u32,
}

impl Default for PrecisionSchedule {
    fn default() -> Self {
        PrecisionSchedule {
            start_bits: 128,
            cap_bits: 16384,
        }
    }
}

impl PrecisionSchedule {
    pub fn starting_at(self, start_bits: u32) -> Self {
        PrecisionSchedule {
            start_bits: start_bits.clamp(2, self.cap_bits),
            ..self
        }
    }

    /// The precisions visited, in order, ending at the cap.
    pub fn steps(self) -> impl Iterator<Item = u32> {
        let cap = self.cap_bits;
        let mut next = Some(self.start_bits.min(cap));
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur >= cap {
                None
            } else {
                Some(cur.saturating_mul(2).min(cap))
            };
            Some(cur)
        })
    }
}

/// Compare two refinable reals using the default schedule.
pub fn certified_compare(a: &dyn Refinable, b: &dyn Refinable) -> Comparison {
    certified_compare_with(a, b, PrecisionSchedule::default())
}

/// Compare two refinable reals, doubling precision until the enclosures
/// separate. `Equal` is reported only when both sides are the same exact
/// rational.
pub fn certified_compare_with(
    a: &dyn Refinable,
    b: &dyn Refinable,
    schedule: PrecisionSchedule,
) -> Comparison {
    for prec in schedule.steps() {
        let ea = a.enclose(prec);
        let eb = b.enclose(prec);
        match ea.certified_cmp(&eb) {
            Some(std::cmp::Ordering::Less) => return Comparison::Less,
            Some(std::cmp::Ordering::Greater) => return Comparison::Greater,
            Some(std::cmp::Ordering::Equal) => return Comparison::Equal,
            None => {}
        }
    }
    Comparison::UndecidedAtCap
}

/// Sign of a refinable real, certified.
pub fn certified_sign(a: &dyn Refinable) -> Comparison {
    certified_compare(a, &BigRational::zero())
}

/// Re-evaluate `eval` at growing working precision until its result meets
/// `precision_bits` (see [`RealEnclosure::meets_precision`]).
///
/// Gives up with [`Error::UndecidedAtCap`] once the working precision passes
/// the default cap plus the target, which only happens for evaluations that
/// cancel catastrophically.
pub fn refine<F>(precision_bits: u32, eval: F) -> Result<RealEnclosure>
where
    F: Fn(u32) -> Result<RealEnclosure>,
{
    let cap = PrecisionSchedule::default().cap_bits + 2 * precision_bits;
    let mut extra = 16u32;
    loop {
        let wp = precision_bits + extra;
        let e = eval(wp)?;
        if e.meets_precision(precision_bits) {
            return Ok(e.with_precision(precision_bits));
        }
        if wp >= cap {
            return Err(Error::UndecidedAtCap(format!(
                "refinement to {precision_bits} bits"
            )));
        }
        extra = extra.saturating_mul(2).min(cap - precision_bits);
    }
}

/// Enclosure of `sqrt(x)`; perfect squares give an exact, zero-width result.
pub fn enclose_sqrt(x: &BigRational, precision_bits: u32) -> Result<RealEnclosure> {
    if x.is_negative() {
        return Err(Error::NegativeSqrt);
    }
    refine(precision_bits, |wp| {
        RealEnclosure::from_rational(x, wp).sqrt()
    })
}

/// Enclosure of `ln(x)` for `x > 0`.
pub fn enclose_log(x: &BigRational, precision_bits: u32) -> Result<RealEnclosure> {
    if !x.is_positive() {
        return Err(Error::NonPositiveLog);
    }
    refine(precision_bits, |wp| {
        RealEnclosure::from_rational(x, wp).ln()
    })
}

/// Enclosure of `acosh(x)` for `x >= 1`.
pub fn enclose_acosh(x: &BigRational, precision_bits: u32) -> Result<RealEnclosure> {
    if x < &BigRational::one() {
        return Err(Error::AcoshDomain);
    }
    if x.is_one() {
        return Ok(RealEnclosure::from_int(0, precision_bits));
    }
    refine(precision_bits, |wp| {
        RealEnclosure::from_rational(x, wp).acosh()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn schedule_doubles_to_cap() {
        let steps: Vec<u32> = PrecisionSchedule::default().steps().collect();
        assert_eq!(steps, vec![128, 256, 512, 1024, 2048, 4096, 8192, 16384]);
    }

    #[test]
    fn sqrt_examples() {
        let z = enclose_sqrt(&rat(0, 1), 64).unwrap();
        assert!(z.lo().is_zero() && z.hi().is_zero());
        let e = enclose_sqrt(&rat(9, 4), 64).unwrap();
        assert_eq!(e.exact(), Some(&rat(3, 2)));
        assert!(e.width().is_zero());
        let s5 = enclose_sqrt(&rat(5, 1), 128).unwrap();
        let five = rat(5, 1);
        let (lo, hi) = (s5.lo().to_rational(), s5.hi().to_rational());
        assert!(&lo * &lo <= five && five <= &hi * &hi);
        assert!((s5.to_f64() - 2.236_067_977_499_79).abs() < 1e-15);
        assert!(s5.meets_precision(128));
        assert_eq!(enclose_sqrt(&rat(-1, 2), 64), Err(Error::NegativeSqrt));
    }

    #[test]
    fn log_examples() {
        let z = enclose_log(&rat(1, 1), 64).unwrap();
        assert!(z.width().is_zero() && z.lo().is_zero());
        let l = enclose_log(&rat(8, 9), 128).unwrap();
        assert!((l.to_f64() - (8f64 / 9.0).ln()).abs() < 1e-15);
        assert!(l.meets_precision(128));
        assert_eq!(enclose_log(&rat(0, 1), 64), Err(Error::NonPositiveLog));
    }

    #[test]
    fn acosh_examples() {
        assert!(enclose_acosh(&rat(1, 1), 64).unwrap().width().is_zero());
        let a = enclose_acosh(&rat(3, 2), 128).unwrap();
        // acosh(3/2) = ln((3 + sqrt 5)/2)
        let s5 = enclose_sqrt(&rat(5, 1), 160).unwrap();
        let via_log = s5
            .add(&RealEnclosure::from_int(3, 160))
            .mul(&RealEnclosure::ratio(1, 2, 160))
            .ln()
            .unwrap();
        assert!(a.overlaps(&via_log));
        assert!((a.to_f64() - 0.9624236501192069).abs() < 1e-15);
        let b = enclose_acosh(&rat(3, 1), 128).unwrap();
        assert!((b.to_f64() - 1.762747174039086).abs() < 1e-15);
        assert_eq!(enclose_acosh(&rat(1, 2), 64), Err(Error::AcoshDomain));
    }

    #[test]
    fn compare_log_one_with_zero_is_equal() {
        let log1 = |p: u32| enclose_log(&rat(1, 1), p).unwrap();
        assert_eq!(certified_compare(&log1, &rat(0, 1)), Comparison::Equal);
    }

    #[test]
    fn compare_separates_close_values() {
        let a = rat(1, 3);
        let b = BigRational::new(BigInt::from(1), BigInt::from(3))
            + BigRational::new(BigInt::one(), BigInt::one() << 200u32);
        let sqrt_a = |p: u32| enclose_sqrt(&a, p).unwrap();
        let sqrt_b = |p: u32| enclose_sqrt(&b, p).unwrap();
        assert_eq!(certified_compare(&sqrt_a, &sqrt_b), Comparison::Less);
    }

    #[test]
    fn compare_reports_cap_on_unseparable_values() {
        // Same irrational value computed two ways: never exact, never disjoint.
        let a = |p: u32| enclose_sqrt(&rat(2, 1), p).unwrap();
        let b = |p: u32| {
            enclose_sqrt(&rat(8, 1), p)
                .unwrap()
                .mul(&RealEnclosure::ratio(1, 2, p))
        };
        let schedule = PrecisionSchedule {
            start_bits: 64,
            cap_bits: 256,
        };
        assert_eq!(
            certified_compare_with(&a, &b, schedule),
            Comparison::UndecidedAtCap
        );
    }
}
