use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::dyadic::{Dyadic, Round};
use super::kernels::{exp_bound, ln_bound};
use crate::error::{Error, Result};

/// A certified interval `[lo, hi]` around a real number.
///
/// Endpoints are dyadic and outward rounded. When the enclosed value is known
/// to be a specific rational it is carried in `exact`, which lets comparisons
/// report equality without symbolic algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealEnclosure {
    lo: Dyadic,
    hi: Dyadic,
    precision_bits: u32,
    exact: Option<BigRational>,
}

fn isqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl RealEnclosure {
    /// Build from raw bounds. Panics if `lo > hi`.
    pub fn from_bounds(lo: Dyadic, hi: Dyadic, precision_bits: u32) -> Self {
        assert!(lo <= hi, "inverted enclosure [{lo}, {hi}]");
        RealEnclosure {
            lo,
            hi,
            precision_bits,
            exact: None,
        }
    }

    pub fn from_dyadic(x: Dyadic, precision_bits: u32) -> Self {
        let exact = Some(x.to_rational());
        RealEnclosure {
            lo: x.clone(),
            hi: x,
            precision_bits,
            exact,
        }
    }

    pub fn from_rational(r: &BigRational, precision_bits: u32) -> Self {
        RealEnclosure {
            lo: Dyadic::from_rational(r, precision_bits, Round::Down),
            hi: Dyadic::from_rational(r, precision_bits, Round::Up),
            precision_bits,
            exact: Some(r.clone()),
        }
    }

    pub fn from_int(v: impl Into<BigInt>, precision_bits: u32) -> Self {
        Self::from_rational(&BigRational::from_integer(v.into()), precision_bits)
    }

    pub fn ratio(num: i64, den: i64, precision_bits: u32) -> Self {
        Self::from_rational(&BigRational::new(num.into(), den.into()), precision_bits)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn with_precision(mut self, precision_bits: u32) -> Self {
        self.precision_bits = precision_bits;
        self
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn midpoint(&self) -> Dyadic {
        self.lo.add(&self.hi).shl(-1)
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    /// `width <= 2^(1 - prec) * max(1, |hi|)`.
    pub fn meets_precision(&self, prec: u32) -> bool {
        let scale = if self.hi.abs() > Dyadic::one() {
            self.hi.abs()
        } else {
            Dyadic::one()
        };
        self.width() <= scale.shl(1 - prec as i64)
    }

    pub fn contains_dyadic(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        self.lo.to_rational() <= *r && *r <= self.hi.to_rational()
    }

    /// `self` lies inside `outer`.
    pub fn is_within(&self, outer: &RealEnclosure) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }

    pub fn overlaps(&self, o: &RealEnclosure) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    /// Certified order: `Some` only when the intervals are disjoint, or both
    /// values are the same exact rational.
    pub fn certified_cmp(&self, o: &RealEnclosure) -> Option<Ordering> {
        if let (Some(a), Some(b)) = (&self.exact, &o.exact) {
            return Some(a.cmp(b));
        }
        if self.hi < o.lo {
            Some(Ordering::Less)
        } else if self.lo > o.hi {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// Upper bound of `|x|`.
    pub fn abs_hi(&self) -> Dyadic {
        let (a, b) = (self.lo.abs(), self.hi.abs());
        if a > b {
            a
        } else {
            b
        }
    }

    /// Lower bound of `|x|`; zero when the enclosure straddles zero.
    pub fn abs_lo(&self) -> Dyadic {
        if self.lo.is_positive() {
            self.lo.clone()
        } else if self.hi.is_negative() {
            self.hi.neg()
        } else {
            Dyadic::zero()
        }
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn certainly_negative(&self) -> bool {
        self.hi.is_negative()
    }

    fn prec2(&self, o: &RealEnclosure) -> u32 {
        self.precision_bits.max(o.precision_bits)
    }

    fn exact2(
        &self,
        o: &RealEnclosure,
        op: impl FnOnce(&BigRational, &BigRational) -> BigRational,
    ) -> Option<BigRational> {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => Some(op(a, b)),
            _ => None,
        }
    }

    pub fn neg(&self) -> Self {
        RealEnclosure {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            precision_bits: self.precision_bits,
            exact: self.exact.as_ref().map(|r| -r),
        }
    }

    pub fn add(&self, o: &RealEnclosure) -> Self {
        let prec = self.prec2(o);
        RealEnclosure {
            lo: self.lo.add(&o.lo).round(prec, Round::Down),
            hi: self.hi.add(&o.hi).round(prec, Round::Up),
            precision_bits: prec,
            exact: self.exact2(o, |a, b| a + b),
        }
    }

    pub fn sub(&self, o: &RealEnclosure) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RealEnclosure) -> Self {
        let prec = self.prec2(o);
        let (lo, hi) = if !self.lo.is_negative() && !o.lo.is_negative() {
            (self.lo.mul(&o.lo), self.hi.mul(&o.hi))
        } else {
            let c = [
                self.lo.mul(&o.lo),
                self.lo.mul(&o.hi),
                self.hi.mul(&o.lo),
                self.hi.mul(&o.hi),
            ];
            let lo = c.iter().min().cloned().expect("non-empty");
            let hi = c.iter().max().cloned().expect("non-empty");
            (lo, hi)
        };
        RealEnclosure {
            lo: lo.round(prec, Round::Down),
            hi: hi.round(prec, Round::Up),
            precision_bits: prec,
            exact: self.exact2(o, |a, b| a * b),
        }
    }

    /// Multiply by an exact integer, without rounding, so that
    /// `e.scale(a).scale(b) == e.scale(a * b)`.
    pub fn scale(&self, k: impl Into<BigInt>) -> Self {
        let k = k.into();
        let kd = Dyadic::from_int(k.clone());
        let (a, b) = (self.lo.mul(&kd), self.hi.mul(&kd));
        let (lo, hi) = if k.is_negative() { (b, a) } else { (a, b) };
        RealEnclosure {
            lo,
            hi,
            precision_bits: self.precision_bits,
            exact: self
                .exact
                .as_ref()
                .map(|r| r * BigRational::from_integer(k)),
        }
    }

    pub fn div(&self, o: &RealEnclosure) -> Result<Self> {
        if !o.lo.is_positive() && !o.hi.is_negative() {
            return Err(Error::DivisionByZero);
        }
        let prec = self.prec2(o);
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for (a, b) in pairs {
            let d = a.div(b, prec, Round::Down)?;
            let u = a.div(b, prec, Round::Up)?;
            lo = Some(match lo {
                Some(l) if l <= d => l,
                _ => d,
            });
            hi = Some(match hi {
                Some(h) if h >= u => h,
                _ => u,
            });
        }
        Ok(RealEnclosure {
            lo: lo.expect("four candidates"),
            hi: hi.expect("four candidates"),
            precision_bits: prec,
            exact: self.exact2(o, |a, b| a / b),
        })
    }

    pub fn recip(&self) -> Result<Self> {
        RealEnclosure::from_dyadic(Dyadic::one(), self.precision_bits).div(self)
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.lo.is_negative() {
            return Err(Error::NegativeSqrt);
        }
        let prec = self.precision_bits;
        if let Some(r) = &self.exact {
            if let (Some(n), Some(d)) = (isqrt_exact(r.numer()), isqrt_exact(r.denom())) {
                return Ok(RealEnclosure::from_rational(&BigRational::new(n, d), prec));
            }
        }
        Ok(RealEnclosure {
            lo: self.lo.sqrt(prec, Round::Down)?,
            hi: self.hi.sqrt(prec, Round::Up)?,
            precision_bits: prec,
            exact: None,
        })
    }

    pub fn ln(&self) -> Result<Self> {
        if !self.lo.is_positive() {
            return Err(Error::NonPositiveLog);
        }
        let prec = self.precision_bits;
        if self.exact.as_ref().is_some_and(|r| r.is_one()) {
            return Ok(RealEnclosure::from_int(0, prec));
        }
        Ok(RealEnclosure {
            lo: ln_bound(&self.lo, prec, Round::Down).round(prec + 8, Round::Down),
            hi: ln_bound(&self.hi, prec, Round::Up).round(prec + 8, Round::Up),
            precision_bits: prec,
            exact: None,
        })
    }

    pub fn exp(&self) -> Self {
        let prec = self.precision_bits;
        if self.exact.as_ref().is_some_and(|r| r.is_zero()) {
            return RealEnclosure::from_int(1, prec);
        }
        RealEnclosure {
            lo: exp_bound(&self.lo, prec, Round::Down),
            hi: exp_bound(&self.hi, prec, Round::Up),
            precision_bits: prec,
            exact: None,
        }
    }

    /// `acosh x = ln(x + sqrt(x^2 - 1))` for `x >= 1`.
    pub fn acosh(&self) -> Result<Self> {
        if self.lo < Dyadic::one() {
            return Err(Error::AcoshDomain);
        }
        let prec = self.precision_bits;
        let one = RealEnclosure::from_int(1, prec);
        // (x - 1)(x + 1) keeps the lower end non-negative.
        let disc = self.sub(&one).mul(&self.add(&one));
        let disc = if disc.lo.is_negative() {
            RealEnclosure {
                lo: Dyadic::zero(),
                ..disc
            }
        } else {
            disc
        };
        self.add(&disc.sqrt()?).ln()
    }

    pub fn cosh(&self) -> Self {
        let e = self.exp();
        let inv = self.neg().exp();
        e.add(&inv).mul(&RealEnclosure::from_dyadic(
            Dyadic::new(BigInt::one(), -1),
            self.precision_bits,
        ))
    }

    /// `x^y = exp(y ln x)` for `x > 0`.
    pub fn powf(&self, y: &RealEnclosure) -> Result<Self> {
        Ok(self.ln()?.mul(y).exp())
    }

    /// Hull of two enclosures of the same value.
    pub fn intersect(&self, o: &RealEnclosure) -> Option<Self> {
        let lo = if self.lo >= o.lo {
            self.lo.clone()
        } else {
            o.lo.clone()
        };
        let hi = if self.hi <= o.hi {
            self.hi.clone()
        } else {
            o.hi.clone()
        };
        (lo <= hi).then(|| RealEnclosure {
            lo,
            hi,
            precision_bits: self.prec2(o),
            exact: self.exact.clone().or_else(|| o.exact.clone()),
        })
    }
}

/// `r` rounded half away from zero to `digits` decimals, as a string.
fn round_decimal(r: &BigRational, digits: u32) -> String {
    let scaled = r * BigRational::from_integer(BigInt::from(10).pow(digits));
    let n = scaled.round().to_integer();
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let s = format!("{s:0>width$}", width = digits as usize + 1);
    let (int, frac) = s.split_at(s.len() - digits as usize);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

impl RealEnclosure {
    /// The value rounded to `digits` decimals, if both endpoints round the
    /// same way.
    pub fn decimal_digits(&self, digits: u32) -> Option<String> {
        let lo = round_decimal(&self.lo.to_rational(), digits);
        (lo == round_decimal(&self.hi.to_rational(), digits)).then_some(lo)
    }
}

impl fmt::Display for RealEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.width().to_f64();
        write!(f, "{:.17} [width {:.2e}]", self.to_f64(), w)
    }
}

/// Wire form: exact decimal endpoints that re-parse to identical dyadics.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnclosureRecord {
    pub lo: String,
    pub hi: String,
    pub precision_bits: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<String>,
    pub approx: String,
}

impl From<&RealEnclosure> for EnclosureRecord {
    fn from(e: &RealEnclosure) -> Self {
        EnclosureRecord {
            lo: e.lo.to_decimal_string(),
            hi: e.hi.to_decimal_string(),
            precision_bits: e.precision_bits,
            exact: e.exact.as_ref().map(|r| r.to_string()),
            approx: format!("{:.12e}", e.to_f64()),
        }
    }
}

impl TryFrom<&EnclosureRecord> for RealEnclosure {
    type Error = Error;

    fn try_from(r: &EnclosureRecord) -> Result<Self> {
        let lo = Dyadic::parse_decimal(&r.lo)?;
        let hi = Dyadic::parse_decimal(&r.hi)?;
        if lo > hi {
            return Err(Error::Parse(format!(
                "inverted enclosure [{}, {}]",
                r.lo, r.hi
            )));
        }
        let exact = match &r.exact {
            Some(s) => Some(
                s.parse::<BigRational>()
                    .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?,
            ),
            None => None,
        };
        Ok(RealEnclosure {
            lo,
            hi,
            precision_bits: r.precision_bits,
            exact,
        })
    }
}

impl Serialize for RealEnclosure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EnclosureRecord::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RealEnclosure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = EnclosureRecord::deserialize(d)?;
        RealEnclosure::try_from(&rec).map_err(serde::de::Error::custom)
    }
}
