//! Fock's function `Psi` on `[0, 1/2]`, its one-sided derivatives at
//! rationals, the corner slopes of the stable-norm ball and the length
//! asymptotics of Dehn-twisted curves.
//!
//! At `t = p/q` with Farey triangle `(r1/s1, p/q, r2/s2)` let `(n1, n, n2)` be
//! the labels at `T` of those three fractions and `s = sqrt(9 n^2 - 4)`. The
//! logarithm arguments of the derivative formulas are evaluated in the
//! algebraically equal form `(3 n1 - 6 n2 / (s + 3 n)) / s` (and its mirror),
//! which avoids subtracting two numbers of size `n n2 / s`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{refine, RealEnclosure};
use crate::error::{Error, Result};
use crate::farey::{
    farey_parents, t_inverse, t_map_fraction, CoprimePair, FareyFraction, FareyTriple,
};
use crate::markov::{markov_number, markov_triple_at};
use crate::norm::stable_norm;

/// Largest working precision tried by the adaptive evaluations below.
pub const MAX_WORKING_BITS: u32 = 1 << 17;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            _ => Err(Error::Parse(format!(
                "side must be left or right, got {s:?}"
            ))),
        }
    }
}

/// Which radical the derivative formulas put under the square root. Only
/// [`Radical::Center`] is correct; the other variant exists so that tests can
/// show the finite-difference oracle rejects it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Radical {
    /// `sqrt(9 n^2 - 4)` with `n` the label of the twisting curve.
    Center,
    /// `sqrt(9 n2^2 - 4)`.
    FarNeighbour,
}

/// The Farey triangle at `t` together with its `T`-labels.
#[derive(Clone, Debug)]
struct Triangle {
    trio: FareyTriple,
    n1: BigInt,
    n: BigInt,
    n2: BigInt,
}

impl Triangle {
    fn at(t: FareyFraction) -> Result<Self> {
        t.require_lower_half()?;
        let trio = farey_parents(t)?;
        let (n1, n, n2) = markov_triple_at(t)?;
        Ok(Triangle { trio, n1, n, n2 })
    }

    fn q(&self) -> u64 {
        self.trio.center.q()
    }
}

fn int(v: &BigInt, wp: u32) -> RealEnclosure {
    RealEnclosure::from_int(v.clone(), wp)
}

/// `acosh(3 n / 2)`.
fn ell(n: &BigInt, wp: u32) -> Result<RealEnclosure> {
    RealEnclosure::from_rational(&BigRational::new(BigInt::from(3) * n, BigInt::from(2)), wp)
        .acosh()
}

/// `(3 near - 6 far / (s + 3 n)) / s` with `s = sqrt(9 r^2 - 4)`.
fn log_argument(
    near: &BigInt,
    far: &BigInt,
    n: &BigInt,
    r: &BigInt,
    wp: u32,
) -> Result<RealEnclosure> {
    let nine_r2 = BigInt::from(9) * r * r;
    let s = RealEnclosure::from_int(nine_r2 - 4, wp).sqrt()?;
    if r == n {
        let three_n = int(&(BigInt::from(3) * n), wp);
        let inner = int(&(BigInt::from(6) * far), wp).div(&s.add(&three_n))?;
        int(&(BigInt::from(3) * near), wp).sub(&inner).div(&s)
    } else {
        // The displayed form, needed for a radical that does not match n.
        let half = RealEnclosure::ratio(1, 2, wp);
        let a = int(&(BigInt::from(3) * near), wp).mul(&half);
        let b = int(&(BigInt::from(9) * n * near - BigInt::from(6) * far), wp)
            .mul(&half)
            .div(&s)?;
        Ok(a.sub(&b))
    }
}

fn derivative_eval(tri: &Triangle, side: Side, radical: Radical, wp: u32) -> Result<RealEnclosure> {
    let q = tri.q();
    let l = ell(&tri.n, wp)?;
    let r = match radical {
        Radical::Center => &tri.n,
        Radical::FarNeighbour => match side {
            Side::Left => &tri.n2,
            Side::Right => &tri.n1,
        },
    };
    match side {
        Side::Left => {
            let a = log_argument(&tri.n1, &tri.n2, &tri.n, r, wp)?;
            let s2 = tri.trio.right.q();
            Ok(l.scale(s2).add(&a.ln()?.scale(q)).neg())
        }
        Side::Right => {
            let a = log_argument(&tri.n2, &tri.n1, &tri.n, r, wp)?;
            let s1 = tri.trio.left.q();
            Ok(l.scale(s1).add(&a.ln()?.scale(q)))
        }
    }
}

fn check_side(t: FareyFraction, side: Side) -> Result<()> {
    t.require_lower_half()?;
    match side {
        Side::Left if t == FareyFraction::ZERO => Err(Error::Endpoint("no left derivative at 0")),
        Side::Right if t == FareyFraction::HALF => {
            Err(Error::Endpoint("no right derivative at 1/2"))
        }
        _ => Ok(()),
    }
}

/// `Psi(p/q) = acosh(3/2 m_{T(p/q)}) / q` on `[0, 1/2]`.
pub fn psi(t: FareyFraction, precision_bits: u32) -> Result<RealEnclosure> {
    t.require_lower_half()?;
    let n = markov_number(t_map_fraction(t)?)?;
    let q = t.q();
    refine(precision_bits, |wp| {
        ell(&n, wp)?.div(&RealEnclosure::from_int(q, wp))
    })
}

/// One-sided derivative of `Psi` at `t` from the closed form.
pub fn psi_derivative(t: FareyFraction, side: Side, precision_bits: u32) -> Result<RealEnclosure> {
    psi_derivative_with(t, side, Radical::Center, precision_bits)
}

/// As [`psi_derivative`], with an explicit choice of radical.
pub fn psi_derivative_with(
    t: FareyFraction,
    side: Side,
    radical: Radical,
    precision_bits: u32,
) -> Result<RealEnclosure> {
    check_side(t, side)?;
    let tri = Triangle::at(t)?;
    let e = refine(precision_bits, |wp| {
        derivative_eval(&tri, side, radical, wp)
    })?;
    if radical == Radical::Center {
        debug_assert!(!e.certainly_positive(), "Psi is decreasing, got {e} at {t}");
    }
    Ok(e)
}

pub fn psi_left_derivative(t: FareyFraction, precision_bits: u32) -> Result<RealEnclosure> {
    psi_derivative(t, Side::Left, precision_bits)
}

pub fn psi_right_derivative(t: FareyFraction, precision_bits: u32) -> Result<RealEnclosure> {
    psi_derivative(t, Side::Right, precision_bits)
}

/// The `k`-th point `(r + k p)/(s + k q)` of the twist sequence approaching
/// `t` from `side`.
pub fn twist_point(t: FareyFraction, side: Side, k: u64) -> Result<FareyFraction> {
    check_side(t, side)?;
    let trio = farey_parents(t)?;
    let parent = match side {
        Side::Left => trio.left,
        Side::Right => trio.right,
    };
    FareyFraction::new(parent.p() + k * t.p(), parent.q() + k * t.q())
}

fn difference_quotient_eval(
    t: FareyFraction,
    u: FareyFraction,
    n_t: &BigInt,
    n_u: &BigInt,
    wp: u32,
) -> Result<RealEnclosure> {
    let psi_t = ell(n_t, wp)?.div(&RealEnclosure::from_int(t.q(), wp))?;
    let psi_u = ell(n_u, wp)?.div(&RealEnclosure::from_int(u.q(), wp))?;
    let dt = BigRational::new(BigInt::from(t.p()), BigInt::from(t.q()))
        - BigRational::new(BigInt::from(u.p()), BigInt::from(u.q()));
    psi_t
        .sub(&psi_u)
        .div(&RealEnclosure::from_rational(&dt, wp))
}

/// `(Psi(t) - Psi(u_k)) / (t - u_k)` along the twist sequence from `side`.
pub fn finite_difference_derivative(
    t: FareyFraction,
    side: Side,
    k: u64,
    precision_bits: u32,
) -> Result<RealEnclosure> {
    if k == 0 {
        return Err(Error::Parse("twist index must be positive".into()));
    }
    let u = twist_point(t, side, k)?;
    let n_t = markov_number(t_map_fraction(t)?)?;
    let n_u = markov_number(t_map_fraction(u)?)?;
    refine(precision_bits, |wp| {
        difference_quotient_eval(t, u, &n_t, &n_u, wp)
    })
}

/// Rough `log2` of `e^{2 k acosh(3n/2)}`, used to seed working precision.
fn decay_bits(n: &BigInt, k: u64) -> u32 {
    let bits = n.bits() as f64 + 1.6;
    (2.0 * k as f64 * bits).ceil().min(MAX_WORKING_BITS as f64) as u32
}

/// Re-evaluate at doubling working precision until `accept` holds.
pub(crate) fn adaptive<F, A>(start_bits: u32, eval: F, accept: A) -> Result<RealEnclosure>
where
    F: Fn(u32) -> Result<RealEnclosure>,
    A: Fn(&RealEnclosure) -> bool,
{
    let mut wp = start_bits.clamp(64, MAX_WORKING_BITS);
    loop {
        let e = eval(wp)?;
        if accept(&e) {
            return Ok(e);
        }
        if wp >= MAX_WORKING_BITS {
            return Err(Error::UndecidedAtCap(format!(
                "adaptive evaluation at {wp} bits"
            )));
        }
        wp = (wp * 2).min(MAX_WORKING_BITS);
    }
}

/// Non-zero with `width <= |value| / 2^ratio_bits`.
pub fn relatively_tight(e: &RealEnclosure, ratio_bits: u32) -> bool {
    if e.certainly_positive() {
        e.width().shl(ratio_bits as i64) <= *e.lo()
    } else if e.certainly_negative() {
        e.width().shl(ratio_bits as i64) <= e.hi().neg()
    } else {
        false
    }
}

/// `finite_difference_derivative(t, side, k) - psi_derivative(t, side)`,
/// resolved to a few relative bits so that gaps at different `k` can be
/// compared.
pub fn derivative_gap(t: FareyFraction, side: Side, k: u64) -> Result<RealEnclosure> {
    let u = twist_point(t, side, k)?;
    let tri = Triangle::at(t)?;
    let n_u = markov_number(t_map_fraction(u)?)?;
    let start = decay_bits(&tri.n, k) + 2 * (t.q() * k + 1).ilog2() + 64;
    adaptive(
        start,
        |wp| {
            let fd = difference_quotient_eval(t, u, &tri.n, &n_u, wp)?;
            Ok(fd.sub(&derivative_eval(&tri, side, Radical::Center, wp)?))
        },
        |e| relatively_tight(e, 6),
    )
}

/// Corner data of the stable-norm ball at a primitive sector direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerSlopes {
    pub at: CoprimePair,
    /// `acosh(3 m_{p/q} / 2)`, half the norm of `(q, p)`.
    pub ell: RealEnclosure,
    /// Left derivative of `Psi` at `T^{-1}(p/q)`; absent at `(1,0)`.
    #[serde(rename = "L")]
    pub left: Option<RealEnclosure>,
    /// Right derivative of `Psi` at `T^{-1}(p/q)`; absent at `(1,1)`.
    #[serde(rename = "R")]
    pub right: Option<RealEnclosure>,
    /// Slope of the boundary on the side of larger `p/q`.
    pub mu_minus: Option<RealEnclosure>,
    /// Slope of the boundary on the side of smaller `p/q`.
    pub mu_plus: Option<RealEnclosure>,
}

/// `-(ell - D p)/(ell + D q)`.
fn slope_from(ell: &RealEnclosure, d: &RealEnclosure, v: CoprimePair) -> Result<RealEnclosure> {
    let num = ell.sub(&d.scale(v.p()));
    let den = ell.add(&d.scale(v.q()));
    Ok(num.div(&den)?.neg())
}

/// Evaluates one corner slope at any working precision.
#[derive(Clone, Debug)]
pub struct SlopeEvaluator {
    at: CoprimePair,
    side: Side,
    m: BigInt,
    tri: Triangle,
}

impl SlopeEvaluator {
    /// `Side::Right` gives `mu_plus` (needs `R`), `Side::Left` gives
    /// `mu_minus` (needs `L`). `None` when that side is absent.
    pub fn new(at: CoprimePair, side: Side) -> Result<Option<Self>> {
        let t = t_inverse(at.fraction());
        if check_side(t, side).is_err() {
            return Ok(None);
        }
        Ok(Some(SlopeEvaluator {
            at,
            side,
            m: markov_number(at.fraction())?,
            tri: Triangle::at(t)?,
        }))
    }

    pub fn eval(&self, wp: u32) -> Result<RealEnclosure> {
        let l = ell(&self.m, wp)?;
        let d = derivative_eval(&self.tri, self.side, Radical::Center, wp)?;
        slope_from(&l, &d, self.at)
    }

    pub fn enclose(&self, precision_bits: u32) -> Result<RealEnclosure> {
        refine(precision_bits, |wp| self.eval(wp))
    }
}

pub fn mu_plus(v: CoprimePair, precision_bits: u32) -> Result<Option<RealEnclosure>> {
    SlopeEvaluator::new(v, Side::Right)?
        .map(|e| e.enclose(precision_bits))
        .transpose()
}

pub fn mu_minus(v: CoprimePair, precision_bits: u32) -> Result<Option<RealEnclosure>> {
    SlopeEvaluator::new(v, Side::Left)?
        .map(|e| e.enclose(precision_bits))
        .transpose()
}

pub fn corner_slopes(v: CoprimePair, precision_bits: u32) -> Result<CornerSlopes> {
    let t = t_inverse(v.fraction());
    let m = markov_number(v.fraction())?;
    let side = |s: Side| -> Result<Option<RealEnclosure>> {
        match check_side(t, s) {
            Ok(()) => psi_derivative(t, s, precision_bits).map(Some),
            Err(_) => Ok(None),
        }
    };
    Ok(CornerSlopes {
        at: v,
        ell: refine(precision_bits, |wp| ell(&m, wp))?,
        left: side(Side::Left)?,
        right: side(Side::Right)?,
        mu_minus: mu_minus(v, precision_bits)?,
        mu_plus: mu_plus(v, precision_bits)?,
    })
}

/// `sigma_- = mu_plus` at `(1,0)`.
pub fn sigma_minus(precision_bits: u32) -> Result<RealEnclosure> {
    Ok(mu_plus(CoprimePair::new(1, 0)?, precision_bits)?.expect("(1,0) has a right side"))
}

/// `sigma_+ = mu_minus` at `(1,1)`.
pub fn sigma_plus(precision_bits: u32) -> Result<RealEnclosure> {
    Ok(mu_minus(CoprimePair::new(1, 1)?, precision_bits)?.expect("(1,1) has a left side"))
}

/// `-ln(3/2 + sqrt5/2) / ln(3/2 + 3 sqrt5/10)`.
pub fn sigma_minus_closed_form(precision_bits: u32) -> Result<RealEnclosure> {
    refine(precision_bits, |wp| {
        let r5 = RealEnclosure::from_int(5, wp).sqrt()?;
        let num = RealEnclosure::ratio(3, 2, wp)
            .add(&r5.mul(&RealEnclosure::ratio(1, 2, wp)))
            .ln()?;
        let den = RealEnclosure::ratio(3, 2, wp)
            .add(&r5.mul(&RealEnclosure::ratio(3, 10, wp)))
            .ln()?;
        Ok(num.div(&den)?.neg())
    })
}

/// `-ln(3/2 + 3 sqrt2/4) / ln(4/3 + 2 sqrt2/3)`.
pub fn sigma_plus_closed_form(precision_bits: u32) -> Result<RealEnclosure> {
    refine(precision_bits, |wp| {
        let r2 = RealEnclosure::from_int(2, wp).sqrt()?;
        let num = RealEnclosure::ratio(3, 2, wp)
            .add(&r2.mul(&RealEnclosure::ratio(3, 4, wp)))
            .ln()?;
        let den = RealEnclosure::ratio(4, 3, wp)
            .add(&r2.mul(&RealEnclosure::ratio(2, 3, wp)))
            .ln()?;
        Ok(num.div(&den)?.neg())
    })
}

/// The point `((1 - t) / (2 Psi(t)), t / (2 Psi(t)))`, which lies on the unit
/// sphere of the stable norm.
pub fn graph_to_sphere(
    t: FareyFraction,
    precision_bits: u32,
) -> Result<(RealEnclosure, RealEnclosure)> {
    let wp = precision_bits + 8;
    let two_psi = psi(t, wp)?.scale(2);
    let tr = BigRational::new(BigInt::from(t.p()), BigInt::from(t.q()));
    let x = RealEnclosure::from_rational(&(BigRational::one() - &tr), wp).div(&two_psi)?;
    let y = RealEnclosure::from_rational(&tr, wp).div(&two_psi)?;
    Ok((
        x.with_precision(precision_bits),
        y.with_precision(precision_bits),
    ))
}

/// Stable norm of [`graph_to_sphere`]`(t)`. The point is a positive multiple
/// of the sector class `(q - p, p)`, so its norm is that multiple times the
/// norm of the class.
pub fn graph_point_norm(t: FareyFraction, precision_bits: u32) -> Result<RealEnclosure> {
    let wp = precision_bits + 8;
    let (x, _) = graph_to_sphere(t, wp)?;
    let (cq, cp) = (t.q() - t.p(), t.p());
    // The first coordinate of the class is q - p >= 1 on [0, 1/2].
    let lambda = x.div(&RealEnclosure::from_int(cq, wp))?;
    Ok(lambda
        .mul(&stable_norm(cq, cp, wp)?)
        .with_precision(precision_bits))
}

/// One row of [`dehn_asymptotics`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DehnRow {
    pub k: u64,
    /// The twisted fraction `(r1 + k p)/(s1 + k q)`.
    pub twisted: FareyFraction,
    /// `acosh(3/2 m)` of the twisted curve.
    pub half_length: RealEnclosure,
    /// `(k + 1) ell(gamma) + ln A`.
    pub predicted: RealEnclosure,
    pub residual: RealEnclosure,
    /// `residual * e^{2 k ell(gamma)}`.
    pub scaled_residual: RealEnclosure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DehnTable {
    pub at: FareyFraction,
    pub rows: Vec<DehnRow>,
}

/// Compare half-lengths of curves obtained by twisting the left parent of
/// `t` around `t` against the linear-plus-constant prediction.
pub fn dehn_asymptotics(t: FareyFraction, k_max: u64) -> Result<DehnTable> {
    check_side(t, Side::Left)?;
    let tri = Triangle::at(t)?;
    let mut rows = Vec::new();
    for k in 0..=k_max {
        let u = twist_point(t, Side::Left, k)?;
        let m_u = markov_number(t_map_fraction(u)?)?;
        let eval =
            |wp: u32| -> Result<(RealEnclosure, RealEnclosure, RealEnclosure, RealEnclosure)> {
                let lg = ell(&tri.n, wp)?;
                let a = log_argument(&tri.n1, &tri.n2, &tri.n, &tri.n, wp)?;
                let predicted = lg.scale(k + 1).add(&a.ln()?);
                let actual = ell(&m_u, wp)?;
                let residual = actual.sub(&predicted);
                // e^{ell} = (3n + s)/2 exactly.
                let s =
                    RealEnclosure::from_int(BigInt::from(9) * &tri.n * &tri.n - 4, wp).sqrt()?;
                let e_ell = int(&(BigInt::from(3) * &tri.n), wp)
                    .add(&s)
                    .mul(&RealEnclosure::ratio(1, 2, wp));
                let mut growth = RealEnclosure::from_int(1, wp);
                for _ in 0..2 * k {
                    growth = growth.mul(&e_ell);
                }
                let scaled = residual.mul(&growth);
                Ok((actual, predicted, residual, scaled))
            };
        let start = decay_bits(&tri.n, k) + 96;
        let mut wp = start.min(MAX_WORKING_BITS);
        let row = loop {
            let (actual, predicted, residual, scaled) = eval(wp)?;
            if relatively_tight(&residual, 8) {
                break DehnRow {
                    k,
                    twisted: u,
                    half_length: actual,
                    predicted,
                    residual,
                    scaled_residual: scaled,
                };
            }
            if wp >= MAX_WORKING_BITS {
                return Err(Error::UndecidedAtCap(format!(
                    "Dehn residual at {t}, k = {k}"
                )));
            }
            wp = (wp * 2).min(MAX_WORKING_BITS);
        };
        rows.push(row);
    }
    Ok(DehnTable { at: t, rows })
}
