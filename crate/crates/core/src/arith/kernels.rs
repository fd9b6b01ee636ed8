//! Directed bounds for `ln` and `exp` of a single dyadic.
//!
//! Both kernels run in fixed point with `wp` fractional bits and round every
//! intermediate step in one direction. Each step is monotone in its input, so
//! the Down chain yields a lower bound and the Up chain an upper bound without
//! any separate error analysis; the Up chain adds an explicit tail bound for
//! the truncated series.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::dyadic::{div_round, isqrt_round, shr_round, Dyadic, Round};

fn mul_fixed(a: &BigInt, b: &BigInt, wp: u32, dir: Round) -> BigInt {
    shr_round(&(a * b), wp as u64, dir)
}

/// Number of extra square roots / halvings before the series kicks in.
fn reduction_bits(wp: u32) -> u32 {
    // A square root costs several multiplications, a series term one.
    ((wp as f64 / 12.0).sqrt() as u32).max(4)
}

fn bit_length(v: u64) -> u32 {
    64 - v.leading_zeros()
}

/// Bound of `ln x` for `x >= 1` with absolute accuracy about `2^-prec`.
fn ln_ge_one(x: &Dyadic, prec: u32, dir: Round) -> Dyadic {
    debug_assert!(x >= &Dyadic::one());
    if x == &Dyadic::one() {
        return Dyadic::zero();
    }
    let mag = x.log2_floor().max(0) as u64 + 1;
    let r = reduction_bits(prec);
    let guard = bit_length(mag) + r + 16;
    let wp = prec + guard;
    let f = BigInt::one() << wp;
    let eps = BigInt::one() << (wp - r);

    // Repeated square roots: ln x = 2^j ln(x^(1/2^j)).
    let mut z = x.to_fixed(wp, dir);
    let mut j: i64 = 0;
    while &z - &f >= eps {
        z = isqrt_round(&(&z << wp), dir);
        j += 1;
    }

    // ln z = 2 atanh(t), t = (z - 1)/(z + 1).
    let t = div_round(&((&z - &f) << wp), &(&z + &f), dir);
    let t2 = mul_fixed(&t, &t, wp, dir);
    let mut pow = t;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        sum += div_round(&pow, &BigInt::from(2 * k + 1), dir);
        pow = mul_fixed(&pow, &t2, wp, dir);
        k += 1;
        match dir {
            Round::Down if pow.is_zero() => break,
            Round::Up if pow <= BigInt::one() => {
                // Remaining terms sum to at most t^(2k+1) / (1 - t^2) <= 2 pow.
                sum += 2u32;
                break;
            }
            _ => {}
        }
    }
    Dyadic::new(sum, j + 1 - wp as i64)
}

/// Directed bound of `ln x` for `x > 0`.
pub(crate) fn ln_bound(x: &Dyadic, prec: u32, dir: Round) -> Dyadic {
    debug_assert!(x.is_positive());
    if x >= &Dyadic::one() {
        return ln_ge_one(x, prec, dir);
    }
    // ln x = -ln(1/x); a lower bound of ln x needs an upper bound of ln(1/x).
    let inv = Dyadic::one()
        .div(x, prec + 8, dir.flip())
        .expect("x is non-zero");
    let inv = if inv < Dyadic::one() {
        Dyadic::one()
    } else {
        inv
    };
    ln_ge_one(&inv, prec, dir.flip()).neg()
}

/// Bound of `exp x` for `x >= 0` with relative accuracy about `2^-prec`.
fn exp_nonneg(x: &Dyadic, prec: u32, dir: Round) -> Dyadic {
    if x.is_zero() {
        return Dyadic::one();
    }
    let s = reduction_bits(prec) as i64;
    let j = (x.log2_floor() + 1 + s).max(0);
    let wp = prec + j as u32 + 24;
    let f = BigInt::one() << wp;

    // exp(x) = exp(x / 2^j)^(2^j) with x / 2^j < 2^-s.
    let r = x.shl(-j).to_fixed(wp, dir);
    let mut sum = f.clone();
    let mut term = f.clone();
    let mut i: u64 = 1;
    loop {
        term = div_round(&(&term * &r), &(BigInt::from(i) << wp), dir);
        sum += &term;
        i += 1;
        match dir {
            Round::Down if term.is_zero() => break,
            Round::Up if term <= BigInt::one() => {
                // The ratio of successive terms is below 1/2.
                sum += 2u32;
                break;
            }
            _ => {}
        }
    }
    for _ in 0..j {
        sum = mul_fixed(&sum, &sum, wp, dir);
    }
    Dyadic::new(sum, -(wp as i64)).round(prec + 16, dir)
}

/// Directed bound of `exp x`.
pub(crate) fn exp_bound(x: &Dyadic, prec: u32, dir: Round) -> Dyadic {
    if !x.is_negative() {
        return exp_nonneg(x, prec, dir);
    }
    let denom = exp_nonneg(&x.neg(), prec + 8, dir.flip());
    Dyadic::one()
        .div(&denom, prec + 16, dir)
        .expect("exp is positive")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn brackets(lo: &Dyadic, hi: &Dyadic, approx: f64, tol: f64) {
        assert!(lo <= hi, "{lo} > {hi}");
        assert!(
            lo.to_f64() <= approx + tol && hi.to_f64() >= approx - tol,
            "{lo} {hi} vs {approx}"
        );
    }

    #[test]
    fn ln_of_small_integers() {
        for n in [2i64, 3, 10, 1000, 1 << 40] {
            let x = Dyadic::from_int(n);
            let lo = ln_bound(&x, 100, Round::Down);
            let hi = ln_bound(&x, 100, Round::Up);
            brackets(&lo, &hi, (n as f64).ln(), 1e-12);
            assert!(hi.sub(&lo) < Dyadic::new(BigInt::one(), -90));
        }
    }

    #[test]
    fn ln_below_one_is_negative() {
        let x = Dyadic::from_rational(&BigRational::new(8.into(), 9.into()), 200, Round::Down);
        let lo = ln_bound(&x, 120, Round::Down);
        let hi = ln_bound(&x, 120, Round::Up);
        brackets(&lo, &hi, (8f64 / 9.0).ln(), 1e-14);
    }

    #[test]
    fn exp_brackets() {
        for v in [-30.0f64, -1.0, 0.5, 1.0, 7.25, 40.0] {
            let x = Dyadic::from_rational(&BigRational::from_float(v).unwrap(), 64, Round::Down);
            let lo = exp_bound(&x, 100, Round::Down);
            let hi = exp_bound(&x, 100, Round::Up);
            brackets(&lo, &hi, v.exp(), v.exp() * 1e-13);
            let rel = hi.sub(&lo).to_f64() / v.exp();
            assert!(rel < 1e-25, "{v}: {rel}");
        }
    }

    fn contains(lo: &Dyadic, hi: &Dyadic, decimal: &str, ulp_digits: i64) {
        // `decimal` is truncated, so widen it by one unit in its last place.
        let v = crate::arith::parse_decimal_rational(decimal).unwrap();
        let u = BigRational::new(
            BigInt::one(),
            num_traits::pow(BigInt::from(10), ulp_digits as usize),
        );
        assert!(lo.to_rational() <= &v + &u, "lo above {decimal}");
        assert!(hi.to_rational() >= &v - &u, "hi below {decimal}");
    }

    #[test]
    fn high_precision_constants_are_enclosed() {
        let ln2 = "0.69314718055994530941723212145817656807550013436025525412068000949339362196969471560586332699641868754";
        let e = "2.71828182845904523536028747135266249775724709369995957496696762772407663035354759457138217852516642742";
        let two = Dyadic::from_int(2);
        let (lo, hi) = (
            ln_bound(&two, 320, Round::Down),
            ln_bound(&two, 320, Round::Up),
        );
        contains(&lo, &hi, ln2, 100);
        assert!(hi.sub(&lo) < Dyadic::new(BigInt::one(), -315));
        let half = Dyadic::new(BigInt::one(), -1);
        let (lo, hi) = (
            ln_bound(&half, 320, Round::Down),
            ln_bound(&half, 320, Round::Up),
        );
        contains(&lo.neg(), &hi.neg(), ln2, 100);
        let (lo, hi) = (
            exp_bound(&Dyadic::one(), 320, Round::Down),
            exp_bound(&Dyadic::one(), 320, Round::Up),
        );
        contains(&lo, &hi, e, 100);
        assert!(hi.sub(&lo) < Dyadic::new(BigInt::one(), -310));
    }
}
