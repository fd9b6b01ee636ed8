//! Full-scale acceptance run. Prints one PASS/FAIL line per criterion with
//! its wall time and budget, and exits non-zero if any criterion fails
//! unexpectedly.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use markov_core::arith::{enclose_log, RealEnclosure};
use markov_core::farey::{CoprimePair, FareyFraction};
use markov_core::fock::{
    graph_point_norm, psi_left_derivative, psi_right_derivative, sigma_minus, sigma_plus,
};
use markov_core::fock::{sigma_minus_closed_form, sigma_plus_closed_form};
use markov_core::markov::{cohn_trace, markov_distance, markov_number};
use markov_core::norm::{extend_norm, HomologyClass};
use markov_core::ordering::SegmentReading;
use markov_core::verify::{self, ConvexityBounds, SuiteReport};
use markov_core::Result;
use num_bigint::BigInt;
use num_rational::BigRational;

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_report(r: SuiteReport) -> Outcome {
    let failing: Vec<String> = r
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| {
            format!(
                "{} ({} of {} failed, e.g. {:?})",
                c.name,
                c.failure_count,
                c.cases,
                c.failures.first()
            )
        })
        .collect();
    let cases: u64 = r.checks.iter().map(|c| c.cases).sum();
    Outcome {
        pass: r.passed,
        detail: if r.passed {
            format!("{} checks, {cases} cases", r.checks.len())
        } else {
            failing.join("; ")
        },
    }
}

fn fr(p: u64, q: u64) -> FareyFraction {
    FareyFraction::new(p, q).expect("reduced")
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Certified `|a - b| <= tol`: the hull of the two enclosures is that narrow.
fn within(a: &RealEnclosure, b: &RealEnclosure, tol: &BigRational) -> bool {
    let lo = a.lo().min(b.lo()).to_rational();
    let hi = a.hi().max(b.hi()).to_rational();
    &(hi - lo) <= tol
}

/// Certified rounding of `e` to four decimals equals `target`.
fn rounds_to(e: &RealEnclosure, target: &BigRational) -> bool {
    let half = rat(1, 20_000);
    let (lo, hi) = (e.lo().to_rational(), e.hi().to_rational());
    target - &half < lo && hi < target + half
}

fn tree_regression() -> Result<Outcome> {
    let cases = [
        (0, 1, 1),
        (1, 1, 2),
        (1, 2, 5),
        (1, 3, 13),
        (2, 3, 29),
        (2, 5, 194),
        (3, 5, 433),
    ];
    let mut bad = Vec::new();
    for (p, q, m) in cases {
        let got = markov_number(fr(p, q))?;
        if got != BigInt::from(m) {
            bad.push(format!("{p}/{q} -> {got}"));
        }
    }
    Ok(Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            "7 values".into()
        } else {
            bad.join(", ")
        },
    })
}

fn cohn_oracle() -> Result<Outcome> {
    let mut n = 0;
    let mut bad = Vec::new();
    for c in CoprimePair::enumerate(200) {
        n += 1;
        let f = c.fraction();
        if cohn_trace(f)? != BigInt::from(3) * markov_number(f)? {
            bad.push(f.to_string());
        }
    }
    Ok(Outcome {
        pass: bad.is_empty(),
        detail: format!("{n} fractions, {} mismatches {:?}", bad.len(), bad.first()),
    })
}

fn constants() -> Result<Outcome> {
    let tol30 = BigRational::new(1.into(), BigInt::from(10).pow(30));
    let tol12 = BigRational::new(1.into(), BigInt::from(10).pow(12));
    let prec = 128;
    let sm = sigma_minus(prec)?;
    let sp = sigma_plus(prec)?;
    let l_half = psi_left_derivative(fr(1, 2), prec)?;
    let log89 = enclose_log(&rat(8, 9), prec)?;
    let r_zero = psi_right_derivative(fr(0, 1), prec)?;
    let five = RealEnclosure::from_int(5, prec).sqrt()?;
    let r_expected = RealEnclosure::ratio(3, 2, prec)
        .sub(&five.mul(&RealEnclosure::ratio(3, 10, prec)))
        .ln()?;
    let checks = [
        ("sigma_- ~ -1.2417", rounds_to(&sm, &rat(-12417, 10_000))),
        ("sigma_+ ~ -1.1432", rounds_to(&sp, &rat(-11432, 10_000))),
        (
            "sigma_- closed form",
            within(&sm, &sigma_minus_closed_form(prec)?, &tol30),
        ),
        (
            "sigma_+ closed form",
            within(&sp, &sigma_plus_closed_form(prec)?, &tol30),
        ),
        ("L(1/2) = log(8/9)", within(&l_half, &log89, &tol12)),
        (
            "R(0) = log(3/2 - 3 sqrt5/10)",
            within(&r_zero, &r_expected, &tol12),
        ),
    ];
    let bad: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Ok(Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("sigma_- = {sm}, sigma_+ = {sp}")
        } else {
            bad.join(", ")
        },
    })
}

fn chain() -> Result<Outcome> {
    let checks = verify::constants_checks(128)?;
    let c = checks.last().expect("chain check");
    Ok(Outcome {
        pass: c.passed,
        detail: format!("{} links, {:?}", c.cases, c.failures),
    })
}

/// Soundness over all pairs, plus the printed ratio on the stated instance.
/// At `((4,3),(5,2))` the segment is `(1,-1)`, whose slope and inverted
/// ratio are both `-1`, so the printed reading cannot fail there; the
/// smallest instance where it does fail is reported alongside.
fn thm14() -> Result<Outcome> {
    let r = verify::thm14(150)?;
    let sound = r
        .check("slope reading never contradicts the exact order")
        .expect("check");
    let c = |q, p| CoprimePair::new(q, p).expect("coprime");
    let stated = verify::inverted_ratio_contradicts(c(4, 3), c(5, 2))?
        || verify::inverted_ratio_contradicts(c(5, 2), c(4, 3))?;
    let elsewhere = verify::inverted_ratio_contradicts(c(4, 3), c(5, 1))?;
    let inverted = verify::support_plane_soundness(20, SegmentReading::InvertedRatio)?;
    Ok(Outcome {
        pass: sound.passed && stated,
        detail: format!(
            "{} conclusions, {} contradictions; printed ratio fails at ((4,3),(5,2)): {stated} [segment (1,-1) makes both readings -1]; \
             fails at ((4,3),(5,1)): {elsewhere}; {} inverted-ratio contradictions for q <= 20",
            sound.cases, sound.failure_count, inverted.contradictions
        ),
    })
}

fn distances() -> Result<Outcome> {
    let mut bad = Vec::new();
    if markov_distance(2, 0)? != rat(7, 3) {
        bad.push("(2,0)".to_string());
    }
    if markov_distance(2, 2)? != rat(34, 3) {
        bad.push("(2,2)".to_string());
    }
    let samples: Vec<FareyFraction> = verify::lower_half_fractions(25)
        .into_iter()
        .step_by(2)
        .take(50)
        .collect();
    let one = BigRational::from_integer(1.into());
    for &t in &samples {
        let v = CoprimePair::from_fraction(t)?;
        let base = extend_norm(HomologyClass::from(v), 128)?;
        for n in 1..=10 {
            if extend_norm(HomologyClass::from(v).scale(n), 128)? != base.scale(n) {
                bad.push(format!("homogeneity at {v} x {n}"));
            }
        }
        if !graph_point_norm(t, 128)?.contains_rational(&one) {
            bad.push(format!("unit norm at {t}"));
        }
    }
    Ok(Outcome {
        pass: bad.is_empty() && samples.len() == 50,
        detail: format!("{} samples, failures {:?}", samples.len(), bad),
    })
}

fn census() -> Result<Outcome> {
    let r = markov_core::collisions::collision_census(300)?;
    let direct = markov_core::collisions::coprime_pair_count(300);
    let buckets = r.distinct_labels as u64;
    Ok(Outcome {
        pass: r.max_multiplicity == 1 && buckets == direct && r.pairs_indexed as u64 == direct,
        detail: format!(
            "{} pairs, {buckets} labels, max multiplicity {}",
            direct, r.max_multiplicity
        ),
    })
}

type Criterion = (u32, &'static str, Duration, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria: [Criterion; 12] = [
        (
            1,
            "tree regression",
            Duration::from_millis(1),
            tree_regression,
        ),
        (2, "Cohn trace oracle, q <= 200", secs(10), cohn_oracle),
        (3, "constants", secs(1), constants),
        (4, "bracketing chain", secs(1), chain),
        (5, "Aigner suite, q <= 300", secs(60), || {
            Ok(from_report(verify::aigner(300)?))
        }),
        (6, "LLRS suite, q <= 300, k <= 10^4", secs(300), || {
            Ok(from_report(verify::llrs(300, 10_000)?))
        }),
        (7, "support-plane soundness, q <= 150", secs(120), thm14),
        (8, "derivative oracle, q <= 30", secs(120), || {
            Ok(from_report(verify::derivatives(30)?))
        }),
        (9, "Dehn twist asymptotics, k = 3..10", secs(30), || {
            Ok(from_report(verify::dehn(10)?))
        }),
        (10, "convexity suite", secs(120), || {
            Ok(from_report(verify::convexity(
                ConvexityBounds::from_bound(100),
            )?))
        }),
        (11, "Markov distance and unit norm", secs(10), distances),
        (12, "census, q <= 300", secs(60), census),
    ];
    // Criterion 7 asks for a failure of the printed ratio at an instance
    // where it provably coincides with the slope reading; it stays red.
    let known_red = [7];
    let mut unexpected = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!("error: {e}"),
        });
        let elapsed = start.elapsed();
        let timely = elapsed <= budget;
        let pass = outcome.pass && timely;
        let status = if pass { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {id:>2} {name}: {} [{:.3}s of {:.3}s]",
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        );
        if !pass && !(known_red.contains(&id) && timely) {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
