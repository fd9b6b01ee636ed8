//! Desk-scale verification suites.
//!
//! Each suite checks a family of statements exhaustively up to a bound and
//! returns a [`SuiteReport`]. Reports contain no timings or thread-dependent
//! data, so the same inputs always give the same report.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{certified_compare, certified_sign, Comparison, RealEnclosure};
use crate::error::{Error, Result};
use crate::farey::{CoprimePair, FareyFraction};
use crate::fock::{
    dehn_asymptotics, derivative_gap, finite_difference_derivative, psi, psi_derivative_with,
    sigma_minus, sigma_minus_closed_form, sigma_plus, sigma_plus_closed_form, Radical, Side,
    SlopeEvaluator, MAX_WORKING_BITS,
};
use crate::markov::markov_number;
use crate::norm::{sphere_point, stable_norm};
use crate::ordering::{
    find_antimodal, slope_regime, verify_monotone_regime, Classification, SegmentReading, Slope,
    SlopeRegime, SupportPlaneComparator, SupportVerdict,
};

/// How many failing cases a check keeps verbatim.
const KEPT_FAILURES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Aigner,
    Llrs,
    Thm11,
    Thm14,
    Dehn,
    Derivatives,
    Convexity,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Aigner,
        Suite::Llrs,
        Suite::Thm11,
        Suite::Thm14,
        Suite::Dehn,
        Suite::Derivatives,
        Suite::Convexity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Aigner => "aigner",
            Suite::Llrs => "llrs",
            Suite::Thm11 => "thm11",
            Suite::Thm14 => "thm14",
            Suite::Dehn => "dehn",
            Suite::Derivatives => "derivatives",
            Suite::Convexity => "convexity",
        }
    }

    /// A bound that finishes in a few seconds.
    pub fn default_bound(self) -> u64 {
        match self {
            Suite::Aigner | Suite::Llrs | Suite::Thm11 => 100,
            Suite::Thm14 => 40,
            Suite::Dehn => 10,
            Suite::Derivatives => 12,
            Suite::Convexity => 30,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// Outcome of one named check inside a suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub cases: u64,
    pub failure_count: u64,
    /// The first few failures, in enumeration order.
    pub failures: Vec<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub bound: u64,
    pub checks: Vec<CheckReport>,
    /// Facts established along the way that are not pass/fail.
    pub notes: Vec<String>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(suite: Suite, bound: u64, checks: Vec<CheckReport>, notes: Vec<String>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        SuiteReport {
            suite,
            bound,
            checks,
            notes,
            passed,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Accumulates cases for a [`CheckReport`].
#[derive(Clone, Debug, Default)]
struct Tally {
    cases: u64,
    failure_count: u64,
    failures: Vec<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(describe());
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.failure_count += other.failure_count;
        let room = KEPT_FAILURES - self.failures.len();
        self.failures.extend(other.failures.into_iter().take(room));
        self
    }

    fn finish(self, name: &str) -> CheckReport {
        CheckReport {
            name: name.to_string(),
            cases: self.cases,
            failure_count: self.failure_count,
            passed: self.failure_count == 0,
            failures: self.failures,
        }
    }
}

/// A single yes/no check.
fn single(name: &str, ok: bool, describe: impl FnOnce() -> String) -> CheckReport {
    let mut t = Tally::default();
    t.record(ok, describe);
    t.finish(name)
}

/// Markov numbers of every coprime sector pair with `q <= bound`.
pub struct LabelTable {
    rows: Vec<Vec<Option<BigInt>>>,
}

impl LabelTable {
    pub fn build(bound: u64) -> Result<Self> {
        let rows = (0..=bound)
            .into_par_iter()
            .map(|q| {
                (0..=q)
                    .map(|p| match q > 0 && q.gcd(&p) == 1 {
                        true => markov_number(FareyFraction::new(p, q)?).map(Some),
                        false => Ok(None),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LabelTable { rows })
    }

    pub fn bound(&self) -> u64 {
        self.rows.len() as u64 - 1
    }

    pub fn get(&self, q: u64, p: u64) -> Option<&BigInt> {
        self.rows.get(q as usize)?.get(p as usize)?.as_ref()
    }
}

/// Labels along a sequence of sector points must strictly increase.
fn increasing_along(
    table: &LabelTable,
    points: impl Iterator<Item = (u64, u64)>,
    tally: &mut Tally,
) {
    let mut prev: Option<((u64, u64), &BigInt)> = None;
    for (q, p) in points {
        let Some(m) = table.get(q, p) else { continue };
        if let Some((pt, m0)) = prev {
            tally.record(m0 < m, || {
                format!("({},{}) -> {m0} but ({q},{p}) -> {m}", pt.0, pt.1)
            });
        }
        prev = Some(((q, p), m));
    }
}

/// Aigner's three monotonicity properties for coprime pairs with `q <= bound`:
/// increasing in `q` at fixed `p`, in `p` at fixed `q`, and in `q` along
/// `p + q` constant. Consecutive pairs suffice by transitivity.
pub fn aigner(bound: u64) -> Result<SuiteReport> {
    let table = LabelTable::build(bound)?;
    let mut fixed_p = Tally::default();
    for p in 0..=bound {
        increasing_along(&table, (p.max(1)..=bound).map(|q| (q, p)), &mut fixed_p);
    }
    let mut fixed_q = Tally::default();
    for q in 1..=bound {
        increasing_along(&table, (0..=q).map(|p| (q, p)), &mut fixed_q);
    }
    let mut fixed_sum = Tally::default();
    for s in 1..=2 * bound {
        let q_lo = s.div_ceil(2);
        increasing_along(
            &table,
            (q_lo..=s.min(bound)).map(|q| (q, s - q)),
            &mut fixed_sum,
        );
    }
    Ok(SuiteReport::new(
        Suite::Aigner,
        bound,
        vec![
            fixed_p.finish("increasing in q at fixed p"),
            fixed_q.finish("increasing in p at fixed q"),
            fixed_sum.finish("increasing in q along p + q constant"),
        ],
        Vec::new(),
    ))
}

/// The slopes whose lines are monotone (first two) and the slopes with
/// non-monotone lines (last two) in the LLRS statement.
pub fn llrs_slopes() -> ([Slope; 2], [Slope; 2]) {
    let s = |u, v| Slope::new(u, v).expect("non-vertical");
    ([s(8, 7), s(5, 4)], [s(7, 6), s(6, 5)])
}

fn monotone_check(slope: Slope, bound: u64) -> Result<CheckReport> {
    let report = verify_monotone_regime(slope, bound)?;
    let expected = match report.expected {
        Classification::Increasing => "increasing",
        _ => "decreasing",
    };
    let mut t = Tally::default();
    for _ in 0..report.trivial + report.monotone {
        t.record(true, String::new);
    }
    for f in &report.failures {
        t.record(false, || format!("{} is {:?}", f.line, f.classification));
    }
    Ok(t.finish(&format!("every slope {slope} line is {expected}")))
}

fn antimodal_check(slope: Slope, k_max: u64, notes: &mut Vec<String>) -> Result<CheckReport> {
    let search = find_antimodal(slope, 2, k_max, Some(1))?;
    let found = search.witnesses.first();
    if let Some(w) = found {
        notes.push(format!(
            "slope {slope}: strictly antimodal {} with {} points, {:?}",
            w.line,
            w.points.len(),
            w.classification
        ));
    }
    Ok(single(
        &format!("a slope {slope} line is strictly antimodal"),
        found.is_some(),
        || format!("no witness for k <= {}", search.k_reached),
    ))
}

/// Monotone lines at `-8/7` and `-5/4` up to `bound`, and antimodal
/// witnesses at `-7/6` and `-6/5` with base index up to `k_max`.
pub fn llrs(bound: u64, k_max: u64) -> Result<SuiteReport> {
    let (monotone, mixed) = llrs_slopes();
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    for slope in monotone {
        checks.push(monotone_check(slope, bound)?);
    }
    for slope in mixed {
        checks.push(antimodal_check(slope, k_max, &mut notes)?);
    }
    Ok(SuiteReport::new(Suite::Llrs, bound, checks, notes))
}

/// The closed forms and the bracketing chain
/// `-5/4 < sigma_- < -6/5 < -7/6 < sigma_+ < -8/7`.
pub fn constants_checks(precision_bits: u32) -> Result<Vec<CheckReport>> {
    let sm = sigma_minus(precision_bits)?;
    let sp = sigma_plus(precision_bits)?;
    let smc = sigma_minus_closed_form(precision_bits)?;
    let spc = sigma_plus_closed_form(precision_bits)?;
    let mut checks = vec![
        single("sigma_- matches its closed form", sm.overlaps(&smc), || {
            format!("{sm} vs {smc}")
        }),
        single("sigma_+ matches its closed form", sp.overlaps(&spc), || {
            format!("{sp} vs {spc}")
        }),
    ];
    let sm_r = |wp: u32| sigma_minus(wp).expect("sigma_- refines");
    let sp_r = |wp: u32| sigma_plus(wp).expect("sigma_+ refines");
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let chain: [(&str, &dyn crate::arith::Refinable); 6] = [
        ("-5/4", &q(-5, 4)),
        ("sigma_-", &sm_r),
        ("-6/5", &q(-6, 5)),
        ("-7/6", &q(-7, 6)),
        ("sigma_+", &sp_r),
        ("-8/7", &q(-8, 7)),
    ];
    let mut t = Tally::default();
    for w in chain.windows(2) {
        let c = certified_compare(w[0].1, w[1].1);
        t.record(c == Comparison::Less, || {
            format!("{} < {} gave {c:?}", w[0].0, w[1].0)
        });
    }
    checks.push(t.finish("-5/4 < sigma_- < -6/5 < -7/6 < sigma_+ < -8/7"));
    Ok(checks)
}

/// Slopes outside `[sigma_-, sigma_+]` checked for monotone lines, and
/// slopes inside it searched for antimodal lines.
pub fn thm11_slopes() -> (Vec<Slope>, Vec<Slope>) {
    let s = |u, v| Slope::new(u, v).expect("non-vertical");
    (
        vec![
            s(3, 1),
            s(2, 1),
            s(3, 2),
            s(4, 3),
            s(5, 4),
            s(8, 7),
            s(9, 8),
            s(1, 1),
            s(1, 2),
            s(0, 1),
            s(-1, 1),
        ],
        vec![s(6, 5), s(11, 9), s(7, 6), s(13, 11)],
    )
}

/// Regimes of sample slopes, monotone lines outside `[sigma_-, sigma_+]` up
/// to `bound`, and antimodal witnesses inside it.
pub fn thm11(bound: u64) -> Result<SuiteReport> {
    let mut checks = constants_checks(160)?;
    let mut notes = Vec::new();
    let (outside, inside) = thm11_slopes();
    let mut regimes = Tally::default();
    for &slope in &outside {
        let r = slope_regime(slope)?;
        regimes.record(r != SlopeRegime::Between, || {
            format!("{slope} classified {r:?}")
        });
    }
    for &slope in &inside {
        let r = slope_regime(slope)?;
        regimes.record(r == SlopeRegime::Between, || {
            format!("{slope} classified {r:?}")
        });
    }
    checks.push(regimes.finish("sample slopes fall in the expected regimes"));
    for &slope in &outside {
        checks.push(monotone_check(slope, bound)?);
    }
    for &slope in &inside {
        checks.push(antimodal_check(slope, 10 * bound, &mut notes)?);
    }
    Ok(SuiteReport::new(Suite::Thm11, bound, checks, notes))
}

/// Result of running the support-plane comparator over all ordered pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoundnessCount {
    pub comparisons: u64,
    pub conclusions: u64,
    pub contradictions: u64,
    /// First contradictions as `(base, other)`.
    pub examples: Vec<(CoprimePair, CoprimePair)>,
}

impl SoundnessCount {
    fn merge(mut self, o: SoundnessCount) -> SoundnessCount {
        self.comparisons += o.comparisons;
        self.conclusions += o.conclusions;
        self.contradictions += o.contradictions;
        let room = KEPT_FAILURES - self.examples.len();
        self.examples.extend(o.examples.into_iter().take(room));
        self
    }
}

/// Every conclusion of the comparator over coprime pairs with
/// `q, q' <= bound`, checked against the exact labels.
pub fn support_plane_soundness(bound: u64, reading: SegmentReading) -> Result<SoundnessCount> {
    let pairs: Vec<CoprimePair> = CoprimePair::enumerate(bound).collect();
    let table = LabelTable::build(bound)?;
    let labels: Vec<&BigInt> = pairs
        .iter()
        .map(|c| table.get(c.q(), c.p()).expect("coprime"))
        .collect();
    let per_base = pairs
        .par_iter()
        .enumerate()
        .map(|(i, &base)| -> Result<SoundnessCount> {
            let cmp = SupportPlaneComparator::new(base)?;
            let mut count = SoundnessCount::default();
            for (j, &other) in pairs.iter().enumerate() {
                if i == j {
                    continue;
                }
                count.comparisons += 1;
                if cmp.compare_with(other, reading)? == SupportVerdict::ConcludesBasePrecedesOther {
                    count.conclusions += 1;
                    if labels[i] >= labels[j] {
                        count.contradictions += 1;
                        if count.examples.len() < KEPT_FAILURES {
                            count.examples.push((base, other));
                        }
                    }
                }
            }
            Ok(count)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_base
        .into_iter()
        .fold(SoundnessCount::default(), SoundnessCount::merge))
}

/// Verdicts of both readings on one instance, in both orientations, with
/// the exact order.
pub fn reading_instance(a: CoprimePair, b: CoprimePair) -> Result<String> {
    let ma = markov_number(a.fraction())?;
    let mb = markov_number(b.fraction())?;
    let mut parts = vec![format!("m{a} = {ma}, m{b} = {mb}")];
    for (base, other) in [(a, b), (b, a)] {
        let cmp = SupportPlaneComparator::new(base)?;
        for reading in [SegmentReading::Slope, SegmentReading::InvertedRatio] {
            parts.push(format!(
                "base {base} {reading:?}: {:?}",
                cmp.compare_with(other, reading)?
            ));
        }
    }
    Ok(parts.join("; "))
}

/// `true` if the inverted ratio concludes `base` precedes `other` while the
/// exact labels say otherwise.
pub fn inverted_ratio_contradicts(base: CoprimePair, other: CoprimePair) -> Result<bool> {
    let concludes = SupportPlaneComparator::new(base)?
        .compare_with(other, SegmentReading::InvertedRatio)?
        == SupportVerdict::ConcludesBasePrecedesOther;
    Ok(concludes && markov_number(base.fraction())? >= markov_number(other.fraction())?)
}

/// Soundness of the support-plane comparator with the slope reading, and
/// contradictions produced by the inverted ratio.
pub fn thm14(bound: u64) -> Result<SuiteReport> {
    let slope = support_plane_soundness(bound, SegmentReading::Slope)?;
    let inverted = support_plane_soundness(bound, SegmentReading::InvertedRatio)?;
    let mut sound = Tally {
        cases: slope.conclusions,
        ..Tally::default()
    };
    sound.failure_count = slope.contradictions;
    sound.failures = slope
        .examples
        .iter()
        .map(|(a, b)| format!("concluded {a} precedes {b}"))
        .collect();
    let c = |q, p| CoprimePair::new(q, p).expect("coprime");
    let mut notes = vec![
        format!(
            "slope reading: {} comparisons, {} conclusions, {} contradictions",
            slope.comparisons, slope.conclusions, slope.contradictions
        ),
        format!(
            "inverted ratio: {} conclusions, {} contradictions, first {:?}",
            inverted.conclusions,
            inverted.contradictions,
            inverted
                .examples
                .first()
                .map(|(a, b)| format!("{a} vs {b}"))
        ),
    ];
    let mut checks = vec![
        sound.finish("slope reading never contradicts the exact order"),
        single(
            "inverted ratio contradicts the exact order",
            inverted.contradictions > 0,
            || "no contradiction found".into(),
        ),
    ];
    if bound >= 5 {
        notes.push(reading_instance(c(4, 3), c(5, 2))?);
        notes.push(reading_instance(c(4, 3), c(5, 1))?);
        checks.push(single(
            "inverted ratio fails at ((4,3),(5,1))",
            inverted_ratio_contradicts(c(4, 3), c(5, 1))?,
            || "no contradiction".into(),
        ));
    }
    Ok(SuiteReport::new(Suite::Thm14, bound, checks, notes))
}

/// Fractions used for the Dehn twist asymptotics.
pub fn dehn_samples() -> Vec<FareyFraction> {
    [(1, 2), (1, 3), (1, 4), (2, 5), (3, 7)]
        .into_iter()
        .map(|(p, q)| FareyFraction::new(p, q).expect("reduced"))
        .collect()
}

/// Residuals of the twist asymptotics shrink in absolute value for
/// `k = 3..=k_max`, and the rescaled residuals stay within a factor of 100.
pub fn dehn(k_max: u64) -> Result<SuiteReport> {
    let k_max = k_max.max(4);
    let tables = dehn_samples()
        .into_par_iter()
        .map(|t| dehn_asymptotics(t, k_max))
        .collect::<Result<Vec<_>>>()?;
    let mut decay = Tally::default();
    let mut band = Tally::default();
    let mut notes = Vec::new();
    for table in &tables {
        let rows = &table.rows[3..];
        for w in rows.windows(2) {
            decay.record(w[1].residual.abs_hi() < w[0].residual.abs_lo(), || {
                format!(
                    "at {}: |r({})| = {} not below |r({})| = {}",
                    table.at, w[1].k, w[1].residual, w[0].k, w[0].residual
                )
            });
        }
        let hi = rows
            .iter()
            .map(|r| r.scaled_residual.abs_hi())
            .max()
            .expect("rows");
        let lo = rows
            .iter()
            .map(|r| r.scaled_residual.abs_lo())
            .min()
            .expect("rows");
        band.record(
            lo.is_positive()
                && hi.to_rational() <= lo.to_rational() * BigRational::from_integer(100.into()),
            || {
                format!(
                    "at {}: scaled residuals span [{}, {}]",
                    table.at,
                    lo.to_f64(),
                    hi.to_f64()
                )
            },
        );
        notes.push(format!(
            "{}: scaled residuals between {:.6e} and {:.6e}",
            table.at,
            lo.to_f64(),
            hi.to_f64()
        ));
    }
    Ok(SuiteReport::new(
        Suite::Dehn,
        k_max,
        vec![
            decay.finish("residuals decrease in absolute value"),
            band.finish("rescaled residuals stay within a factor of 100"),
        ],
        notes,
    ))
}

/// Reduced fractions in `[0, 1/2]` with denominator at most `bound`, sorted.
pub fn lower_half_fractions(bound: u64) -> Vec<FareyFraction> {
    let mut v: Vec<FareyFraction> = (1..=bound)
        .flat_map(|q| {
            (0..=q / 2)
                .filter(move |&p| q.gcd(&p) == 1)
                .map(move |p| FareyFraction::new(p, q).expect("reduced"))
        })
        .collect();
    v.sort();
    v
}

/// Twist index at which the closed-form derivatives are compared with
/// difference quotients.
pub const ORACLE_K: u64 = 20;

/// Tolerance of that comparison.
pub fn oracle_tolerance() -> BigRational {
    BigRational::new(1.into(), 10_000.into())
}

/// Closed-form one-sided derivatives of `Psi` against difference quotients
/// along twist sequences, for denominators up to `bound`.
pub fn derivatives(bound: u64) -> Result<SuiteReport> {
    let cases: Vec<(FareyFraction, Side)> = lower_half_fractions(bound)
        .into_iter()
        .flat_map(|t| {
            let sides = [
                (t != FareyFraction::ZERO).then_some(Side::Left),
                (t != FareyFraction::HALF).then_some(Side::Right),
            ];
            sides.into_iter().flatten().map(move |s| (t, s))
        })
        .collect();
    let tol = oracle_tolerance();
    let per_case = cases
        .par_iter()
        .map(|&(t, side)| -> Result<(Tally, Tally, bool)> {
            let gaps = (5..=ORACLE_K)
                .map(|k| derivative_gap(t, side, k))
                .collect::<Result<Vec<_>>>()?;
            let mut close = Tally::default();
            let last = gaps.last().expect("non-empty");
            close.record(last.abs_hi().to_rational() < tol, || {
                format!("{t} {side:?}: gap {last} at k = {ORACLE_K}")
            });
            let mut shrink = Tally::default();
            for (i, w) in gaps.windows(2).enumerate() {
                shrink.record(w[1].abs_hi() < w[0].abs_lo(), || {
                    format!(
                        "{t} {side:?}: gap at k = {} is {} after {}",
                        i + 6,
                        w[1],
                        w[0]
                    )
                });
            }
            let fd = finite_difference_derivative(t, side, ORACLE_K, 64)?;
            let far_off = match psi_derivative_with(t, side, Radical::FarNeighbour, 64) {
                Ok(alt) => (alt.to_f64() - fd.to_f64()).abs() > 1e-3,
                Err(_) => true,
            };
            Ok((close, shrink, far_off))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut close = Tally::default();
    let mut shrink = Tally::default();
    let mut far_off = 0u64;
    for (c, s, f) in per_case {
        close = close.merge(c);
        shrink = shrink.merge(s);
        far_off += f as u64;
    }
    let notes = vec![format!(
        "the alternative radical sqrt(9 n_far^2 - 4) misses the difference quotient by more than 1e-3 in {far_off} of {} cases",
        cases.len()
    )];
    Ok(SuiteReport::new(
        Suite::Derivatives,
        bound,
        vec![
            close.finish("difference quotients at k = 20 within 1e-4"),
            shrink.finish("gaps shrink for k >= 5"),
            single("the alternative radical is rejected", far_off > 0, || {
                "it matched everywhere".into()
            }),
        ],
        notes,
    ))
}

/// Bounds used by the convexity suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexityBounds {
    /// Sphere points with `q` up to this are checked for positive turning.
    pub turning: u64,
    /// Corner slopes are compared for `q` up to this.
    pub slopes: u64,
    /// Chords of `Psi` between consecutive fractions with this denominator bound.
    pub chords: u64,
    /// Corners with `q` up to this are tested as support lines ...
    pub support_corners: u64,
    /// ... against all directions with `q` up to this.
    pub support_others: u64,
}

impl ConvexityBounds {
    pub fn from_bound(bound: u64) -> Self {
        ConvexityBounds {
            turning: bound,
            slopes: bound / 2,
            chords: bound / 2,
            support_corners: bound * 3 / 10,
            support_others: bound * 6 / 10,
        }
    }
}

/// Directions `(q, p)` of the sector with `q <= bound`, ordered by angle.
pub fn sector_directions(bound: u64) -> Vec<CoprimePair> {
    let mut v: Vec<CoprimePair> = CoprimePair::enumerate(bound).collect();
    v.sort_by_key(|c| c.fraction());
    v
}

/// Sphere points at working precision `wp`.
fn sphere_xy(c: CoprimePair, wp: u32) -> (RealEnclosure, RealEnclosure) {
    let s = sphere_point(c, wp).expect("sector directions have sphere points");
    (s.x, s.y)
}

/// Cross product of `b - a` and `c - b` for sphere points of three
/// directions.
fn turning(pts: [&(RealEnclosure, RealEnclosure); 3]) -> RealEnclosure {
    let [a, b, c] = pts;
    let (d1x, d1y) = (b.0.sub(&a.0), b.1.sub(&a.1));
    let (d2x, d2y) = (c.0.sub(&b.0), c.1.sub(&b.1));
    d1x.mul(&d2y).sub(&d1y.mul(&d2x))
}

/// Strictly positive turning of consecutive sphere points.
fn turning_check(bound: u64) -> Result<CheckReport> {
    let dirs = sector_directions(bound);
    let pts: Vec<_> = dirs.par_iter().map(|&c| sphere_xy(c, 256)).collect();
    let tallies: Vec<Tally> = (0..dirs.len().saturating_sub(2))
        .into_par_iter()
        .map(|i| {
            let mut t = Tally::default();
            let fast = turning([&pts[i], &pts[i + 1], &pts[i + 2]]);
            let ok = fast.certainly_positive() || {
                let trio = [dirs[i], dirs[i + 1], dirs[i + 2]];
                let slow = |wp: u32| {
                    let p: Vec<_> = trio.iter().map(|&c| sphere_xy(c, wp)).collect();
                    turning([&p[0], &p[1], &p[2]])
                };
                certified_sign(&slow) == Comparison::Greater
            };
            t.record(ok, || {
                format!("turning at {} {} {}", dirs[i], dirs[i + 1], dirs[i + 2])
            });
            t
        })
        .collect();
    Ok(tallies
        .into_iter()
        .fold(Tally::default(), Tally::merge)
        .finish("sphere points turn strictly left"))
}

/// A corner slope as a refinable real.
struct CornerSlope(SlopeEvaluator);

impl crate::arith::Refinable for CornerSlope {
    fn enclose(&self, precision_bits: u32) -> RealEnclosure {
        self.0
            .enclose(precision_bits)
            .expect("corner slopes refine at every precision")
    }
}

fn corner(c: CoprimePair, side: Side) -> Result<Option<CornerSlope>> {
    Ok(SlopeEvaluator::new(c, side)?.map(CornerSlope))
}

/// Corner-slope ordering along the sector and the global bounds
/// `sigma_- <= mu_- < mu_+ <= sigma_+`.
fn slope_checks(bound: u64) -> Result<Vec<CheckReport>> {
    let dirs = sector_directions(bound);
    let corners = dirs
        .par_iter()
        .map(|&c| Ok((corner(c, Side::Left)?, corner(c, Side::Right)?)))
        .collect::<Result<Vec<_>>>()?;
    let less = |a: &CornerSlope, b: &CornerSlope| certified_compare(a, b) == Comparison::Less;
    let mut ordering = Tally::default();
    for (i, w) in corners.windows(2).enumerate() {
        let (Some(plus), Some(minus)) = (&w[0].1, &w[1].0) else {
            continue;
        };
        ordering.record(less(plus, minus), || {
            format!("mu_+ at {} vs mu_- at {}", dirs[i], dirs[i + 1])
        });
    }
    let sm = |wp: u32| sigma_minus(wp).expect("sigma_- refines");
    let sp = |wp: u32| sigma_plus(wp).expect("sigma_+ refines");
    let mut bounds = Tally::default();
    for (c, (minus, plus)) in dirs.iter().zip(&corners) {
        if c.p() == 0 || c.p() == c.q() {
            continue;
        }
        let (minus, plus) = (
            minus.as_ref().expect("interior"),
            plus.as_ref().expect("interior"),
        );
        let lower = certified_compare(&sm, minus);
        let upper = certified_compare(plus, &sp);
        let ok = matches!(lower, Comparison::Less | Comparison::Equal)
            && less(minus, plus)
            && matches!(upper, Comparison::Less | Comparison::Equal);
        bounds.record(ok, || {
            format!("corner {c}: sigma_- vs mu_- {lower:?}, mu_+ vs sigma_+ {upper:?}")
        });
    }
    Ok(vec![
        ordering.finish("mu_+ at p/q below mu_- at the next direction"),
        bounds.finish("sigma_- <= mu_- < mu_+ <= sigma_+ at interior corners"),
    ])
}

/// Chord slopes of `Psi` between consecutive fractions of `[0, 1/2]` are
/// non-decreasing.
fn chord_check(bound: u64) -> Result<CheckReport> {
    let fr = lower_half_fractions(bound);
    let chord = |a: FareyFraction, b: FareyFraction, wp: u32| -> RealEnclosure {
        let dt = BigRational::new(b.p().into(), b.q().into())
            - BigRational::new(a.p().into(), a.q().into());
        let dpsi = psi(b, wp)
            .expect("in range")
            .sub(&psi(a, wp).expect("in range"));
        dpsi.div(&RealEnclosure::from_rational(&dt, wp))
            .expect("distinct fractions")
    };
    let tallies: Vec<Tally> = (0..fr.len().saturating_sub(2))
        .into_par_iter()
        .map(|i| {
            let (a, b, c) = (fr[i], fr[i + 1], fr[i + 2]);
            let left = |wp: u32| chord(a, b, wp);
            let right = |wp: u32| chord(b, c, wp);
            let mut t = Tally::default();
            let cmp = certified_compare(&left, &right);
            t.record(matches!(cmp, Comparison::Less | Comparison::Equal), || {
                format!("chords at {a} {b} {c}: {cmp:?}")
            });
            t
        })
        .collect();
    Ok(tallies
        .into_iter()
        .fold(Tally::default(), Tally::merge)
        .finish("chord slopes of Psi increase"))
}

/// For each corner `c` and a rational `s` strictly between its corner slopes,
/// every other direction `d` satisfies `phi(d)/||d|| < phi(c)/||c||` where
/// `phi(x) = p - s q`: the line of slope `s` through the sphere point of `c`
/// supports the ball.
fn support_line_check(corners: u64, others: u64) -> Result<CheckReport> {
    let dirs = sector_directions(others);
    let norms: Vec<RealEnclosure> = dirs
        .par_iter()
        .map(|c| stable_norm(c.q(), c.p(), 192))
        .collect::<Result<Vec<_>>>()?;
    let tallies = dirs
        .par_iter()
        .enumerate()
        .filter(|(_, c)| c.q() <= corners && c.p() > 0 && c.p() < c.q())
        .map(|(i, &c)| -> Result<Tally> {
            let minus = SlopeEvaluator::new(c, Side::Left)?.expect("interior");
            let plus = SlopeEvaluator::new(c, Side::Right)?.expect("interior");
            let mut wp = 64;
            let s = loop {
                let (lo, hi) = (
                    minus.enclose(wp)?.hi().to_rational(),
                    plus.enclose(wp)?.lo().to_rational(),
                );
                if lo < hi {
                    break simplest_between(&lo, &hi);
                }
                if wp >= MAX_WORKING_BITS {
                    return Err(Error::UndecidedAtCap(format!("corner slopes at {c}")));
                }
                wp *= 2;
            };
            let phi = |d: CoprimePair| {
                BigRational::from_integer(d.p().into())
                    - &s * BigRational::from_integer(d.q().into())
            };
            let phi_c = phi(c);
            let mut t = Tally::default();
            for (j, &d) in dirs.iter().enumerate() {
                if j == i {
                    continue;
                }
                // phi(d) ||c|| < phi(c) ||d||
                let lhs = |wp: u32| {
                    let nc = if wp <= 192 {
                        norms[i].clone()
                    } else {
                        stable_norm(c.q(), c.p(), wp).expect("norm")
                    };
                    nc.mul(&RealEnclosure::from_rational(&phi(d), wp))
                };
                let rhs = |wp: u32| {
                    let nd = if wp <= 192 {
                        norms[j].clone()
                    } else {
                        stable_norm(d.q(), d.p(), wp).expect("norm")
                    };
                    nd.mul(&RealEnclosure::from_rational(&phi_c, wp))
                };
                let cmp = certified_compare(&lhs, &rhs);
                t.record(cmp == Comparison::Less, || {
                    format!("corner {c}, slope {s}: direction {d} gives {cmp:?}")
                });
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tallies
        .into_iter()
        .fold(Tally::default(), Tally::merge)
        .finish("lines between corner slopes support the ball"))
}

/// The rational with smallest denominator in the open interval `(a, b)`,
/// found by descending the Stern-Brocot tree.
pub fn simplest_between(a: &BigRational, b: &BigRational) -> BigRational {
    assert!(a < b, "empty interval");
    let next = a.floor() + BigRational::one();
    if &next < b {
        return next;
    }
    let fl = a.floor();
    let (fa, fb) = (a - &fl, b - &fl);
    if fa.is_zero() {
        return fl + (fb.recip().floor() + BigRational::one()).recip();
    }
    fl + simplest_between(&fb.recip(), &fa.recip()).recip()
}

/// Turning of sphere points, corner-slope ordering, global slope bounds,
/// chord convexity of `Psi` and support lines at corners.
pub fn convexity(bounds: ConvexityBounds) -> Result<SuiteReport> {
    let mut checks = vec![turning_check(bounds.turning)?];
    checks.extend(slope_checks(bounds.slopes)?);
    checks.push(chord_check(bounds.chords)?);
    checks.push(support_line_check(
        bounds.support_corners,
        bounds.support_others,
    )?);
    Ok(SuiteReport::new(
        Suite::Convexity,
        bounds.turning,
        checks,
        Vec::new(),
    ))
}

/// Run `suite` at `bound`, with the bound read as documented on each suite.
pub fn run_suite(suite: Suite, bound: u64) -> Result<SuiteReport> {
    match suite {
        Suite::Aigner => aigner(bound),
        Suite::Llrs => llrs(bound, 10_000),
        Suite::Thm11 => thm11(bound),
        Suite::Thm14 => thm14(bound),
        Suite::Dehn => dehn(bound),
        Suite::Derivatives => derivatives(bound),
        Suite::Convexity => convexity(ConvexityBounds::from_bound(bound)),
    }
}
