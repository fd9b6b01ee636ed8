//! The Markov ordering on sector points and its behaviour along lattice lines.
//!
//! Slopes are `dp/dq` in the `(q, p)`-plane with `q` horizontal. A line of
//! slope `-u/v` (with `v > 0`, `gcd(u, v) = 1`) has direction `(v, -u)` and is
//! determined by the value of `u q + v p` on it.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{certified_compare, Comparison, RealEnclosure};
use crate::error::{Error, Result};
use crate::farey::{CoprimePair, FareyFraction};
use crate::fock::{sigma_minus, sigma_plus, Side, SlopeEvaluator};
use crate::markov::{markov_distance, markov_number};

/// A non-zero point `(q, p)` with `q >= p >= 0`, not necessarily primitive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SectorPoint {
    pub q: u64,
    pub p: u64,
}

impl SectorPoint {
    pub fn new(q: u64, p: u64) -> Result<Self> {
        if p > q || q == 0 {
            return Err(Error::NotInSector {
                x: q as i64,
                y: p as i64,
            });
        }
        Ok(SectorPoint { q, p })
    }

    pub fn is_primitive(self) -> bool {
        self.q.gcd(&self.p) == 1
    }

    pub fn distance(self) -> Result<BigRational> {
        markov_distance(self.q, self.p)
    }
}

impl From<CoprimePair> for SectorPoint {
    fn from(c: CoprimePair) -> Self {
        SectorPoint { q: c.q(), p: c.p() }
    }
}

impl fmt::Display for SectorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.q, self.p)
    }
}

/// Exact comparison of Markov distances; `Less` means `a` precedes `b`.
pub fn compare_markov(a: SectorPoint, b: SectorPoint) -> Result<Ordering> {
    if a.is_primitive() && b.is_primitive() {
        let ma = markov_number(FareyFraction::new(a.p, a.q)?)?;
        let mb = markov_number(FareyFraction::new(b.p, b.q)?)?;
        return Ok(ma.cmp(&mb));
    }
    Ok(a.distance()?.cmp(&b.distance()?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SupportVerdict {
    ConcludesBasePrecedesOther,
    Inconclusive,
}

/// How the segment from `base` to `other` is turned into a number to compare
/// with the corner slopes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentReading {
    /// `(p' - p)/(q' - q)`, a `dp/dq` slope like the corner slopes.
    Slope,
    /// `(q' - q)/(p' - p)`, the inverted ratio.
    InvertedRatio,
}

/// Corner slopes of one base point, prepared for many comparisons.
pub struct SupportPlaneComparator {
    base: CoprimePair,
    minus: Option<(SlopeEvaluator, RealEnclosure, f64, f64)>,
    plus: Option<(SlopeEvaluator, RealEnclosure, f64, f64)>,
}

const FAST_PATH_BITS: u32 = 128;

fn prepared(
    ev: Option<SlopeEvaluator>,
) -> Result<Option<(SlopeEvaluator, RealEnclosure, f64, f64)>> {
    let Some(ev) = ev else { return Ok(None) };
    let e = ev.enclose(FAST_PATH_BITS)?;
    let (lo, hi) = (e.lo().to_f64(), e.hi().to_f64());
    Ok(Some((ev, e, lo, hi)))
}

/// Certified `x` versus the slope, refining the slope as needed.
fn compare_to_slope(
    num: i64,
    den: i64,
    slope: &(SlopeEvaluator, RealEnclosure, f64, f64),
) -> Comparison {
    let (ev, e, lo, hi) = slope;
    let x_f = num as f64 / den as f64;
    let margin = 1e-12 * x_f.abs().max(1.0);
    if x_f > hi + margin {
        return Comparison::Greater;
    }
    if x_f < lo - margin {
        return Comparison::Less;
    }
    let x = &BigRational::new(BigInt::from(num), BigInt::from(den));
    if x < &e.lo().to_rational() {
        return Comparison::Less;
    }
    if x > &e.hi().to_rational() {
        return Comparison::Greater;
    }
    let refine = |wp: u32| {
        ev.enclose(wp)
            .expect("corner slopes refine at every precision")
    };
    certified_compare(x, &refine)
}

impl SupportPlaneComparator {
    pub fn new(base: CoprimePair) -> Result<Self> {
        Ok(SupportPlaneComparator {
            base,
            minus: prepared(SlopeEvaluator::new(base, Side::Left)?)?,
            plus: prepared(SlopeEvaluator::new(base, Side::Right)?)?,
        })
    }

    pub fn base(&self) -> CoprimePair {
        self.base
    }

    pub fn compare(&self, other: CoprimePair) -> Result<SupportVerdict> {
        self.compare_with(other, SegmentReading::Slope)
    }

    pub fn compare_with(
        &self,
        other: CoprimePair,
        reading: SegmentReading,
    ) -> Result<SupportVerdict> {
        let (q, p) = (self.base.q() as i64, self.base.p() as i64);
        let (q2, p2) = (other.q() as i64, other.p() as i64);
        if (q, p) == (q2, p2) {
            return Err(Error::Parse(format!("base and other are both {other}")));
        }
        let (dq, dp) = (q2 - q, p2 - p);
        let conclude = |b: bool| {
            if b {
                SupportVerdict::ConcludesBasePrecedesOther
            } else {
                SupportVerdict::Inconclusive
            }
        };
        if dq == 0 {
            return Ok(conclude(dp > 0));
        }
        let (num, den) = match reading {
            SegmentReading::Slope => (dp, dq),
            SegmentReading::InvertedRatio => {
                if dp == 0 {
                    return Ok(SupportVerdict::Inconclusive);
                }
                (dq, dp)
            }
        };
        let verdict = if dq > 0 {
            match &self.minus {
                Some(mu) => matches!(
                    compare_to_slope(num, den, mu),
                    Comparison::Greater | Comparison::Equal
                ),
                None => false,
            }
        } else {
            match &self.plus {
                Some(mu) => matches!(
                    compare_to_slope(num, den, mu),
                    Comparison::Less | Comparison::Equal
                ),
                None => false,
            }
        };
        Ok(conclude(verdict))
    }
}

/// Decide `base` precedes `other` from the corner slopes at `base` alone.
pub fn support_plane_compare(base: CoprimePair, other: CoprimePair) -> Result<SupportVerdict> {
    SupportPlaneComparator::new(base)?.compare(other)
}

/// A slope `-u/v` in lowest terms with `v > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slope {
    pub u: i64,
    pub v: i64,
}

impl Slope {
    /// The slope `-u/v`.
    pub fn new(u: i64, v: i64) -> Result<Self> {
        if v == 0 {
            return Err(Error::Parse("vertical slopes are not supported".into()));
        }
        let g = u.gcd(&v);
        let s = v.signum();
        Ok(Slope {
            u: s * u / g,
            v: s * v / g,
        })
    }

    pub fn value(self) -> BigRational {
        BigRational::new(BigInt::from(-self.u), BigInt::from(self.v))
    }

    /// Direction `(dq, dp) = (v, -u)`.
    pub fn direction(self) -> (i64, i64) {
        (self.v, -self.u)
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v == 1 {
            write!(f, "{}", -self.u)
        } else {
            write!(f, "{}/{}", -self.u, self.v)
        }
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected a slope like -7/6, got {s:?}"));
        let (n, d) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: i64 = n.parse().map_err(|_| bad())?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        if d <= 0 {
            return Err(bad());
        }
        Slope::new(-n, d)
    }
}

/// The points `base + k (v, -u)` for integer `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeLine {
    pub slope: Slope,
    pub base: (i64, i64),
}

impl LatticeLine {
    pub fn new(slope: Slope, base: (i64, i64)) -> Self {
        LatticeLine { slope, base }
    }

    /// `u q + v p`, constant along the line.
    pub fn invariant(&self) -> i64 {
        self.slope.u * self.base.0 + self.slope.v * self.base.1
    }

    /// Sector points with `q <= q_bound`, ordered by increasing `q`.
    pub fn sector_points(&self, q_bound: u64) -> Vec<SectorPoint> {
        let (dq, dp) = self.slope.direction();
        let (q0, p0) = self.base;
        let k_lo = Integer::div_ceil(&-q0, &dq);
        let k_hi = Integer::div_floor(&(q_bound as i64 - q0), &dq);
        (k_lo..=k_hi)
            .filter_map(|k| {
                let (q, p) = (q0 + k * dq, p0 + k * dp);
                (q >= p && p >= 0 && q > 0).then_some(SectorPoint {
                    q: q as u64,
                    p: p as u64,
                })
            })
            .collect()
    }
}

impl fmt::Display for LatticeLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "slope {} through ({},{})",
            self.slope, self.base.0, self.base.1
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScanMode {
    AllSector,
    CoprimeOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    Trivial,
    Increasing,
    Decreasing,
    /// Strictly decreasing up to the `j`-th point (1-based), then strictly
    /// increasing.
    StrictlyAntimodal(usize),
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanResult {
    pub line: LatticeLine,
    pub mode: ScanMode,
    pub points: Vec<SectorPoint>,
    #[serde(with = "rational_strings")]
    pub distances: Vec<BigRational>,
    pub classification: Classification,
    /// Index pairs of equal distances.
    pub ties: Vec<(usize, usize)>,
}

mod rational_strings {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

fn find_ties(d: &[BigRational]) -> Vec<(usize, usize)> {
    let mut idx: Vec<usize> = (0..d.len()).collect();
    idx.sort_by(|&a, &b| d[a].cmp(&d[b]).then(a.cmp(&b)));
    idx.windows(2)
        .filter(|w| d[w[0]] == d[w[1]])
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
        .collect()
}

/// Classify a sequence of distances.
pub fn classify(d: &[BigRational]) -> Classification {
    if d.len() <= 1 {
        return Classification::Trivial;
    }
    if !find_ties(d).is_empty() {
        return Classification::Other;
    }
    let down = d.windows(2).take_while(|w| w[1] < w[0]).count();
    let up = d[down..].windows(2).all(|w| w[1] > w[0]);
    match (down, up) {
        (0, true) => Classification::Increasing,
        (k, _) if k == d.len() - 1 => Classification::Decreasing,
        (k, true) => Classification::StrictlyAntimodal(k + 1),
        _ => Classification::Other,
    }
}

/// Scan the part of `line` inside the sector with `q <= q_bound`.
pub fn scan_line(line: LatticeLine, q_bound: u64, mode: ScanMode) -> Result<ScanResult> {
    let points: Vec<SectorPoint> = line
        .sector_points(q_bound)
        .into_iter()
        .filter(|pt| mode == ScanMode::AllSector || pt.is_primitive())
        .collect();
    let distances = points
        .iter()
        .map(|pt| pt.distance())
        .collect::<Result<Vec<_>>>()?;
    let ties = find_ties(&distances);
    let classification = classify(&distances);
    Ok(ScanResult {
        line,
        mode,
        points,
        distances,
        classification,
        ties,
    })
}

/// Certified position of a slope relative to `[sigma_-, sigma_+]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlopeRegime {
    BelowSigmaMinus,
    Between,
    AboveSigmaPlus,
}

pub fn slope_regime(slope: Slope) -> Result<SlopeRegime> {
    let r = slope.value();
    let sm = |wp: u32| sigma_minus(wp).expect("sigma_- refines");
    let sp = |wp: u32| sigma_plus(wp).expect("sigma_+ refines");
    let lower = certified_compare(&r, &sm).decided(&format!("slope {slope} against sigma_-"))?;
    if lower != Ordering::Greater {
        return Ok(SlopeRegime::BelowSigmaMinus);
    }
    let upper = certified_compare(&r, &sp).decided(&format!("slope {slope} against sigma_+"))?;
    Ok(if upper == Ordering::Less {
        SlopeRegime::Between
    } else {
        SlopeRegime::AboveSigmaPlus
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntimodalSearch {
    pub slope: Slope,
    pub k_start: u64,
    pub k_max: u64,
    /// Last base index actually scanned.
    pub k_reached: u64,
    pub witnesses: Vec<ScanResult>,
}

/// Scan lines of `slope` through `(k, k - 1)` for `k` in `k_start..=k_max`
/// (CoprimeOnly), collecting those that are strictly antimodal. Stops early
/// once `limit` witnesses are found.
pub fn find_antimodal(
    slope: Slope,
    k_start: u64,
    k_max: u64,
    limit: Option<usize>,
) -> Result<AntimodalSearch> {
    if slope_regime(slope)? != SlopeRegime::Between {
        return Err(Error::SlopeRegime(format!(
            "{slope} is not strictly between sigma_- and sigma_+"
        )));
    }
    let mut witnesses = Vec::new();
    let mut k_reached = k_start.saturating_sub(1);
    for k in k_start.max(1)..=k_max {
        k_reached = k;
        let line = LatticeLine::new(slope, (k as i64, k as i64 - 1));
        // Past p = 0 the line leaves the sector for good.
        let steps = Integer::div_floor(&(k as i64 - 1), &slope.u) as u64;
        let q_bound = k + slope.v as u64 * steps;
        let scan = scan_line(line, q_bound, ScanMode::CoprimeOnly)?;
        if matches!(scan.classification, Classification::StrictlyAntimodal(_)) {
            witnesses.push(scan);
            if limit.is_some_and(|l| witnesses.len() >= l) {
                break;
            }
        }
    }
    Ok(AntimodalSearch {
        slope,
        k_start,
        k_max,
        k_reached,
        witnesses,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub slope: Slope,
    pub q_bound: u64,
    pub expected: Classification,
    pub lines: usize,
    pub trivial: usize,
    pub monotone: usize,
    pub failures: Vec<ScanResult>,
    pub pass: bool,
}

/// Every sector point with `q <= q_bound`, grouped by the line of `slope`
/// through it.
pub fn lines_of_slope(slope: Slope, q_bound: u64) -> BTreeMap<i64, LatticeLine> {
    let mut lines = BTreeMap::new();
    for q in 1..=q_bound as i64 {
        for p in 0..=q {
            lines
                .entry(slope.u * q + slope.v * p)
                .or_insert_with(|| LatticeLine::new(slope, (q, p)));
        }
    }
    lines
}

/// Scan every line of `slope` meeting the sector within `q_bound` and check
/// that each is monotone in the direction forced by the slope's regime.
pub fn verify_monotone_regime(slope: Slope, q_bound: u64) -> Result<MonotoneReport> {
    let expected = match slope_regime(slope)? {
        SlopeRegime::AboveSigmaPlus => Classification::Increasing,
        SlopeRegime::BelowSigmaMinus => Classification::Decreasing,
        SlopeRegime::Between => {
            return Err(Error::SlopeRegime(format!(
                "{slope} lies between sigma_- and sigma_+"
            )));
        }
    };
    let mut report = MonotoneReport {
        slope,
        q_bound,
        expected,
        lines: 0,
        trivial: 0,
        monotone: 0,
        failures: Vec::new(),
        pass: true,
    };
    for line in lines_of_slope(slope, q_bound).into_values() {
        let scan = scan_line(line, q_bound, ScanMode::CoprimeOnly)?;
        report.lines += 1;
        match scan.classification {
            Classification::Trivial => report.trivial += 1,
            c if c == expected => report.monotone += 1,
            _ => report.failures.push(scan),
        }
    }
    report.pass = report.failures.is_empty();
    Ok(report)
}

/// Nearest `f64` of a rational, for display.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(q: u64, p: u64) -> SectorPoint {
        SectorPoint::new(q, p).unwrap()
    }

    fn cp(q: u64, p: u64) -> CoprimePair {
        CoprimePair::new(q, p).unwrap()
    }

    fn rats(v: &[i64]) -> Vec<BigRational> {
        v.iter()
            .map(|&x| BigRational::from_integer(x.into()))
            .collect()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare_markov(sp(1, 0), sp(1, 1)).unwrap(), Ordering::Less);
        assert_eq!(compare_markov(sp(3, 1), sp(3, 2)).unwrap(), Ordering::Less);
        assert_eq!(
            compare_markov(sp(2, 0), sp(1, 1)).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn support_plane_examples() {
        use SupportVerdict::*;
        assert_eq!(
            support_plane_compare(cp(2, 1), cp(3, 1)).unwrap(),
            ConcludesBasePrecedesOther
        );
        assert_eq!(
            support_plane_compare(cp(4, 3), cp(5, 2)).unwrap(),
            ConcludesBasePrecedesOther
        );
        assert_eq!(
            support_plane_compare(cp(2, 1), cp(1, 0)).unwrap(),
            Inconclusive
        );
    }

    #[test]
    fn inverted_ratio_agrees_on_unit_slope_and_fails_elsewhere() {
        use SupportVerdict::*;
        // On a segment of slope -1 both readings give -1.
        let c = SupportPlaneComparator::new(cp(4, 3)).unwrap();
        assert_eq!(
            c.compare_with(cp(5, 2), SegmentReading::InvertedRatio)
                .unwrap(),
            ConcludesBasePrecedesOther
        );
        // (4,3) -> (5,1): inverted ratio -1/2 >= mu_-, yet m(3/4) = 169 > m(1/5) = 89.
        assert_eq!(
            c.compare_with(cp(5, 1), SegmentReading::InvertedRatio)
                .unwrap(),
            ConcludesBasePrecedesOther
        );
        assert_eq!(
            compare_markov(sp(4, 3), sp(5, 1)).unwrap(),
            Ordering::Greater
        );
        assert_eq!(
            c.compare_with(cp(5, 1), SegmentReading::Slope).unwrap(),
            Inconclusive
        );
    }

    #[test]
    fn slope_parsing() {
        assert_eq!("-7/6".parse::<Slope>().unwrap(), Slope { u: 7, v: 6 });
        assert_eq!("-1".parse::<Slope>().unwrap(), Slope { u: 1, v: 1 });
        assert_eq!("2/4".parse::<Slope>().unwrap(), Slope { u: -1, v: 2 });
        assert_eq!(Slope { u: 7, v: 6 }.to_string(), "-7/6");
        assert!("1/0".parse::<Slope>().is_err());
    }

    #[test]
    fn classification_shapes() {
        assert_eq!(classify(&rats(&[5])), Classification::Trivial);
        assert_eq!(classify(&rats(&[1, 2, 3])), Classification::Increasing);
        assert_eq!(classify(&rats(&[3, 2])), Classification::Decreasing);
        assert_eq!(
            classify(&rats(&[3, 1, 2])),
            Classification::StrictlyAntimodal(2)
        );
        assert_eq!(
            classify(&rats(&[4, 3, 1, 2, 5])),
            Classification::StrictlyAntimodal(3)
        );
        assert_eq!(classify(&rats(&[1, 3, 2])), Classification::Other);
        assert_eq!(classify(&rats(&[1, 2, 2])), Classification::Other);
    }

    #[test]
    fn scan_through_four_three() {
        let line = LatticeLine::new("-1".parse().unwrap(), (4, 3));
        let scan = scan_line(line, 10, ScanMode::AllSector).unwrap();
        let pts: Vec<(u64, u64)> = scan.points.iter().map(|p| (p.q, p.p)).collect();
        assert_eq!(pts, vec![(4, 3), (5, 2), (6, 1), (7, 0)]);
        assert_eq!(scan.distances, rats(&[169, 194, 233, 281]));
        assert_eq!(scan.classification, Classification::Increasing);
        let short = LatticeLine::new("-1".parse().unwrap(), (1, 0));
        assert_eq!(
            scan_line(short, 10, ScanMode::AllSector)
                .unwrap()
                .classification,
            Classification::Trivial
        );
    }

    #[test]
    fn antimodal_witness_for_minus_seven_sixths() {
        let s = find_antimodal("-7/6".parse().unwrap(), 1, 40, Some(1)).unwrap();
        assert_eq!(s.witnesses.len(), 1);
        assert_eq!(s.witnesses[0].line.base, (17, 16));
        assert!(matches!(
            find_antimodal("-1".parse().unwrap(), 1, 10, None),
            Err(Error::SlopeRegime(_))
        ));
    }

    #[test]
    fn regimes() {
        assert_eq!(
            slope_regime("-5/4".parse().unwrap()).unwrap(),
            SlopeRegime::BelowSigmaMinus
        );
        assert_eq!(
            slope_regime("-6/5".parse().unwrap()).unwrap(),
            SlopeRegime::Between
        );
        assert_eq!(
            slope_regime("-7/6".parse().unwrap()).unwrap(),
            SlopeRegime::Between
        );
        assert_eq!(
            slope_regime("-8/7".parse().unwrap()).unwrap(),
            SlopeRegime::AboveSigmaPlus
        );
        let r = verify_monotone_regime("-1".parse().unwrap(), 40).unwrap();
        assert!(r.pass && r.expected == Classification::Increasing);
    }
}
