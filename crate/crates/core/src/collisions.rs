//! Census of how many coprime sector pairs share a Markov number.
//!
//! Small censuses are indexed in memory. Past [`STREAM_THRESHOLD`] the
//! `(label, pair)` records are written to disk in sorted runs and merged, so
//! only the buckets with more than one pair are ever held at once.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Lines, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{refine, RealEnclosure};
use crate::error::{Error, Result};
use crate::farey::{CoprimePair, FareyFraction};
use crate::markov::{markov_number, markov_number_uncached};

/// Censuses with a larger `max_q` stream through sorted runs on disk.
pub const STREAM_THRESHOLD: u64 = 2000;

/// Records per sorted run when streaming.
pub const DEFAULT_RUN_SIZE: usize = 1 << 18;

const PETROV_BITS: u32 = 64;
const PETROV_SAMPLES: usize = 16;

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// All pairs sharing one Markov number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bucket {
    #[serde(with = "bigint_string")]
    pub label: BigInt,
    pub pairs: Vec<CoprimePair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PetrovSample {
    #[serde(with = "bigint_string")]
    pub n: BigInt,
    /// `(ln n)^(2/3)`.
    pub value: RealEnclosure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub max_q: u64,
    pub pairs_indexed: u64,
    pub distinct_labels: u64,
    pub max_multiplicity: usize,
    /// Buckets holding more than one pair.
    pub collisions: Vec<Bucket>,
    pub petrov_curve: Vec<PetrovSample>,
    /// Every label `n >= 2` has multiplicity at most `ceil((ln n)^(2/3))`.
    pub petrov_consistent: bool,
    pub streamed: bool,
    /// The full index; kept only for in-memory censuses.
    #[serde(skip)]
    pub label_index: Option<BTreeMap<BigInt, Vec<CoprimePair>>>,
}

/// `(ln n)^(2/3)` for `n >= 1`.
pub fn petrov_value(n: &BigInt, precision_bits: u32) -> Result<RealEnclosure> {
    if n.is_one() {
        return Ok(RealEnclosure::from_int(0, precision_bits));
    }
    let r = BigRational::from_integer(n.clone());
    refine(precision_bits, |wp| {
        let ln = RealEnclosure::from_rational(&r, wp).ln()?;
        ln.powf(&RealEnclosure::ratio(2, 3, wp))
    })
}

/// `ceil((ln n)^(2/3))`, certified.
pub fn petrov_ceiling(n: &BigInt) -> Result<u64> {
    let mut bits = PETROV_BITS;
    loop {
        let e = petrov_value(n, bits)?;
        let lo = e.lo().to_rational().ceil();
        let hi = e.hi().to_rational().ceil();
        if lo == hi {
            return u64::try_from(lo.to_integer())
                .map_err(|_| Error::Parse("Petrov bound overflow".into()));
        }
        if bits >= 1 << 14 {
            return Err(Error::UndecidedAtCap(format!("ceil((ln {n})^(2/3))")));
        }
        bits *= 2;
    }
}

/// A label with this multiplicity is consistent with the Petrov shape.
/// Multiplicity one always is for `n >= 2`, since then `(ln n)^(2/3) > 0`.
fn petrov_ok(n: &BigInt, multiplicity: usize) -> Result<bool> {
    if n.is_one() || multiplicity <= 1 {
        return Ok(true);
    }
    Ok(multiplicity as u64 <= petrov_ceiling(n)?)
}

/// Labels of all coprime pairs with first coordinate `q`. The streaming
/// census bypasses the shared cache so that memory stays bounded.
fn labels_for_q(q: u64, cached: bool) -> Result<Vec<(BigInt, CoprimePair)>> {
    let label = if cached {
        markov_number
    } else {
        markov_number_uncached
    };
    (0..=q)
        .filter(|&p| q.gcd(&p) == 1)
        .map(|p| Ok((label(FareyFraction::new(p, q)?)?, CoprimePair::new(q, p)?)))
        .collect()
}

fn petrov_samples(labels: &[BigInt]) -> Result<Vec<PetrovSample>> {
    if labels.is_empty() {
        return Ok(Vec::new());
    }
    let n = labels.len();
    let mut idx: Vec<usize> = (0..PETROV_SAMPLES.min(n))
        .map(|i| i * (n - 1) / (PETROV_SAMPLES.min(n) - 1).max(1))
        .collect();
    idx.dedup();
    idx.into_iter()
        .map(|i| {
            Ok(PetrovSample {
                n: labels[i].clone(),
                value: petrov_value(&labels[i], PETROV_BITS)?,
            })
        })
        .collect()
}

/// Index every coprime pair with `q <= max_q` by its Markov number.
pub fn collision_census(max_q: u64) -> Result<CensusReport> {
    if max_q > STREAM_THRESHOLD {
        collision_census_streaming(max_q, DEFAULT_RUN_SIZE)
    } else {
        collision_census_in_memory(max_q)
    }
}

pub fn collision_census_in_memory(max_q: u64) -> Result<CensusReport> {
    if max_q == 0 {
        return Err(Error::Parse("census bound must be at least 1".into()));
    }
    let per_q: Vec<Vec<(BigInt, CoprimePair)>> = (1..=max_q)
        .into_par_iter()
        .map(|q| labels_for_q(q, true))
        .collect::<Result<_>>()?;
    let mut index: BTreeMap<BigInt, Vec<CoprimePair>> = BTreeMap::new();
    let mut pairs_indexed = 0u64;
    for (label, pair) in per_q.into_iter().flatten() {
        index.entry(label).or_default().push(pair);
        pairs_indexed += 1;
    }
    let mut max_multiplicity = 0;
    let mut collisions = Vec::new();
    let mut petrov_consistent = true;
    for (label, pairs) in &index {
        max_multiplicity = max_multiplicity.max(pairs.len());
        petrov_consistent &= petrov_ok(label, pairs.len())?;
        if pairs.len() > 1 {
            collisions.push(Bucket {
                label: label.clone(),
                pairs: pairs.clone(),
            });
        }
    }
    let labels: Vec<BigInt> = index.keys().cloned().collect();
    Ok(CensusReport {
        max_q,
        pairs_indexed,
        distinct_labels: index.len() as u64,
        max_multiplicity,
        collisions,
        petrov_curve: petrov_samples(&labels)?,
        petrov_consistent,
        streamed: false,
        label_index: Some(index),
    })
}

struct RunReader {
    lines: Lines<BufReader<File>>,
}

impl RunReader {
    fn next_record(&mut self) -> Result<Option<(BigInt, CoprimePair)>> {
        let Some(line) = self.lines.next() else {
            return Ok(None);
        };
        let line = line?;
        let bad = || Error::Io(format!("corrupt census run line {line:?}"));
        let mut it = line.split('\t');
        let label: BigInt = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let q: u64 = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let p: u64 = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        Ok(Some((label, CoprimePair::new(q, p)?)))
    }
}

fn flush_run(
    dir: &tempfile::TempDir,
    runs: &mut Vec<std::path::PathBuf>,
    buf: &mut Vec<(BigInt, CoprimePair)>,
) -> Result<()> {
    if buf.is_empty() {
        return Ok(());
    }
    buf.sort();
    let path = dir.path().join(format!("run-{:05}.tsv", runs.len()));
    let mut w = BufWriter::new(File::create(&path)?);
    for (label, pair) in buf.drain(..) {
        writeln!(w, "{label}\t{}\t{}", pair.q(), pair.p())?;
    }
    w.flush()?;
    runs.push(path);
    Ok(())
}

/// As [`collision_census`], but always through sorted runs of `run_size`
/// records in a temporary directory. The report carries no full index.
pub fn collision_census_streaming(max_q: u64, run_size: usize) -> Result<CensusReport> {
    if max_q == 0 {
        return Err(Error::Parse("census bound must be at least 1".into()));
    }
    let dir = tempfile::tempdir()?;
    let mut runs = Vec::new();
    let mut buf = Vec::with_capacity(run_size.min(1 << 20));
    let mut pairs_indexed = 0u64;
    for q in 1..=max_q {
        for rec in labels_for_q(q, false)? {
            buf.push(rec);
            pairs_indexed += 1;
            if buf.len() >= run_size.max(1) {
                flush_run(&dir, &mut runs, &mut buf)?;
            }
        }
    }
    flush_run(&dir, &mut runs, &mut buf)?;

    let mut readers = runs
        .iter()
        .map(|p| {
            Ok(RunReader {
                lines: BufReader::new(File::open(p)?).lines(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut heap = BinaryHeap::new();
    for (i, r) in readers.iter_mut().enumerate() {
        if let Some(rec) = r.next_record()? {
            heap.push(Reverse((rec, i)));
        }
    }

    let mut distinct_labels = 0u64;
    let mut max_multiplicity = 0;
    let mut collisions = Vec::new();
    let mut petrov_consistent = true;
    let mut samples_source = Vec::new();
    let mut last_label = None;
    let mut current: Option<Bucket> = None;
    let mut close = |b: Bucket, distinct: &mut u64| -> Result<()> {
        *distinct += 1;
        max_multiplicity = max_multiplicity.max(b.pairs.len());
        petrov_consistent &= petrov_ok(&b.label, b.pairs.len())?;
        // Geometrically spaced labels in increasing order.
        if distinct.is_power_of_two() {
            samples_source.push(b.label.clone());
        }
        last_label = Some(b.label.clone());
        if b.pairs.len() > 1 {
            collisions.push(b);
        }
        Ok(())
    };
    while let Some(Reverse(((label, pair), i))) = heap.pop() {
        if let Some(next) = readers[i].next_record()? {
            heap.push(Reverse((next, i)));
        }
        match &mut current {
            Some(b) if b.label == label => b.pairs.push(pair),
            _ => {
                if let Some(b) = current.take() {
                    close(b, &mut distinct_labels)?;
                }
                current = Some(Bucket {
                    label,
                    pairs: vec![pair],
                });
            }
        }
    }
    if let Some(b) = current.take() {
        close(b, &mut distinct_labels)?;
    }
    samples_source.extend(last_label);
    samples_source.dedup();
    Ok(CensusReport {
        max_q,
        pairs_indexed,
        distinct_labels,
        max_multiplicity,
        collisions,
        petrov_curve: petrov_samples(&samples_source)?,
        petrov_consistent,
        streamed: true,
        label_index: None,
    })
}

/// Number of coprime pairs `(q, p)` with `q >= p >= 0` and `q <= max_q`,
/// counted directly with gcds.
pub fn coprime_pair_count(max_q: u64) -> u64 {
    (1..=max_q)
        .map(|q| (0..=q).filter(|&p| q.gcd(&p) == 1).count() as u64)
        .sum()
}

impl CensusReport {
    /// The report as a JSON value (the full index is not included).
    pub fn to_json(&self) -> Result<serde_json::Value> {
        serde_json::to_value(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn is_injective(&self) -> bool {
        self.max_multiplicity <= 1 && self.collisions.is_empty() && !self.pairs_indexed.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_of_one() {
        let r = collision_census(1).unwrap();
        let idx = r.label_index.as_ref().unwrap();
        assert_eq!(idx.len(), 2);
        assert_eq!(idx[&BigInt::from(1)], vec![CoprimePair::new(1, 0).unwrap()]);
        assert_eq!(idx[&BigInt::from(2)], vec![CoprimePair::new(1, 1).unwrap()]);
        assert_eq!(r.max_multiplicity, 1);
    }

    #[test]
    fn census_of_five() {
        let r = collision_census(5).unwrap();
        assert_eq!(r.pairs_indexed, 11);
        assert_eq!(r.pairs_indexed, coprime_pair_count(5));
        assert!(r.is_injective() && r.petrov_consistent);
    }

    #[test]
    fn streaming_matches_in_memory() {
        let a = collision_census_in_memory(60).unwrap();
        let b = collision_census_streaming(60, 97).unwrap();
        assert_eq!(
            (
                a.pairs_indexed,
                a.distinct_labels,
                a.max_multiplicity,
                &a.collisions
            ),
            (
                b.pairs_indexed,
                b.distinct_labels,
                b.max_multiplicity,
                &b.collisions
            )
        );
        assert!(b.streamed && b.label_index.is_none());
    }

    #[test]
    fn petrov_values() {
        assert_eq!(petrov_ceiling(&BigInt::from(1)).unwrap(), 0);
        assert_eq!(petrov_ceiling(&BigInt::from(2)).unwrap(), 1);
        // ln(10^6) = 13.8; 13.8^(2/3) = 5.76
        assert_eq!(petrov_ceiling(&BigInt::from(1_000_000)).unwrap(), 6);
        let v = petrov_value(&BigInt::from(1_000_000), 64).unwrap();
        assert!((v.to_f64() - (1e6f64).ln().powf(2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn report_serializes_required_fields() {
        let j = collision_census(5).unwrap().to_json().unwrap();
        for key in ["max_q", "max_multiplicity", "collisions"] {
            assert!(j.get(key).is_some(), "{key}");
        }
    }
}
