//! Markov numbers on the Farey tree.
//!
//! Each tree node carries its label together with the labels of its two
//! Farey parents, `(x, z, y)` = (left parent, node, right parent). Stepping to
//! the left child gives `3 x z - y`, to the right child `3 z y - x`. A run of
//! `k` equal steps keeps one parent fixed and follows a second-order linear
//! recurrence, so it is evaluated as a 2x2 matrix power.
//!
//! Labels are memoized in a [`MarkovCache`]; an independent check is provided
//! by traces of products of 2x2 integer matrices (Cohn words).

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::ops::Mul;
use std::path::Path;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::farey::{farey_parents, t_map_fraction, tree_path, FareyFraction, Step};

/// A positive solution of `x^2 + y^2 + z^2 = 3xyz`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkovTriple {
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
}

/// Whether `x^2 + y^2 + z^2 = 3xyz` holds exactly.
pub fn satisfies_markov_equation(x: &BigInt, y: &BigInt, z: &BigInt) -> bool {
    x * x + y * y + z * z == BigInt::from(3) * x * y * z
}

impl MarkovTriple {
    pub fn new(x: BigInt, y: BigInt, z: BigInt) -> Result<Self> {
        if !(x.is_positive() && y.is_positive() && z.is_positive())
            || !satisfies_markov_equation(&x, &y, &z)
        {
            return Err(Error::Parse(format!(
                "({x}, {y}, {z}) is not a Markov triple"
            )));
        }
        Ok(MarkovTriple { x, y, z })
    }

    pub fn is_valid(&self) -> bool {
        satisfies_markov_equation(&self.x, &self.y, &self.z)
    }

    /// Replace the `i`-th coordinate by the other root of the cubic in it.
    pub fn mutate(&self, i: usize) -> MarkovTriple {
        let three = BigInt::from(3);
        let (x, y, z) = (&self.x, &self.y, &self.z);
        match i {
            0 => MarkovTriple {
                x: &three * y * z - x,
                y: y.clone(),
                z: z.clone(),
            },
            1 => MarkovTriple {
                x: x.clone(),
                y: &three * x * z - y,
                z: z.clone(),
            },
            2 => MarkovTriple {
                x: x.clone(),
                y: y.clone(),
                z: three * x * y - z,
            },
            _ => panic!("a triple has three coordinates, got index {i}"),
        }
    }

    pub fn max(&self) -> &BigInt {
        (&self.x).max(&self.y).max(&self.z)
    }
}

impl fmt::Display for MarkovTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// A tree node with its label and the labels of its Farey parents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledNode {
    pub fraction: FareyFraction,
    pub label: BigInt,
    /// Labels of the (left, right) Farey parents.
    pub parent_labels: (BigInt, BigInt),
}

impl LabelledNode {
    pub fn triple(&self) -> MarkovTriple {
        MarkovTriple {
            x: self.parent_labels.0.clone(),
            y: self.label.clone(),
            z: self.parent_labels.1.clone(),
        }
    }
}

/// A 2x2 integer matrix `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn identity() -> Self {
        Mat2::new(1, 0, 0, 1)
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn pow(&self, mut k: u64) -> Mat2 {
        let mut base = self.clone();
        let mut acc = Mat2::identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;

    fn mul(self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Apply `k` steps of `x_{i+1} = t x_i - x_{i-1}` to `(x_1, x_0)`, returning
/// `(x_{k+1}, x_k)`.
fn advance_run(t: &BigInt, x1: &BigInt, x0: &BigInt, k: u64) -> (BigInt, BigInt) {
    if k == 1 {
        return (t * x1 - x0, x1.clone());
    }
    let m = Mat2 {
        a: t.clone(),
        b: -BigInt::one(),
        c: BigInt::one(),
        d: BigInt::zero(),
    }
    .pow(k);
    (&m.a * x1 + &m.b * x0, &m.c * x1 + &m.d * x0)
}

/// Labels `(left parent, node, right parent)` at `f`, by direct descent.
fn descend(f: FareyFraction) -> Result<(BigInt, BigInt, BigInt)> {
    let path = tree_path(f)?;
    let three = BigInt::from(3);
    // Root 1/2 sits between 0/1 (label 1) and 1/1 (label 2).
    let (mut x, mut z, mut y) = (BigInt::one(), BigInt::from(5), BigInt::from(2));
    for &(step, k) in path.runs() {
        match step {
            Step::L => {
                // x stays; the node sequence runs y, z, 3xz - y, ...
                let (node, right) = advance_run(&(&three * &x), &z, &y, k);
                z = node;
                y = right;
            }
            Step::R => {
                let (node, left) = advance_run(&(&three * &y), &z, &x, k);
                z = node;
                x = left;
            }
        }
    }
    Ok((x, z, y))
}

fn base_label(f: FareyFraction) -> Option<BigInt> {
    if f == FareyFraction::ZERO || f == FareyFraction::INFINITY {
        Some(BigInt::one())
    } else if f == FareyFraction::ONE {
        Some(BigInt::from(2))
    } else {
        None
    }
}

fn check_label_domain(f: FareyFraction) -> Result<()> {
    if f.in_unit_interval() || f.is_infinity() {
        Ok(())
    } else {
        Err(f.out_of("[0,1] or 1/0"))
    }
}

/// The Markov number of `f` without touching any cache.
pub fn markov_number_uncached(f: FareyFraction) -> Result<BigInt> {
    check_label_domain(f)?;
    if let Some(m) = base_label(f) {
        return Ok(m);
    }
    Ok(descend(f)?.1)
}

/// Append-only memo table of Markov numbers, safe to share between threads.
#[derive(Debug, Default)]
pub struct MarkovCache {
    labels: RwLock<HashMap<FareyFraction, BigInt>>,
}

impl MarkovCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// The process-wide cache used by the free functions of this crate.
    pub fn global() -> &'static MarkovCache {
        static GLOBAL: OnceLock<MarkovCache> = OnceLock::new();
        GLOBAL.get_or_init(MarkovCache::new)
    }

    pub fn len(&self) -> usize {
        self.labels.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, f: FareyFraction) -> Option<BigInt> {
        self.labels
            .read()
            .expect("cache lock poisoned")
            .get(&f)
            .cloned()
    }

    fn insert_all(&self, entries: impl IntoIterator<Item = (FareyFraction, BigInt)>) {
        let mut w = self.labels.write().expect("cache lock poisoned");
        for (f, m) in entries {
            w.entry(f).or_insert(m);
        }
    }

    pub fn markov_number(&self, f: FareyFraction) -> Result<BigInt> {
        check_label_domain(f)?;
        if let Some(m) = base_label(f) {
            return Ok(m);
        }
        if let Some(m) = self.get(f) {
            return Ok(m);
        }
        let node = self.node_uncached(f)?;
        Ok(node.label)
    }

    fn node_uncached(&self, f: FareyFraction) -> Result<LabelledNode> {
        let t = farey_parents(f)?;
        let (x, z, y) = descend(f)?;
        self.insert_all([(t.left, x.clone()), (f, z.clone()), (t.right, y.clone())]);
        Ok(LabelledNode {
            fraction: f,
            label: z,
            parent_labels: (x, y),
        })
    }

    /// `f` with the labels of its Farey parents. At `0/1` and `1/1` the formal
    /// neighbour `1/0` contributes label 1.
    pub fn labelled_node(&self, f: FareyFraction) -> Result<LabelledNode> {
        f.require_unit()?;
        let t = farey_parents(f)?;
        let cached = {
            let r = self.labels.read().expect("cache lock poisoned");
            let look = |g: FareyFraction| base_label(g).or_else(|| r.get(&g).cloned());
            match (look(t.left), look(f), look(t.right)) {
                (Some(x), Some(z), Some(y)) => Some((x, z, y)),
                _ => None,
            }
        };
        match cached {
            Some((x, z, y)) => Ok(LabelledNode {
                fraction: f,
                label: z,
                parent_labels: (x, y),
            }),
            None => self.node_uncached(f),
        }
    }

    /// `(n1, n, n2)`: labels at `T` of the Farey triangle around `f`, for
    /// `f` in `[0, 1/2]`.
    pub fn markov_triple_at(&self, f: FareyFraction) -> Result<(BigInt, BigInt, BigInt)> {
        f.require_lower_half()?;
        let g = t_map_fraction(f)?;
        if g == FareyFraction::ZERO {
            // The triangle (1/0, 0/1, 1/1) maps to (1/0, 0/1, 1/0).
            return Ok((BigInt::one(), BigInt::one(), BigInt::one()));
        }
        let node = self.labelled_node(g)?;
        Ok((node.parent_labels.0, node.label, node.parent_labels.1))
    }

    /// Write every cached label as `p/q<TAB>m`, sorted by fraction.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut entries: Vec<(FareyFraction, BigInt)> = self
            .labels
            .read()
            .expect("cache lock poisoned")
            .iter()
            .map(|(f, m)| (*f, m.clone()))
            .collect();
        entries.sort_by_key(|e| e.0);
        let tmp = path.with_extension("tmp");
        {
            let mut w = BufWriter::new(std::fs::File::create(&tmp)?);
            for (f, m) in &entries {
                writeln!(w, "{f}\t{m}")?;
            }
            w.flush()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Load a snapshot written by [`MarkovCache::save`].
    ///
    /// Every line is parsed. Every base case, and every hundredth entry in
    /// fraction order, is checked against the Markov equation together with
    /// freshly computed labels of its Farey parents.
    pub fn load(path: &Path) -> Result<Self> {
        let reader = BufReader::new(std::fs::File::open(path)?);
        let mut labels = HashMap::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |why: &str| Error::Snapshot(format!("line {}: {why}", lineno + 1));
            let (f, m) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
            let f: FareyFraction = f.parse().map_err(|e: Error| bad(&e.to_string()))?;
            let m: BigInt = m
                .trim()
                .parse()
                .map_err(|_| bad("label is not an integer"))?;
            check_label_domain(f).map_err(|e| bad(&e.to_string()))?;
            if !m.is_positive() {
                return Err(bad("label is not positive"));
            }
            labels.insert(f, m);
        }
        let mut keys: Vec<FareyFraction> = labels.keys().copied().collect();
        keys.sort();
        for (i, f) in keys.iter().enumerate() {
            let m = &labels[f];
            if let Some(b) = base_label(*f) {
                if &b != m {
                    return Err(Error::Snapshot(format!(
                        "{f} must have label {b}, found {m}"
                    )));
                }
                continue;
            }
            if i % 100 != 0 {
                continue;
            }
            let t = farey_parents(*f)?;
            let label = |g: FareyFraction| match base_label(g) {
                Some(b) => Ok(b),
                None => markov_number_uncached(g),
            };
            let (x, y) = (label(t.left)?, label(t.right)?);
            if !satisfies_markov_equation(&x, m, &y) {
                return Err(Error::Snapshot(format!(
                    "({x}, {m}, {y}) at {f} is not a Markov triple"
                )));
            }
        }
        Ok(MarkovCache {
            labels: RwLock::new(labels),
        })
    }

    /// Merge another cache's entries into this one.
    pub fn absorb(&self, other: MarkovCache) {
        let other = other.labels.into_inner().expect("cache lock poisoned");
        self.insert_all(other);
    }
}

/// The Markov number `m_f` for `f` in `[0,1]` or `1/0`, via the global cache.
pub fn markov_number(f: FareyFraction) -> Result<BigInt> {
    MarkovCache::global().markov_number(f)
}

/// See [`MarkovCache::markov_triple_at`]; uses the global cache.
pub fn markov_triple_at(f: FareyFraction) -> Result<(BigInt, BigInt, BigInt)> {
    MarkovCache::global().markov_triple_at(f)
}

/// See [`MarkovCache::labelled_node`]; uses the global cache.
pub fn labelled_node(f: FareyFraction) -> Result<LabelledNode> {
    MarkovCache::global().labelled_node(f)
}

/// The Cohn word `W(f)`: `W(0/1) = [[1,1],[1,2]]`, `W(1/1) = [[3,2],[4,3]]`
/// and `W` of a mediant is the product of the parents' words. Built one tree
/// step at a time, independently of the label recursion.
pub fn cohn_matrix(f: FareyFraction) -> Result<Mat2> {
    f.require_unit()?;
    let mut left = Mat2::new(1, 1, 1, 2);
    let mut right = Mat2::new(3, 2, 4, 3);
    if f == FareyFraction::ZERO {
        return Ok(left);
    }
    if f == FareyFraction::ONE {
        return Ok(right);
    }
    let mut node = &left * &right;
    for step in tree_path(f)?.steps() {
        match step {
            Step::L => right = node,
            Step::R => left = node,
        }
        node = &left * &right;
    }
    Ok(node)
}

/// `tr W(f)`, which equals `3 m_f`.
pub fn cohn_trace(f: FareyFraction) -> Result<BigInt> {
    Ok(cohn_matrix(f)?.trace())
}

/// `c_g` of the recurrence `c_0 = 2`, `c_1 = 3 m0`, `c_{k+1} = 3 m0 c_k - c_{k-1}`.
pub fn chebyshev_c(m0: &BigInt, g: u64) -> BigInt {
    let t = BigInt::from(3) * m0;
    let (mut prev, mut cur) = (BigInt::from(2), t.clone());
    if g == 0 {
        return prev;
    }
    for _ in 1..g {
        let next = &t * &cur - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// The Markov distance of `(q, p)`: `c_g / 3` where `g = gcd(q, p)` and `m0`
/// is the Markov number of the primitive part. Equal to the Markov number
/// when `g = 1`.
pub fn markov_distance(q: u64, p: u64) -> Result<BigRational> {
    let (g, m0) = primitive_label(q, p)?;
    Ok(BigRational::new(chebyshev_c(&m0, g), BigInt::from(3)))
}

/// `(gcd, Markov number of the primitive part)` for a sector point.
pub fn primitive_label(q: u64, p: u64) -> Result<(u64, BigInt)> {
    if p > q || q == 0 {
        return Err(Error::NotInSector {
            x: q as i64,
            y: p as i64,
        });
    }
    let g = q.gcd(&p);
    let f = FareyFraction::new(p / g, q / g)?;
    Ok((g, markov_number(f)?))
}
