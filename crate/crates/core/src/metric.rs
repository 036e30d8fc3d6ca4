//! Metrics, distance matrices and pivoting bounds.
//!
//! Every real-valued comparison made on behalf of a metric goes through the
//! matrix tolerance: `METRIC_EPS` for Minkowski distances and exactly zero for
//! the integer-valued metrics (Levenshtein, explicit matrices).

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for axiom checks and elimination predicates on
/// real-valued metrics.
pub const METRIC_EPS: f64 = 1e-9;

/// A single data object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Object {
    Vector(Vec<f64>),
    /// Raw bytes of one line of a string file.
    Text(Vec<u8>),
    /// A point of an explicitly given metric, addressed by matrix index.
    Point(usize),
}

impl Object {
    fn kind_name(&self) -> &'static str {
        match self {
            Object::Vector(_) => "vector",
            Object::Text(_) => "string",
            Object::Point(_) => "point",
        }
    }
}

#[derive(Clone, Debug)]
pub enum MetricKind {
    /// `L_p` with `p >= 1`; `f64::INFINITY` gives the maximum norm.
    Minkowski(f64),
    Levenshtein,
    /// Distances looked up in a matrix over `Object::Point` indices.
    Explicit(Arc<DistanceMatrix>),
}

impl MetricKind {
    pub fn euclidean() -> Self {
        MetricKind::Minkowski(2.0)
    }

    pub fn manhattan() -> Self {
        MetricKind::Minkowski(1.0)
    }

    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Minkowski(_) => "minkowski",
            MetricKind::Levenshtein => "levenshtein",
            MetricKind::Explicit(_) => "explicit",
        }
    }

    /// Tolerance used for comparisons on distances produced by this metric.
    pub fn tolerance(&self) -> f64 {
        match self {
            MetricKind::Minkowski(_) => METRIC_EPS,
            MetricKind::Levenshtein | MetricKind::Explicit(_) => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            MetricKind::Minkowski(p) if p.is_nan() || *p < 1.0 => Err(Error::InvalidMinkowski(*p)),
            _ => Ok(()),
        }
    }
}

/// Distance between two objects under `metric`.
pub fn compute_distance(a: &Object, b: &Object, metric: &MetricKind) -> Result<f64> {
    match (metric, a, b) {
        (MetricKind::Minkowski(p), Object::Vector(x), Object::Vector(y)) => {
            if x.len() != y.len() {
                return Err(Error::DimensionMismatch {
                    left: x.len(),
                    right: y.len(),
                });
            }
            Ok(minkowski(x, y, *p))
        }
        (MetricKind::Levenshtein, Object::Text(x), Object::Text(y)) => {
            Ok(triple_accel::levenshtein(x, y) as f64)
        }
        (MetricKind::Explicit(m), Object::Point(i), Object::Point(j)) => {
            for &idx in [i, j] {
                if idx >= m.n() {
                    return Err(Error::IndexOutOfRange {
                        index: idx,
                        len: m.n(),
                    });
                }
            }
            Ok(m.get(*i, *j))
        }
        (MetricKind::Explicit(_), _, _) => Err(Error::MissingIndex),
        (m, Object::Vector(_), Object::Vector(_)) | (m, Object::Text(_), Object::Text(_)) => {
            Err(Error::IncompatibleMetric {
                metric: m.name(),
                object: a.kind_name(),
            })
        }
        (m, _, _) => Err(Error::IncompatibleMetric {
            metric: m.name(),
            object: if matches!(a, Object::Vector(_)) {
                b.kind_name()
            } else {
                a.kind_name()
            },
        }),
    }
}

fn minkowski(x: &[f64], y: &[f64], p: f64) -> f64 {
    let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
    if p == 1.0 {
        diffs.sum()
    } else if p == 2.0 {
        diffs.map(|d| d * d).sum::<f64>().sqrt()
    } else if p.is_infinite() {
        diffs.fold(0.0, f64::max)
    } else {
        diffs.map(|d| d.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Ordered collection of objects together with their metric.
#[derive(Clone, Debug)]
pub struct Dataset {
    objects: Vec<Object>,
    metric: MetricKind,
}

impl Dataset {
    pub fn new(objects: Vec<Object>, metric: MetricKind) -> Result<Self> {
        if objects.is_empty() {
            return Err(Error::EmptyDataset);
        }
        metric.validate()?;
        let first = &objects[0];
        let dim = match first {
            Object::Vector(v) => Some(v.len()),
            _ => None,
        };
        if dim == Some(0) {
            return Err(Error::DimensionMismatch { left: 0, right: 1 });
        }
        for o in &objects {
            check_compatible(o, &metric)?;
            match (o, dim) {
                (Object::Vector(v), Some(d)) if v.len() != d => {
                    return Err(Error::DimensionMismatch {
                        left: d,
                        right: v.len(),
                    })
                }
                (o, _) if std::mem::discriminant(o) != std::mem::discriminant(first) => {
                    return Err(Error::IncompatibleMetric {
                        metric: metric.name(),
                        object: o.kind_name(),
                    })
                }
                _ => {}
            }
        }
        Ok(Self { objects, metric })
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn objects(&self) -> &[Object] {
        &self.objects
    }

    pub fn metric(&self) -> &MetricKind {
        &self.metric
    }

    /// Vector dimension, if this is a vector dataset.
    pub fn dim(&self) -> Option<usize> {
        match &self.objects[0] {
            Object::Vector(v) => Some(v.len()),
            _ => None,
        }
    }

    pub(crate) fn into_parts(self) -> (Vec<Object>, MetricKind) {
        (self.objects, self.metric)
    }
}

fn check_compatible(o: &Object, metric: &MetricKind) -> Result<()> {
    let ok = matches!(
        (metric, o),
        (MetricKind::Minkowski(_), Object::Vector(_))
            | (MetricKind::Levenshtein, Object::Text(_))
            | (MetricKind::Explicit(_), Object::Point(_))
    );
    if ok {
        Ok(())
    } else if matches!(metric, MetricKind::Explicit(_)) {
        Err(Error::MissingIndex)
    } else {
        Err(Error::IncompatibleMetric {
            metric: metric.name(),
            object: o.kind_name(),
        })
    }
}

/// Dense symmetric matrix of object-object distances.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
    tolerance: f64,
}

impl DistanceMatrix {
    /// Builds a matrix from explicit rows. Only shape and finiteness are
    /// checked here; metric axioms are left to [`verify_metric`].
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidMatrix(format!("row {i} contains {v}")));
            }
            data.extend(row);
        }
        Ok(Self {
            n,
            data,
            tolerance: 0.0,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Writes `v` at both `(i, j)` and `(j, i)`.
    pub fn set_symmetric(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    /// Restriction to `indices`, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        let m = indices.len();
        let mut data = Vec::with_capacity(m * m);
        for &i in indices {
            data.extend(indices.iter().map(|&j| self.get(i, j)));
        }
        Self {
            n: m,
            data,
            tolerance: self.tolerance,
        }
    }
}

impl Serialize for DistanceMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DistanceMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        DistanceMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// All pairwise distances of `ds`. Rows are computed in parallel.
pub fn build_distance_matrix(ds: &Dataset) -> Result<DistanceMatrix> {
    let n = ds.len();
    let objs = ds.objects();
    let metric = ds.metric();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| compute_distance(&objs[i], &objs[j], metric))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut data = vec![0.0; n * n];
    for (i, row) in upper.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + 1 + off;
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    Ok(DistanceMatrix {
        n,
        data,
        tolerance: metric.tolerance(),
    })
}

/// Query-to-object distances with a mask of which ones have been paid for.
///
/// The true distances are always stored (the offline setting); simulations
/// only look at them through [`QueryDistances::reveal`], which counts.
#[derive(Clone, Debug)]
pub struct QueryDistances {
    dist: Vec<f64>,
    revealed: Vec<bool>,
    count: usize,
}

impl QueryDistances {
    pub fn from_distances(dist: Vec<f64>) -> Self {
        let n = dist.len();
        Self {
            dist,
            revealed: vec![false; n],
            count: 0,
        }
    }

    pub fn from_query(ds: &Dataset, q: &Object) -> Result<Self> {
        let dist = ds
            .objects()
            .iter()
            .map(|o| compute_distance(q, o, ds.metric()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_distances(dist))
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    /// Pays for `δ(q, i)` (once) and returns it.
    pub fn reveal(&mut self, i: usize) -> f64 {
        if !self.revealed[i] {
            self.revealed[i] = true;
            self.count += 1;
        }
        self.dist[i]
    }

    pub fn is_revealed(&self, i: usize) -> bool {
        self.revealed[i]
    }

    pub fn revealed(&self, i: usize) -> Option<f64> {
        self.revealed[i].then(|| self.dist[i])
    }

    /// Number of distances paid for so far.
    pub fn computations(&self) -> usize {
        self.count
    }

    /// The full ground truth, without counting. Offline use only.
    pub fn all(&self) -> &[f64] {
        &self.dist
    }

    /// Same distances with nothing revealed.
    pub fn hidden(&self) -> Self {
        Self::from_distances(self.dist.clone())
    }
}

/// Per-object lower and upper bounds on `δ(q, x)` from a growing pivot set.
#[derive(Clone, Debug)]
pub struct Bounds {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Bounds {
    pub fn new(n: usize) -> Self {
        Self {
            lo: vec![0.0; n],
            hi: vec![f64::INFINITY; n],
        }
    }

    /// Tightens every object's bounds with pivot `p`, whose query distance is `dqp`.
    pub fn add_pivot(&mut self, p: usize, dqp: f64, dm: &DistanceMatrix) {
        for (x, &dpx) in dm.row(p).iter().enumerate() {
            let lo = (dqp - dpx).abs();
            let hi = dqp + dpx;
            if lo > self.lo[x] {
                self.lo[x] = lo;
            }
            if hi < self.hi[x] {
                self.hi[x] = hi;
            }
        }
    }

    #[inline]
    pub fn lo(&self, x: usize) -> f64 {
        self.lo[x]
    }

    #[inline]
    pub fn hi(&self, x: usize) -> f64 {
        self.hi[x]
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }
}

/// Bounds on `δ(q, x)` from the revealed pivots `pivots`.
pub fn pivot_bounds(
    pivots: &[usize],
    qd: &QueryDistances,
    dm: &DistanceMatrix,
    x: usize,
) -> Result<(f64, f64)> {
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    for &p in pivots {
        let dqp = qd.revealed(p).ok_or(Error::UnrevealedPivot(p))?;
        let dpx = dm.get(p, x);
        lo = lo.max((dqp - dpx).abs());
        hi = hi.min(dqp + dpx);
    }
    Ok((lo, hi))
}

/// Replaces `δ(q, z)` by the pivoting lower bound (first matrix) and upper
/// bound (second matrix), using every other index as a pivot.
pub fn adversarial_metrics(
    dm: &DistanceMatrix,
    q: usize,
    z: usize,
) -> Result<(DistanceMatrix, DistanceMatrix)> {
    let n = dm.n();
    for idx in [q, z] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, len: n });
        }
    }
    let pivots: Vec<usize> = (0..n).filter(|&i| i != q && i != z).collect();
    if pivots.is_empty() {
        return Err(Error::NoPivots);
    }
    let mut low = dm.clone();
    let mut high = dm.clone();
    if q != z {
        let lo = pivots
            .iter()
            .map(|&p| (dm.get(q, p) - dm.get(p, z)).abs())
            .fold(0.0, f64::max);
        let hi = pivots
            .iter()
            .map(|&p| dm.get(q, p) + dm.get(p, z))
            .fold(f64::INFINITY, f64::min);
        low.set_symmetric(q, z, lo);
        high.set_symmetric(q, z, hi);
    }
    Ok((low, high))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axiom {
    ZeroDiagonal,
    Nonnegativity,
    Symmetry,
    Identity,
    Triangle,
}

/// Outcome of a metric-axiom check. For the triangle axiom the witness
/// `(i, j, k)` violates `d(i,k) <= d(i,j) + d(j,k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MetricReport {
    Ok,
    Violation {
        axiom: Axiom,
        witness: (usize, usize, usize),
    },
}

impl MetricReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, MetricReport::Ok)
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricReport::Ok => write!(f, "ok"),
            MetricReport::Violation { axiom, witness } => {
                write!(f, "{axiom:?} violated at {witness:?}")
            }
        }
    }
}

/// Full metric check, including identity of indiscernibles.
pub fn verify_metric(dm: &DistanceMatrix) -> MetricReport {
    check_axioms(dm, true)
}

/// Everything [`verify_metric`] checks except identity of indiscernibles.
pub fn verify_pseudometric(dm: &DistanceMatrix) -> MetricReport {
    check_axioms(dm, false)
}

fn check_axioms(dm: &DistanceMatrix, identity: bool) -> MetricReport {
    let n = dm.n();
    let eps = dm.tolerance();
    let fail = |axiom, witness| MetricReport::Violation { axiom, witness };
    for i in 0..n {
        if dm.get(i, i).abs() > eps {
            return fail(Axiom::ZeroDiagonal, (i, i, i));
        }
    }
    for i in 0..n {
        for j in 0..n {
            let d = dm.get(i, j);
            if d < -eps {
                return fail(Axiom::Nonnegativity, (i, j, j));
            }
            if (d - dm.get(j, i)).abs() > eps {
                return fail(Axiom::Symmetry, (i, j, j));
            }
            if identity && i != j && d.abs() <= eps {
                return fail(Axiom::Identity, (i, j, j));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let dij = dm.get(i, j);
            for k in 0..n {
                if dm.get(i, k) > dij + dm.get(j, k) + eps {
                    return fail(Axiom::Triangle, (i, j, k));
                }
            }
        }
    }
    MetricReport::Ok
}
