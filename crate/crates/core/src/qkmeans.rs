//! Lloyd's K-means with the nearest-centroid argmin delegated to the quantum
//! minimum search: each point's squared distances to the centroids are
//! quantized, stored in a per-point QRAM, and searched for their minimum.

use rand::{rngs::StdRng, Rng, SeedableRng};
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::derive_seed;
use crate::error::{Error, Result};
use crate::qms::{run_descent, DescentTrace, QmsConfig};
use crate::qram::Dataset;

/// Observed points in d-dimensional Euclidean space.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidInput("point set is empty".into()))?;
        if dim == 0 {
            return Err(Error::InvalidInput("points need at least one coordinate".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput(format!("point {i} has a non-finite coordinate")));
            }
        }
        Ok(PointSet { points, dim })
    }

    /// Number of points (never zero).
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.iter().map(Vec::as_slice)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CentroidSet {
    pub centroids: Vec<Vec<f64>>,
}

impl CentroidSet {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }
}

/// Per-point cluster labels and the objective they induce (sum of squared
/// distances to the labeled centroids, in real coordinates).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assignment {
    pub labels: Vec<usize>,
    pub objective: f64,
}

/// How real squared distances map onto the QRAM's integer levels.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuantizationSpec {
    pub m_bits: u32,
    /// Squared-distance units per quantum level.
    pub scale: f64,
}

impl QuantizationSpec {
    pub fn new(m_bits: u32, scale: f64) -> Self {
        assert!(m_bits >= 2, "need at least 2 bits of distance resolution");
        assert!(scale > 0.0, "scale must be positive");
        QuantizationSpec { m_bits, scale }
    }

    /// Scale from the point set's squared diameter, so no point–centroid
    /// distance can exceed the top level (centroids stay inside the convex
    /// hull of the points).
    pub fn for_points(pts: &PointSet, m_bits: u32) -> Self {
        let mut diameter_sqr = 0.0f64;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                diameter_sqr = diameter_sqr.max(dist_sqr(pts.point(i), pts.point(j)));
            }
        }
        let levels = ((1u64 << m_bits) - 2) as f64;
        let scale = if diameter_sqr > 0.0 { diameter_sqr / levels } else { 1.0 };
        Self::new(m_bits, scale)
    }

    /// Quantize one squared distance, clamped below the padding sentinel so
    /// padding can never be selected as a nearest centroid.
    pub fn quantize(&self, d_sqr: f64) -> u64 {
        let top = (1u64 << self.m_bits) - 2;
        ((d_sqr / self.scale).round() as u64).min(top)
    }
}

fn dist_sqr(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Quantized squared distances from one point to every centroid.
pub fn quantize_distances(point: &[f64], cents: &CentroidSet, q: &QuantizationSpec) -> Vec<u64> {
    cents
        .centroids
        .iter()
        .map(|c| q.quantize(dist_sqr(point, c)))
        .collect()
}

fn classical_argmin(dists: &[u64]) -> usize {
    let mut best = 0;
    for (i, &d) in dists.iter().enumerate() {
        if d < dists[best] {
            best = i;
        }
    }
    best
}

/// Label every point with the centroid found by a quantum minimum search
/// over its quantized distance table, returning the per-point traces.
///
/// Point `i` searches with the derived seed stream `kmeans-point`/`i`. Ties
/// resolve to the lowest centroid index. A search whose every retry failed
/// at some step can land on a value absent from its table or on the padding
/// sentinel (held only by padded addresses); such labels fall back to the
/// classical argmin of the quantized table, and the trace records the failed
/// search either way.
pub fn assign_via_qms_traced(
    pts: &PointSet,
    cents: &CentroidSet,
    q: &QuantizationSpec,
    cfg: &QmsConfig,
) -> Result<(Assignment, Vec<DescentTrace>)> {
    let label_one = |i: usize| -> Result<(usize, DescentTrace)> {
        let dists = quantize_distances(pts.point(i), cents, q);
        let ds = Dataset::with_width(&dists, q.m_bits)?;
        let point_cfg = QmsConfig {
            seed: derive_seed(cfg.seed, "kmeans-point", i as u64),
            ..*cfg
        };
        let trace = run_descent(&ds, &point_cfg)?;
        let label = trace
            .result_addresses
            .first()
            .copied()
            .filter(|&address| address < cents.k())
            .unwrap_or_else(|| classical_argmin(&dists));
        Ok((label, trace))
    };

    #[cfg(feature = "parallel")]
    let outcomes = (0..pts.len())
        .into_par_iter()
        .map(label_one)
        .collect::<Result<Vec<_>>>()?;
    #[cfg(not(feature = "parallel"))]
    let outcomes = (0..pts.len()).map(label_one).collect::<Result<Vec<_>>>()?;

    let (labels, traces): (Vec<usize>, Vec<DescentTrace>) = outcomes.into_iter().unzip();
    let objective = objective_of(pts, cents, &labels);
    Ok((Assignment { labels, objective }, traces))
}

/// [`assign_via_qms_traced`] without keeping the traces.
pub fn assign_via_qms(
    pts: &PointSet,
    cents: &CentroidSet,
    q: &QuantizationSpec,
    cfg: &QmsConfig,
) -> Result<Assignment> {
    assign_via_qms_traced(pts, cents, q, cfg).map(|(asg, _)| asg)
}

/// Classical nearest-centroid assignment over real squared distances,
/// first index winning ties.
pub fn assign_classical(pts: &PointSet, cents: &CentroidSet) -> Assignment {
    let labels: Vec<usize> = pts
        .iter()
        .map(|p| {
            let mut best = 0;
            let mut best_d = dist_sqr(p, &cents.centroids[0]);
            for (j, c) in cents.centroids.iter().enumerate().skip(1) {
                let d = dist_sqr(p, c);
                if d < best_d {
                    best = j;
                    best_d = d;
                }
            }
            best
        })
        .collect();
    let objective = objective_of(pts, cents, &labels);
    Assignment { labels, objective }
}

fn objective_of(pts: &PointSet, cents: &CentroidSet, labels: &[usize]) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &j)| dist_sqr(pts.point(i), &cents.centroids[j]))
        .sum()
}

/// Move each centroid to the mean of its cluster; empty clusters keep their
/// previous centroid.
pub fn update_centroids(pts: &PointSet, asg: &Assignment, previous: &CentroidSet) -> CentroidSet {
    let k = previous.k();
    let mut sums = vec![vec![0.0; pts.dim()]; k];
    let mut counts = vec![0usize; k];
    for (i, &label) in asg.labels.iter().enumerate() {
        counts[label] += 1;
        for (s, &x) in sums[label].iter_mut().zip(pts.point(i)) {
            *s += x;
        }
    }
    let centroids = (0..k)
        .map(|j| {
            if counts[j] == 0 {
                previous.centroids[j].clone()
            } else {
                sums[j].iter().map(|s| s / counts[j] as f64).collect()
            }
        })
        .collect();
    CentroidSet { centroids }
}

/// Sample `k` distinct points (by index) as initial centroids.
pub fn init_centroids(pts: &PointSet, k: usize, seed: u64) -> Result<CentroidSet> {
    if k == 0 || k > pts.len() {
        return Err(Error::InvalidInput(format!(
            "k = {k} outside the valid range 1..={}",
            pts.len()
        )));
    }
    let mut indices: Vec<usize> = (0..pts.len()).collect();
    let mut rng = StdRng::seed_from_u64(seed);
    for i in 0..k {
        let j = rng.gen_range(i..indices.len());
        indices.swap(i, j);
    }
    Ok(CentroidSet {
        centroids: indices[..k].iter().map(|&i| pts.point(i).to_vec()).collect(),
    })
}

/// Outcome of a full Lloyd run.
#[derive(Clone, Debug, Serialize)]
pub struct LloydResult {
    pub centroids: CentroidSet,
    pub assignment: Assignment,
    pub iterations: usize,
    pub objective_history: Vec<f64>,
}

fn lloyd_loop<F>(
    pts: &PointSet,
    k: usize,
    max_iters: usize,
    tol: f64,
    init_seed: u64,
    mut assign: F,
) -> Result<LloydResult>
where
    F: FnMut(&CentroidSet) -> Result<Assignment>,
{
    assert!(max_iters >= 1, "need at least one iteration");
    let mut cents = init_centroids(pts, k, init_seed)?;
    let mut history = Vec::new();
    let mut last: Option<Assignment> = None;
    let mut iterations = 0;
    for _ in 0..max_iters {
        let asg = assign(&cents)?;
        iterations += 1;
        cents = update_centroids(pts, &asg, &cents);
        let converged = last
            .as_ref()
            .is_some_and(|prev| (prev.objective - asg.objective).abs() < tol);
        history.push(asg.objective);
        last = Some(asg);
        if converged {
            break;
        }
    }
    Ok(LloydResult {
        centroids: cents,
        assignment: last.expect("max_iters >= 1"),
        iterations,
        objective_history: history,
    })
}

/// Alternate quantum-search assignment and centroid updates until the
/// objective improves by less than `tol` or `max_iters` is reached.
/// Initialization derives its seed from `cfg.seed` via the `kmeans-init`
/// stream, so a classical run with the same seed starts identically.
pub fn run_lloyd(
    pts: &PointSet,
    k: usize,
    q: &QuantizationSpec,
    cfg: &QmsConfig,
    max_iters: usize,
    tol: f64,
) -> Result<LloydResult> {
    lloyd_loop(
        pts,
        k,
        max_iters,
        tol,
        derive_seed(cfg.seed, "kmeans-init", 0),
        |cents| assign_via_qms(pts, cents, q, cfg),
    )
}

/// [`run_lloyd`] that also returns the per-point search traces of the final
/// assignment round.
pub fn run_lloyd_traced(
    pts: &PointSet,
    k: usize,
    q: &QuantizationSpec,
    cfg: &QmsConfig,
    max_iters: usize,
    tol: f64,
) -> Result<(LloydResult, Vec<DescentTrace>)> {
    let mut latest = Vec::new();
    let result = lloyd_loop(
        pts,
        k,
        max_iters,
        tol,
        derive_seed(cfg.seed, "kmeans-init", 0),
        |cents| {
            let (asg, traces) = assign_via_qms_traced(pts, cents, q, cfg)?;
            latest = traces;
            Ok(asg)
        },
    )?;
    Ok((result, latest))
}

/// The classical limit of [`run_lloyd`]: same initialization and loop, with
/// the argmin taken classically over real distances.
pub fn run_lloyd_classical(
    pts: &PointSet,
    k: usize,
    seed: u64,
    max_iters: usize,
    tol: f64,
) -> Result<LloydResult> {
    lloyd_loop(
        pts,
        k,
        max_iters,
        tol,
        derive_seed(seed, "kmeans-init", 0),
        |cents| Ok(assign_classical(pts, cents)),
    )
}
