//! k-means and fuzzy C-means over `(direct trust, average precision)` points.
//!
//! These are the clustering kernels of the comparison schemes and exist only
//! to be timed against the three-grid clustering in [`crate::community`].

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusteringError {
    #[error("at least one point is required")]
    NoPoints,
    #[error("cluster count must be at least 1")]
    ZeroClusters,
    #[error("fuzzifier must be greater than 1, got {0}")]
    Fuzzifier(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    /// Direct trust.
    pub x: f64,
    /// Average precision.
    pub y: f64,
}

impl Point2D {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    fn dist2(&self, other: &Point2D) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Iteration caps and tolerances shared by both kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineParams {
    pub clusters: usize,
    pub fuzzifier: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self {
            clusters: 3,
            fuzzifier: 2.0,
            max_iter: 100,
            tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Point2D>,
    pub iterations: usize,
    /// Sum of squared distances after each assignment step.
    pub objective: Vec<f64>,
}

fn nearest(p: &Point2D, centroids: &[Point2D]) -> (usize, f64) {
    let mut best = (0, p.dist2(&centroids[0]));
    for (j, c) in centroids.iter().enumerate().skip(1) {
        let d = p.dist2(c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Lloyd's algorithm with centroids seeded from randomly chosen points.
///
/// Stops once no centroid moves more than `tol` or after `max_iter`
/// rounds. A cluster that empties out is re-seeded at the point farthest
/// from its assigned centroid.
pub fn kmeans(
    points: &[Point2D],
    k: usize,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<KMeansResult, ClusteringError> {
    if points.is_empty() {
        return Err(ClusteringError::NoPoints);
    }
    if k == 0 {
        return Err(ClusteringError::ZeroClusters);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<Point2D> = if k <= points.len() {
        sample(&mut rng, points.len(), k).iter().map(|i| points[i]).collect()
    } else {
        (0..k).map(|_| points[rng.gen_range(0..points.len())]).collect()
    };

    let mut assignments = vec![0; points.len()];
    let mut objective = Vec::new();
    let mut iterations = 0;
    let mut sums = vec![(0.0, 0.0, 0usize); k];
    while iterations < max_iter.max(1) {
        iterations += 1;

        let mut sse = 0.0;
        for (p, a) in points.iter().zip(assignments.iter_mut()) {
            let (j, d) = nearest(p, &centroids);
            *a = j;
            sse += d;
        }
        objective.push(sse);

        sums.iter_mut().for_each(|s| *s = (0.0, 0.0, 0));
        for (p, &a) in points.iter().zip(&assignments) {
            let s = &mut sums[a];
            s.0 += p.x;
            s.1 += p.y;
            s.2 += 1;
        }

        let mut shift = 0.0f64;
        for j in 0..k {
            let (sx, sy, n) = sums[j];
            let next = if n > 0 {
                Point2D::new(sx / n as f64, sy / n as f64)
            } else {
                let far = points
                    .iter()
                    .zip(&assignments)
                    .map(|(p, &a)| (p, p.dist2(&centroids[a])))
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(p, _)| *p)
                    .expect("points is non-empty");
                far
            };
            shift = shift.max(next.dist2(&centroids[j]).sqrt());
            centroids[j] = next;
        }
        if shift < tol {
            break;
        }
    }

    Ok(KMeansResult {
        assignments,
        centroids,
        iterations,
        objective,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FcmResult {
    /// Row `i` holds the memberships of point `i`; rows sum to 1.
    pub memberships: Vec<Vec<f64>>,
    pub centroids: Vec<Point2D>,
    pub iterations: usize,
}

impl FcmResult {
    /// Index of the largest membership for each point.
    pub fn hard_assignments(&self) -> Vec<usize> {
        self.memberships
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map_or(0, |(j, _)| j)
            })
            .collect()
    }
}

fn update_memberships(points: &[Point2D], centroids: &[Point2D], exponent: f64, out: &mut [Vec<f64>]) {
    for (p, row) in points.iter().zip(out.iter_mut()) {
        let d: Vec<f64> = centroids.iter().map(|c| p.dist2(c).sqrt()).collect();
        if let Some(hit) = d.iter().position(|&x| x == 0.0) {
            row.iter_mut()
                .enumerate()
                .for_each(|(j, u)| *u = if j == hit { 1.0 } else { 0.0 });
            continue;
        }
        for j in 0..centroids.len() {
            let s: f64 = d.iter().map(|&dk| (d[j] / dk).powf(exponent)).sum();
            row[j] = 1.0 / s;
        }
    }
}

/// Standard fuzzy C-means with fuzzifier `m`, starting from random
/// row-stochastic memberships. Stops when no membership changes by more
/// than `tol` or after `max_iter` rounds.
pub fn fuzzy_cmeans(
    points: &[Point2D],
    c: usize,
    m: f64,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<FcmResult, ClusteringError> {
    if points.is_empty() {
        return Err(ClusteringError::NoPoints);
    }
    if c == 0 {
        return Err(ClusteringError::ZeroClusters);
    }
    if !(m > 1.0 && m.is_finite()) {
        return Err(ClusteringError::Fuzzifier(m));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut memberships: Vec<Vec<f64>> = points
        .iter()
        .map(|_| {
            let raw: Vec<f64> = (0..c).map(|_| rng.gen_range(0.01..1.0)).collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|u| u / total).collect()
        })
        .collect();

    let exponent = 2.0 / (m - 1.0);
    let mut centroids = vec![Point2D::new(0.0, 0.0); c];
    let mut next = memberships.clone();
    let mut iterations = 0;
    while iterations < max_iter.max(1) {
        iterations += 1;
        for (j, centroid) in centroids.iter_mut().enumerate() {
            let (mut wx, mut wy, mut w) = (0.0, 0.0, 0.0);
            for (p, row) in points.iter().zip(&memberships) {
                let um = row[j].powf(m);
                wx += um * p.x;
                wy += um * p.y;
                w += um;
            }
            if w > 0.0 {
                *centroid = Point2D::new(wx / w, wy / w);
            }
        }
        update_memberships(points, &centroids, exponent, &mut next);
        let change = memberships
            .iter()
            .zip(&next)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0f64, f64::max);
        std::mem::swap(&mut memberships, &mut next);
        if change < tol {
            break;
        }
    }

    Ok(FcmResult {
        memberships,
        centroids,
        iterations,
    })
}
