//! Wall-clock comparison of the three-grid clustering against k-means and
//! fuzzy C-means on the same seeded reports.

use std::fmt;
use std::hint::black_box;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baseline_filters::{fuzzy_cmeans, kmeans, BaselineParams, Point2D};
use crate::community::{form_clusters, DeviceId, PrecisionMatrix, SpId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Grid,
    Kmeans,
    Fcm,
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [Kernel::Grid, Kernel::Kmeans, Kernel::Fcm];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Grid => "grid",
            Kernel::Kmeans => "kmeans",
            Kernel::Fcm => "fcm",
        }
    }

    pub fn from_name(name: &str) -> Option<Kernel> {
        Kernel::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub kernel: Kernel,
    pub median_us: f64,
}

/// `n` points uniform over the unit square, as `(direct trust, precision)`.
pub fn bench_points(n: usize, seed: u64) -> Vec<Point2D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Point2D::new(rng.gen(), rng.gen())).collect()
}

fn median(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(f64::total_cmp);
    let m = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[m]
    } else {
        0.5 * (samples[m - 1] + samples[m])
    }
}

fn time_us<T>(reps: usize, mut f: impl FnMut() -> T) -> f64 {
    black_box(f());
    let samples = (0..reps)
        .map(|_| {
            let start = Instant::now();
            black_box(f());
            start.elapsed().as_secs_f64() * 1e6
        })
        .collect();
    median(samples)
}

/// Median wall time per kernel for each size, in microseconds. Each kernel
/// gets one untimed warm-up call before `reps` timed calls.
pub fn bench_clustering(sizes: &[usize], reps: usize, seed: u64) -> Vec<BenchRow> {
    let params = BaselineParams::default();
    let reps = reps.max(1);
    let mut rows = Vec::with_capacity(sizes.len() * 3);
    for &n in sizes {
        let points = bench_points(n, seed ^ n as u64);
        let mut pt = PrecisionMatrix::new(1, n);
        for (i, p) in points.iter().enumerate() {
            pt.set(SpId(0), DeviceId(i), p.y).expect("index in range");
        }
        let reports: Vec<(DeviceId, f64)> = points.iter().enumerate().map(|(i, p)| (DeviceId(i), p.x)).collect();

        for kernel in Kernel::ALL {
            let median_us = match kernel {
                Kernel::Grid => time_us(reps, || form_clusters(black_box(&reports), black_box(&pt))),
                Kernel::Kmeans => time_us(reps, || {
                    kmeans(black_box(&points), params.clusters, params.max_iter, params.tol, seed)
                }),
                Kernel::Fcm => time_us(reps, || {
                    fuzzy_cmeans(
                        black_box(&points),
                        params.clusters,
                        params.fuzzifier,
                        params.max_iter,
                        params.tol,
                        seed,
                    )
                }),
            };
            rows.push(BenchRow { n, kernel, median_us });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_two_sizes() {
        let rows = bench_clustering(&[150, 300], 3, 1);
        assert_eq!(rows.len(), 6);
        assert_eq!(rows.iter().filter(|r| r.n == 300).count(), 3);
        assert!(rows.iter().all(|r| r.median_us >= 0.0));
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn kernel_names_round_trip() {
        for k in Kernel::ALL {
            assert_eq!(Kernel::from_name(k.name()), Some(k));
        }
    }
}
