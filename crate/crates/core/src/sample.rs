//! Seeded generators for spaces and measures used by the verification
//! suites and examples.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::measure::FiniteMeasure;
use crate::metric_space::{MetricSpace, Norm};
use crate::thickening::Thickening;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` uniform points in `[0, 10]²` with the Euclidean metric, labelled
/// `{prefix}0 .. {prefix}{n-1}`. Distinct with probability one.
pub fn random_planar_space<R: Rng>(rng: &mut R, n: usize, prefix: &str) -> Arc<MetricSpace> {
    let labels = (0..n).map(|i| format!("{prefix}{i}")).collect();
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|_| vec![rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)])
        .collect();
    Arc::new(MetricSpace::from_points(labels, &coords, Norm::L2).expect("well-formed point cloud"))
}

/// Uniform point of the standard simplex with `k` vertices, via normalized
/// exponential variates.
pub fn simplex_weights<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln() + f64::MIN_POSITIVE).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Random measure supported on `points` (all of them), uniform-simplex
/// weights.
pub fn random_measure_on<R: Rng>(rng: &mut R, space: &Arc<MetricSpace>, points: &[usize]) -> FiniteMeasure {
    let w = simplex_weights(rng, points.len());
    FiniteMeasure::from_arithmetic(Arc::clone(space), points.iter().copied().zip(w))
        .expect("weights on distinct points sum to one")
}

/// Random measure in the metric realization of `t`: pick a maximal face,
/// a nonempty subset of it, then uniform-simplex weights.
pub fn random_contained_measure<R: Rng>(rng: &mut R, t: &Thickening) -> FiniteMeasure {
    let faces = t.maximal_point_faces();
    let face = faces.choose(rng).expect("nonempty complex");
    let size = rng.gen_range(1..=face.len());
    let mut subset: Vec<usize> = face.choose_multiple(rng, size).copied().collect();
    subset.sort_unstable();
    random_measure_on(rng, t.space(), &subset)
}

/// Random nonempty subset of the points of `space` of at most `max_size`
/// points.
pub fn random_support<R: Rng>(rng: &mut R, space: &MetricSpace, max_size: usize) -> Vec<usize> {
    let all: Vec<usize> = (0..space.len()).collect();
    let size = rng.gen_range(1..=max_size.min(space.len()));
    let mut s: Vec<usize> = all.choose_multiple(rng, size).copied().collect();
    s.sort_unstable();
    s
}
