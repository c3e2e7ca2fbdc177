//! Fixtures shared by unit tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec::Execution;
use crate::matrix::DistanceMatrix;

/// Normalized semantic distances between six smiley emojis.
pub fn emoji_matrix() -> DistanceMatrix {
    DistanceMatrix::from_rows(&[
        vec![0.0, 0.5, 0.7, 0.8, 1.0, 1.2],
        vec![0.5, 0.0, 0.8, 0.9, 1.0, 1.2],
        vec![0.7, 0.8, 0.0, 0.8, 1.1, 1.3],
        vec![0.8, 0.9, 0.8, 0.0, 1.1, 1.3],
        vec![1.0, 1.0, 1.1, 1.1, 0.0, 1.3],
        vec![1.2, 1.2, 1.3, 1.3, 1.3, 0.0],
    ])
    .unwrap()
}

/// `n` assets all at mutual distance `d`.
pub fn equilateral(n: usize, d: f64) -> DistanceMatrix {
    DistanceMatrix::from_pair_fn(n, Execution::Sequential, |_, _| d).unwrap()
}

/// Points on a line.
pub fn line(xs: &[f64]) -> DistanceMatrix {
    DistanceMatrix::from_pair_fn(xs.len(), Execution::Sequential, |i, j| (xs[i] - xs[j]).abs()).unwrap()
}

/// Euclidean distances between `n` uniform points in the unit `dim`-cube.
pub fn random_points(n: usize, dim: usize, seed: u64) -> DistanceMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
    DistanceMatrix::from_pair_fn(n, Execution::Sequential, |i, j| {
        pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    })
    .unwrap()
}
