//! Floating-point accumulation for long reciprocal sums.

/// Above this length, [`accumulate`] switches from a straight loop to
/// pairwise summation.
pub const PAIRWISE_THRESHOLD: usize = 1024;

const BLOCK: usize = 128;

/// Sums `values`; pairwise (tree) summation for slices longer than
/// [`PAIRWISE_THRESHOLD`], whose rounding error grows as `O(log n)` rather
/// than `O(n)`.
pub fn accumulate(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_THRESHOLD {
        values.iter().sum()
    } else {
        pairwise(values)
    }
}

fn pairwise(values: &[f64]) -> f64 {
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    pairwise(lo) + pairwise(hi)
}
