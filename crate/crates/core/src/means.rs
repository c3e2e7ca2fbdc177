//! Power (generalized) means `M_p(d) = ((1/n) Σ d_i^p)^{1/p}` for `p ≤ 0`.
//!
//! `p = -1` is the harmonic mean, `p = 0` the geometric mean (as a limit)
//! and `p = -∞` the minimum. For every `p ≤ 0` a single zero drives the
//! mean to zero, which is what lets a collision zero out a score.

use crate::error::{Error, Result};

pub fn check_exponent(p: f64) -> Result<()> {
    if p <= 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "generalized-mean exponent must be less than or equal to zero, got {p}"
        )))
    }
}

/// `M_p` of nonnegative `values`. Terms are scaled by the minimum before
/// exponentiation, so large `|p|` neither overflows nor loses the minimum.
pub fn generalized_mean(values: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    if values.is_empty() {
        return Err(Error::Domain("mean of an empty set".into()));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::Domain(format!("mean requires finite nonnegative values, got {v}")));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 || p == f64::NEG_INFINITY {
        return Ok(min);
    }
    Ok(min * scaled_mean(values.iter().map(|v| v / min), values.len(), p))
}

/// `M_p` of already-scaled terms `x_i = d_i / m`, each `≥ 1`, without the
/// final multiplication by `m`.
pub(crate) fn scaled_mean(scaled: impl Iterator<Item = f64>, n: usize, p: f64) -> f64 {
    let terms: Vec<f64> = scaled.map(|x| power_term(x, p)).collect();
    finish_mean(crate::sum::accumulate(&terms), n, p)
}

/// Summand for a scaled distance `x ≥ 1`: `x^p`, or `ln x` for the
/// geometric mean.
#[inline]
pub(crate) fn power_term(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        x.ln()
    } else if p == -1.0 {
        1.0 / x
    } else {
        x.powf(p)
    }
}

/// Turns a sum of `n` power terms back into a (scaled) mean.
#[inline]
pub(crate) fn finish_mean(sum: f64, n: usize, p: f64) -> f64 {
    let avg = sum / n as f64;
    if p == 0.0 {
        avg.exp()
    } else if p == -1.0 {
        1.0 / avg
    } else {
        avg.powf(1.0 / p)
    }
}
