//! Pearson and Spearman correlation between score columns.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlations {
    pub pearson: f64,
    pub spearman: f64,
}

pub fn correlations(a: &[f64], b: &[f64]) -> Result<Correlations> {
    Ok(Correlations {
        pearson: pearson(a, b)?,
        spearman: spearman(a, b)?,
    })
}

fn check_inputs(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::UndefinedCorrelation(format!("length mismatch: {} vs {}", a.len(), b.len())));
    }
    if a.len() < 3 {
        return Err(Error::UndefinedCorrelation(format!("need at least 3 pairs, got {}", a.len())));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::UndefinedCorrelation("non-finite value".into()));
    }
    Ok(())
}

/// Product-moment correlation.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    check_inputs(a, b)?;
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance".into()));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Rank correlation: Pearson on average ranks, so ties share their mean rank.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    check_inputs(a, b)?;
    pearson(&average_ranks(a), &average_ranks(b))
}

/// 1-based ranks in ascending order, ties receiving the mean of the ranks
/// they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end hold ranks start+1..=end.
        let mean = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mean;
        }
        start = end;
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identical_columns() {
        let a = [0.3, 1.2, -4.0, 2.2, 0.0];
        let c = correlations(&a, &a).unwrap();
        assert_relative_eq!(c.pearson, 1.0, max_relative = 1e-15);
        assert_relative_eq!(c.spearman, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn reversed_order() {
        let a = [1.0, 2.0, 3.0, 5.0, 8.0];
        let b = [9.0, 7.0, 4.0, 2.0, 1.5];
        assert_relative_eq!(spearman(&a, &b).unwrap(), -1.0, max_relative = 1e-15);
    }

    #[test]
    fn known_values() {
        // Checked against scipy.stats.
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [2.0, 4.0, 5.0, 4.0, 5.0];
        assert_relative_eq!(pearson(&x, &y).unwrap(), 0.7745966692414834, max_relative = 1e-12);
        assert_relative_eq!(spearman(&x, &y).unwrap(), 0.7378647873726218, max_relative = 1e-12);
    }

    #[test]
    fn ties_get_average_ranks() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0, 20.0]), vec![1.5, 3.5, 1.5, 5.0, 3.5]);
    }

    #[test]
    fn undefined_cases() {
        assert!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(spearman(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }
}
