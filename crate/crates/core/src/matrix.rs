//! Dense symmetric distance matrices and their validation.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Symmetric `N × N` matrix of nonnegative pairwise distances with a zero
/// diagonal, stored row-major.
///
/// Off-diagonal zeros are admitted: they mark coinciding assets, which the
/// energy and scoring layers treat as collisions or doubletons.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from row-major data, rejecting anything that fails
    /// [`validate_matrix`] for reasons other than doubletons.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::Config(format!(
                "expected a nonempty square matrix, got {} entries for size {n}",
                data.len()
            )));
        }
        let report = validate_flat(n, &data);
        if !report.is_valid() {
            return Err(Error::InvalidMatrix(Box::new(report)));
        }
        Ok(DistanceMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let report = validate_matrix(rows);
        if !report.is_valid() {
            return Err(Error::InvalidMatrix(Box::new(report)));
        }
        let n = rows.len();
        Ok(DistanceMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Fills the upper triangle with `dist(i, j)` for `i < j` and mirrors it.
    /// Rows are evaluated through `exec`.
    pub fn from_pair_fn<F>(n: usize, exec: Execution, dist: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Sync + Send,
    {
        let upper: Vec<Vec<f64>> = exec.map_indices(n, |i| ((i + 1)..n).map(|j| dist(i, j)).collect());
        let mut data = vec![0.0; n * n];
        for (i, row) in upper.iter().enumerate() {
            for (offset, &d) in row.iter().enumerate() {
                let j = i + 1 + offset;
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        DistanceMatrix::new(n, data)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Restriction to `indices`, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> DistanceMatrix {
        let m = indices.len();
        let mut data = Vec::with_capacity(m * m);
        for &i in indices {
            for &j in indices {
                data.push(self.get(i, j));
            }
        }
        DistanceMatrix { n: m, data }
    }

    /// Relabels assets so that new asset `a` is old asset `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> DistanceMatrix {
        assert_eq!(perm.len(), self.n, "permutation length");
        self.submatrix(perm)
    }

    pub fn scaled(&self, factor: f64) -> DistanceMatrix {
        DistanceMatrix {
            n: self.n,
            data: self.data.iter().map(|d| d * factor).collect(),
        }
    }

    /// Off-diagonal pairs `(i, j)`, `i < j`, at distance zero.
    pub fn doubletons(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.get(i, j) == 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Arithmetic mean of the `N(N−1)/2` unordered off-diagonal entries.
    pub fn off_diagonal_mean(&self) -> Option<f64> {
        if self.n < 2 {
            return None;
        }
        let upper: Vec<f64> = (0..self.n)
            .flat_map(|i| self.row(i)[i + 1..].iter().copied())
            .collect();
        Some(crate::sum::accumulate(&upper) / upper.len() as f64)
    }

    /// Divides every entry by the off-diagonal arithmetic mean, so the
    /// result has mean distance 1.
    pub fn normalize_mean(&self) -> Result<DistanceMatrix> {
        match self.off_diagonal_mean() {
            Some(mean) if mean > 0.0 => Ok(DistanceMatrix {
                n: self.n,
                data: self.data.iter().map(|d| d / mean).collect(),
            }),
            _ => Err(Error::Domain(
                "cannot mean-normalize a matrix without a positive off-diagonal entry".into(),
            )),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_flat(self.n, &self.data)
    }
}

/// Findings from [`validate_matrix`]. Index pairs are zero-based.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub size: usize,
    /// Set when the input is not square; the other checks are skipped.
    pub shape_error: Option<String>,
    pub max_asymmetry: f64,
    pub asymmetric_pairs: Vec<(usize, usize)>,
    pub nonzero_diagonal: Vec<usize>,
    pub negative_entries: Vec<(usize, usize)>,
    pub non_finite_entries: Vec<(usize, usize)>,
    pub doubletons: Vec<(usize, usize)>,
}

impl ValidationReport {
    /// Well-formed as a distance matrix; doubletons are allowed.
    pub fn is_valid(&self) -> bool {
        self.shape_error.is_none()
            && self.size > 0
            && self.asymmetric_pairs.is_empty()
            && self.nonzero_diagonal.is_empty()
            && self.negative_entries.is_empty()
            && self.non_finite_entries.is_empty()
    }

    /// Valid and free of doubletons.
    pub fn is_clean(&self) -> bool {
        self.is_valid() && self.doubletons.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(e) = &self.shape_error {
            return write!(f, "{e}");
        }
        if self.is_clean() {
            return write!(f, "clean {0}x{0} matrix", self.size);
        }
        let mut parts = Vec::new();
        if !self.asymmetric_pairs.is_empty() {
            parts.push(format!(
                "{} asymmetric pair(s), max |r_ij - r_ji| = {}",
                self.asymmetric_pairs.len(),
                self.max_asymmetry
            ));
        }
        if !self.nonzero_diagonal.is_empty() {
            parts.push(format!("nonzero diagonal at {:?}", self.nonzero_diagonal));
        }
        if !self.negative_entries.is_empty() {
            parts.push(format!("negative entries at {:?}", self.negative_entries));
        }
        if !self.non_finite_entries.is_empty() {
            parts.push(format!("NaN/infinite entries at {:?}", self.non_finite_entries));
        }
        if !self.doubletons.is_empty() {
            parts.push(format!("doubletons (zero distance) at {:?}", self.doubletons));
        }
        write!(f, "{}", parts.join("; "))
    }
}

/// Inspects raw rows for everything that would make them an unusable
/// distance matrix. Never fails; the report says what is wrong.
pub fn validate_matrix(rows: &[Vec<f64>]) -> ValidationReport {
    let n = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return ValidationReport {
            size: n,
            shape_error: Some(format!("row {i} has {} entries, expected {n}", r.len())),
            ..Default::default()
        };
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    validate_flat(n, &flat)
}

fn validate_flat(n: usize, data: &[f64]) -> ValidationReport {
    let mut report = ValidationReport {
        size: n,
        ..Default::default()
    };
    if n == 0 {
        report.shape_error = Some("empty matrix".into());
        return report;
    }
    let at = |i: usize, j: usize| data[i * n + j];
    for i in 0..n {
        let d = at(i, i);
        if d != 0.0 {
            report.nonzero_diagonal.push(i);
        }
        for j in 0..n {
            let v = at(i, j);
            if !v.is_finite() {
                report.non_finite_entries.push((i, j));
            } else if v < 0.0 {
                report.negative_entries.push((i, j));
            }
        }
        for j in (i + 1)..n {
            let (a, b) = (at(i, j), at(j, i));
            if a != b && !(a.is_nan() && b.is_nan()) {
                report.asymmetric_pairs.push((i, j));
                let gap = (a - b).abs();
                if gap > report.max_asymmetry || gap.is_nan() {
                    report.max_asymmetry = gap;
                }
            }
            if a == 0.0 && b == 0.0 {
                report.doubletons.push((i, j));
            }
        }
    }
    report
}
