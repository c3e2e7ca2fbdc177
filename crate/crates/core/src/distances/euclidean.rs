use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::matrix::DistanceMatrix;

/// Identified points of equal dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVectors {
    ids: Vec<String>,
    dim: usize,
    rows: Vec<Vec<f64>>,
}

impl FeatureVectors {
    pub fn new(ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if ids.len() != rows.len() {
            return Err(Error::Config(format!("{} ids for {} vectors", ids.len(), rows.len())));
        }
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::Config("feature vectors need at least one row and one dimension".into()));
        }
        for (row, v) in rows.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { row, expected: dim, found: v.len() });
            }
            if let Some(x) = v.iter().find(|x| !x.is_finite()) {
                return Err(Error::Domain(format!("non-finite coordinate {x} in row {row}")));
            }
        }
        let mut seen = HashSet::with_capacity(ids.len());
        if let Some(dup) = ids.iter().find(|id| !seen.insert(id.as_str())) {
            return Err(Error::DuplicateId(dup.clone()));
        }
        Ok(FeatureVectors { ids, dim, rows })
    }

    /// Rows labelled `0..N`.
    pub fn unlabeled(rows: Vec<Vec<f64>>) -> Result<Self> {
        let ids = (0..rows.len()).map(|i| i.to_string()).collect();
        FeatureVectors::new(ids, rows)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn with_ids(self, ids: Vec<String>) -> Result<Self> {
        FeatureVectors::new(ids, self.rows)
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn euclidean_matrix(vectors: &FeatureVectors) -> Result<DistanceMatrix> {
    euclidean_matrix_with(vectors, Execution::default())
}

pub fn euclidean_matrix_with(vectors: &FeatureVectors, exec: Execution) -> Result<DistanceMatrix> {
    if vectors.len() < 2 {
        return Err(Error::TooFewAssets { n: vectors.len(), required: 2 });
    }
    let rows = vectors.rows();
    DistanceMatrix::from_pair_fn(rows.len(), exec, |i, j| euclidean(&rows[i], &rows[j]))
}
