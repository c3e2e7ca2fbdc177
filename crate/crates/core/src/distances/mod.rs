//! Building distance matrices from feature vectors and raw text.

mod euclidean;
mod levenshtein;
mod text;

pub use euclidean::{euclidean_matrix, euclidean_matrix_with, FeatureVectors};
pub use levenshtein::{levenshtein, levenshtein_matrix, levenshtein_matrix_with};
pub use text::{
    char_tokens, extract_frequency_vectors, frequency_basis, text_matrix, text_matrix_with, word_tokens,
    ExtractionMode, ExtractionScheme,
};

pub use crate::matrix::{validate_matrix, ValidationReport};

use crate::error::Result;
use crate::matrix::DistanceMatrix;

/// Rescales `d` so its mean off-diagonal distance is 1.
pub fn normalize_mean(d: &DistanceMatrix) -> Result<DistanceMatrix> {
    d.normalize_mean()
}
