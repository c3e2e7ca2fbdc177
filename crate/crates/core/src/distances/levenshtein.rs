use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::matrix::DistanceMatrix;

/// Minimum number of single-character insertions, deletions and
/// substitutions turning `a` into `b`, counted over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    edit_distance(&a, &b)
}

fn edit_distance(a: &[char], b: &[char]) -> usize {
    // Keep the shorter string along the row.
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let above = row[j + 1];
            row[j + 1] = if ca == cb { diag } else { 1 + diag.min(above).min(row[j]) };
            diag = above;
        }
    }
    row[b.len()]
}

pub fn levenshtein_matrix<S: AsRef<str> + Sync>(texts: &[S]) -> Result<DistanceMatrix> {
    levenshtein_matrix_with(texts, Execution::default())
}

/// Pairwise edit distances as reals. Duplicate texts produce zero entries,
/// left for the scoring layer to treat as doubletons.
pub fn levenshtein_matrix_with<S: AsRef<str> + Sync>(texts: &[S], exec: Execution) -> Result<DistanceMatrix> {
    if texts.len() < 2 {
        return Err(Error::TooFewAssets { n: texts.len(), required: 2 });
    }
    let chars: Vec<Vec<char>> = texts.iter().map(|t| t.as_ref().chars().collect()).collect();
    DistanceMatrix::from_pair_fn(chars.len(), exec, |i, j| edit_distance(&chars[i], &chars[j]) as f64)
}
