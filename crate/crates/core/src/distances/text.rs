//! Text extraction: relative word or character frequencies in the union
//! basis of a corpus, or edit distances between the raw strings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::euclidean::{euclidean_matrix_with, FeatureVectors};
use super::levenshtein::levenshtein_matrix_with;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::matrix::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionMode {
    WordFrequency,
    CharFrequency,
    Levenshtein,
}

impl FromStr for ExtractionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "word" | "word_frequency" => Ok(ExtractionMode::WordFrequency),
            "char" | "char_frequency" => Ok(ExtractionMode::CharFrequency),
            "levenshtein" | "edit" => Ok(ExtractionMode::Levenshtein),
            _ => Err(Error::Parse(format!("unknown extraction {s:?}; expected word, char or levenshtein"))),
        }
    }
}

impl fmt::Display for ExtractionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtractionMode::WordFrequency => "word",
            ExtractionMode::CharFrequency => "char",
            ExtractionMode::Levenshtein => "levenshtein",
        })
    }
}

/// How text becomes distances.
///
/// Word tokens: after optional case folding, runs of alphanumeric characters
/// form words; an apostrophe followed by letters starts a clitic token
/// (`philosopher's` → `philosopher`, `'s`); every other punctuation mark is a
/// token of its own; whitespace separates. With `detach_punctuation` off the
/// text is only split on whitespace.
///
/// Character tokens: every character after case folding, whitespace excluded
/// unless `keep_whitespace` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExtractionScheme {
    pub mode: ExtractionMode,
    pub lowercase: bool,
    pub detach_punctuation: bool,
    pub keep_whitespace: bool,
}

impl ExtractionScheme {
    pub fn new(mode: ExtractionMode) -> Self {
        ExtractionScheme {
            mode,
            lowercase: true,
            detach_punctuation: true,
            keep_whitespace: false,
        }
    }

    fn fold(&self, text: &str) -> String {
        if self.lowercase {
            text.to_lowercase()
        } else {
            text.to_owned()
        }
    }
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}')
}

pub fn word_tokens(text: &str, scheme: &ExtractionScheme) -> Vec<String> {
    let text = scheme.fold(text);
    if !scheme.detach_punctuation {
        return text.split_whitespace().map(str::to_owned).collect();
    }
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_alphanumeric() {
            current.push(c);
            continue;
        }
        if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
        if c.is_whitespace() {
            continue;
        }
        if is_apostrophe(c) && chars.peek().is_some_and(|n| n.is_alphabetic()) {
            // Clitic: the apostrophe leads the following word.
            current.push('\'');
            continue;
        }
        tokens.push(c.to_string());
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

pub fn char_tokens(text: &str, scheme: &ExtractionScheme) -> Vec<String> {
    scheme
        .fold(text)
        .chars()
        .filter(|c| scheme.keep_whitespace || !c.is_whitespace())
        .map(String::from)
        .collect()
}

fn tokenize_all<S: AsRef<str>>(texts: &[S], scheme: &ExtractionScheme) -> Result<Vec<Vec<String>>> {
    let tokenize = match scheme.mode {
        ExtractionMode::WordFrequency => word_tokens,
        ExtractionMode::CharFrequency => char_tokens,
        ExtractionMode::Levenshtein => {
            return Err(Error::Config("edit distances do not produce frequency vectors".into()));
        }
    };
    texts
        .iter()
        .enumerate()
        .map(|(index, t)| {
            let tokens = tokenize(t.as_ref(), scheme);
            if tokens.is_empty() {
                Err(Error::EmptyText { index })
            } else {
                Ok(tokens)
            }
        })
        .collect()
}

/// Sorted union of the tokens of all texts.
pub fn frequency_basis<S: AsRef<str>>(texts: &[S], scheme: &ExtractionScheme) -> Result<Vec<String>> {
    let tokens = tokenize_all(texts, scheme)?;
    Ok(tokens.into_iter().flatten().collect::<BTreeSet<_>>().into_iter().collect())
}

/// Relative token frequencies (count / token count) of each text, in the
/// sorted union basis. Rows are labelled by position.
pub fn extract_frequency_vectors<S: AsRef<str>>(texts: &[S], scheme: &ExtractionScheme) -> Result<FeatureVectors> {
    if texts.len() < 2 {
        return Err(Error::TooFewAssets { n: texts.len(), required: 2 });
    }
    let tokens = tokenize_all(texts, scheme)?;
    let basis: BTreeMap<&str, usize> = tokens
        .iter()
        .flatten()
        .map(String::as_str)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, t)| (t, i))
        .collect();
    let rows = tokens
        .iter()
        .map(|toks| {
            let mut v = vec![0.0; basis.len()];
            for t in toks {
                v[basis[t.as_str()]] += 1.0;
            }
            let total = toks.len() as f64;
            v.iter_mut().for_each(|x| *x /= total);
            v
        })
        .collect();
    FeatureVectors::unlabeled(rows)
}

pub fn text_matrix<S: AsRef<str> + Sync>(texts: &[S], scheme: &ExtractionScheme) -> Result<DistanceMatrix> {
    text_matrix_with(texts, scheme, Execution::default())
}

/// Distances for a text corpus: Euclidean between frequency vectors, or
/// edit distances between the (optionally case-folded) texts.
pub fn text_matrix_with<S: AsRef<str> + Sync>(
    texts: &[S],
    scheme: &ExtractionScheme,
    exec: Execution,
) -> Result<DistanceMatrix> {
    match scheme.mode {
        ExtractionMode::Levenshtein => {
            let folded: Vec<String> = texts.iter().map(|t| scheme.fold(t.as_ref())).collect();
            levenshtein_matrix_with(&folded, exec)
        }
        _ => euclidean_matrix_with(&extract_frequency_vectors(texts, scheme)?, exec),
    }
}
