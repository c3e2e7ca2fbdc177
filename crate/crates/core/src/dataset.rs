//! Reading assets from disk.
//!
//! Three source kinds are supported:
//!
//! * vectors: CSV with header `id[,date],v0,..,v{d-1}`
//! * matrix: square CSV whose header row and first column carry the ids
//! * texts: UTF-8 with one asset per line (the line is also its id), or CSV
//!   with header `id,text[,date]` when the file name ends in `.csv`
//!
//! Dates are ISO-8601 calendar dates or timestamps and may also come from a
//! separate `id,date` file.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::Serialize;

use crate::distances::FeatureVectors;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Vectors,
    Matrix,
    Texts,
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceKind::Vectors => "vectors",
            SourceKind::Matrix => "matrix",
            SourceKind::Texts => "texts",
        })
    }
}

/// Granularity at which asset dates are compared.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DatePrecision {
    #[default]
    Day,
    Second,
}

impl FromStr for DatePrecision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "day" => Ok(DatePrecision::Day),
            "second" => Ok(DatePrecision::Second),
            _ => Err(Error::Parse(format!("unknown date precision {s:?}; expected day or second"))),
        }
    }
}

/// Parses `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM[:SS[.f]]` (a space also separates)
/// or an RFC 3339 timestamp with offset, which is converted to UTC.
pub fn parse_date(s: &str) -> Result<NaiveDateTime> {
    let s = s.trim();
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(d.and_hms_opt(0, 0, 0).expect("midnight"));
    }
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Ok(t.naive_utc());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(t);
        }
    }
    Err(Error::Parse(format!("invalid ISO-8601 date {s:?}")))
}

/// Sort key of a date at the given precision.
pub fn date_key(t: &NaiveDateTime, precision: DatePrecision) -> i64 {
    match precision {
        DatePrecision::Day => t.date().signed_duration_since(NaiveDate::default()).num_days(),
        DatePrecision::Second => t.and_utc().timestamp(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Asset {
    pub id: String,
    pub date: Option<NaiveDateTime>,
    pub vector: Option<Vec<f64>>,
    pub text: Option<String>,
}

impl Asset {
    fn new(id: String) -> Self {
        Asset {
            id,
            date: None,
            vector: None,
            text: None,
        }
    }
}

/// A set of uniquely identified assets of one source kind. Matrix datasets
/// also carry the raw (unvalidated) matrix rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    assets: Vec<Asset>,
    kind: SourceKind,
    matrix_rows: Option<Vec<Vec<f64>>>,
}

fn check_unique<'a>(ids: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::DuplicateId(id.to_owned()));
        }
    }
    Ok(())
}

impl Dataset {
    pub fn from_vectors(vectors: &FeatureVectors) -> Result<Self> {
        let assets = vectors
            .ids()
            .iter()
            .zip(vectors.rows())
            .map(|(id, row)| Asset {
                vector: Some(row.clone()),
                ..Asset::new(id.clone())
            })
            .collect();
        Ok(Dataset {
            assets,
            kind: SourceKind::Vectors,
            matrix_rows: None,
        })
    }

    pub fn from_texts(ids: Vec<String>, texts: Vec<String>) -> Result<Self> {
        if ids.len() != texts.len() {
            return Err(Error::Config(format!("{} ids for {} texts", ids.len(), texts.len())));
        }
        check_unique(ids.iter().map(String::as_str))?;
        let assets = ids
            .into_iter()
            .zip(texts)
            .map(|(id, text)| Asset {
                text: Some(text),
                ..Asset::new(id)
            })
            .collect();
        Ok(Dataset {
            assets,
            kind: SourceKind::Texts,
            matrix_rows: None,
        })
    }

    /// Rows are kept as given; validation happens when the pipeline builds
    /// the matrix, so a malformed file still yields a full report.
    pub fn from_matrix(ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if ids.len() != rows.len() {
            return Err(Error::Config(format!("{} ids for {} matrix rows", ids.len(), rows.len())));
        }
        check_unique(ids.iter().map(String::as_str))?;
        Ok(Dataset {
            assets: ids.into_iter().map(Asset::new).collect(),
            kind: SourceKind::Matrix,
            matrix_rows: Some(rows),
        })
    }

    pub fn kind(&self) -> SourceKind {
        self.kind
    }

    pub fn assets(&self) -> &[Asset] {
        &self.assets
    }

    pub fn len(&self) -> usize {
        self.assets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assets.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.assets.iter().map(|a| a.id.clone()).collect()
    }

    pub fn matrix_rows(&self) -> Option<&[Vec<f64>]> {
        self.matrix_rows.as_deref()
    }

    pub fn texts(&self) -> Option<Vec<&str>> {
        self.assets.iter().map(|a| a.text.as_deref()).collect()
    }

    pub fn vectors(&self) -> Result<FeatureVectors> {
        let rows = self
            .assets
            .iter()
            .map(|a| a.vector.clone())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Config(format!("{} dataset has no feature vectors", self.kind)))?;
        FeatureVectors::new(self.ids(), rows)
    }

    /// Date keys for time-ordered scoring; every asset must be dated.
    pub fn date_keys(&self, precision: DatePrecision) -> Result<Vec<i64>> {
        self.assets
            .iter()
            .map(|a| {
                a.date
                    .as_ref()
                    .map(|t| date_key(t, precision))
                    .ok_or_else(|| Error::Config(format!("asset {:?} has no date; time-ordered scoring needs every asset dated", a.id)))
            })
            .collect()
    }

    /// Assigns dates by id. Ids unknown to the dataset are an error; assets
    /// absent from `dates` keep whatever date they had.
    pub fn with_dates(mut self, dates: &HashMap<String, NaiveDateTime>) -> Result<Self> {
        let index: HashMap<&str, usize> = self.assets.iter().enumerate().map(|(i, a)| (a.id.as_str(), i)).collect();
        let mut updates = Vec::with_capacity(dates.len());
        for (id, t) in dates {
            let i = *index
                .get(id.as_str())
                .ok_or_else(|| Error::Config(format!("dates file names unknown asset {id:?}")))?;
            updates.push((i, *t));
        }
        for (i, t) in updates {
            self.assets[i].date = Some(t);
        }
        Ok(self)
    }

    pub fn load(kind: SourceKind, path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
        match kind {
            SourceKind::Vectors => read_vectors(file),
            SourceKind::Matrix => read_matrix(file),
            SourceKind::Texts if has_csv_extension(path) => read_text_csv(file),
            SourceKind::Texts => read_text_lines(file),
        }
    }
}

fn has_csv_extension(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input)
}

fn parse_number(s: &str, line: u64, column: usize) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Parse(format!("line {line}, column {}: {s:?} is not a number", column + 1)))
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

pub fn read_vectors<R: Read>(input: R) -> Result<Dataset> {
    let mut reader = csv_reader(input);
    let header = reader.headers()?.clone();
    if header.get(0) != Some("id") {
        return Err(Error::Parse("vector file header must start with an id column".into()));
    }
    let dated = header.get(1) == Some("date");
    let first = if dated { 2 } else { 1 };
    let dim = header.len().saturating_sub(first);
    if dim == 0 {
        return Err(Error::Parse("vector file has no coordinate columns".into()));
    }
    let mut assets = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = line_of(&record);
        if record.len() != header.len() {
            return Err(Error::DimensionMismatch {
                row,
                expected: dim,
                found: record.len().saturating_sub(first),
            });
        }
        let mut asset = Asset::new(record[0].to_owned());
        if dated && !record[1].is_empty() {
            asset.date = Some(parse_date(&record[1])?);
        }
        asset.vector = Some(
            (first..record.len())
                .map(|c| parse_number(&record[c], line, c))
                .collect::<Result<_>>()?,
        );
        assets.push(asset);
    }
    let ids: Vec<String> = assets.iter().map(|a| a.id.clone()).collect();
    let rows: Vec<Vec<f64>> = assets.iter().map(|a| a.vector.clone().unwrap_or_default()).collect();
    // Validates finiteness, dimensions and id uniqueness.
    FeatureVectors::new(ids, rows)?;
    Ok(Dataset {
        assets,
        kind: SourceKind::Vectors,
        matrix_rows: None,
    })
}

pub fn read_matrix<R: Read>(input: R) -> Result<Dataset> {
    let mut reader = csv_reader(input);
    let header = reader.headers()?.clone();
    let ids: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut rows = Vec::with_capacity(ids.len());
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = line_of(&record);
        match ids.get(row) {
            Some(id) if id == &record[0] => {}
            Some(id) => {
                return Err(Error::Parse(format!(
                    "line {line}: row id {:?} does not match column id {id:?}",
                    &record[0]
                )))
            }
            None => return Err(Error::Parse(format!("line {line}: more rows than header ids"))),
        }
        rows.push(
            (1..record.len())
                .map(|c| parse_number(&record[c], line, c))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    if rows.len() != ids.len() {
        return Err(Error::Parse(format!(
            "matrix header names {} ids but the file has {} rows",
            ids.len(),
            rows.len()
        )));
    }
    Dataset::from_matrix(ids, rows)
}

pub fn read_text_lines<R: Read>(input: R) -> Result<Dataset> {
    let mut texts = Vec::new();
    for line in BufReader::new(input).lines() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if !line.trim().is_empty() {
            texts.push(line.to_owned());
        }
    }
    Dataset::from_texts(texts.clone(), texts)
}

pub fn read_text_csv<R: Read>(input: R) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().from_reader(input);
    let header = reader.headers()?.clone();
    if header.get(0).map(str::trim) != Some("id") || header.get(1).map(str::trim) != Some("text") {
        return Err(Error::Parse("text CSV header must be id,text[,date]".into()));
    }
    let dated = header.get(2).map(str::trim) == Some("date");
    let mut ids = Vec::new();
    let mut texts = Vec::new();
    let mut dates = Vec::new();
    for record in reader.records() {
        let record = record?;
        ids.push(record[0].trim().to_owned());
        texts.push(record[1].to_owned());
        dates.push(match record.get(2).map(str::trim) {
            Some(s) if dated && !s.is_empty() => Some(parse_date(s)?),
            _ => None,
        });
    }
    let mut ds = Dataset::from_texts(ids, texts)?;
    for (asset, date) in ds.assets.iter_mut().zip(dates) {
        asset.date = date;
    }
    Ok(ds)
}

/// Reads an `id,date` CSV.
pub fn read_dates<R: Read>(input: R) -> Result<HashMap<String, NaiveDateTime>> {
    let mut reader = csv_reader(input);
    let header = reader.headers()?.clone();
    if header.get(0) != Some("id") || header.get(1) != Some("date") {
        return Err(Error::Parse("dates file header must be id,date".into()));
    }
    let mut out = HashMap::new();
    for record in reader.records() {
        let record = record?;
        if out.insert(record[0].to_owned(), parse_date(&record[1])?).is_some() {
            return Err(Error::DuplicateId(record[0].to_owned()));
        }
    }
    Ok(out)
}
