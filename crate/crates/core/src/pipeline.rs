//! End-to-end runs: dataset → distance matrix → scores → report files.
//!
//! Output is deterministic: the same dataset and options give byte-identical
//! files regardless of the execution strategy or thread count.

use std::io::Write;

use serde::Serialize;

use crate::dataset::{DatePrecision, Dataset, SourceKind};
use crate::distances::{euclidean_matrix_with, text_matrix_with, ExtractionScheme};
use crate::energy::EnergyBreakdown;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::matrix::{validate_matrix, DistanceMatrix};
use crate::potential::PotentialSpec;
use crate::score::{score_all_with, time_ordered_scores_with, AssetFlag, ScoreConfig, ScoreReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub config: ScoreConfig,
    /// Required for text datasets, rejected for the others.
    pub extraction: Option<ExtractionScheme>,
    /// Divide distances by their off-diagonal mean before scoring.
    pub normalize: bool,
    pub date_precision: DatePrecision,
    pub exec: Execution,
}

impl PipelineOptions {
    pub fn new(config: ScoreConfig) -> Self {
        PipelineOptions {
            config,
            extraction: None,
            normalize: false,
            date_precision: DatePrecision::default(),
            exec: Execution::default(),
        }
    }

    pub fn with_extraction(mut self, extraction: Option<ExtractionScheme>) -> Self {
        self.extraction = extraction;
        self
    }

    pub fn with_normalize(mut self, normalize: bool) -> Self {
        self.normalize = normalize;
        self
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub ids: Vec<String>,
    pub matrix: DistanceMatrix,
    pub report: ScoreReport,
    pub options: PipelineOptions,
    pub warnings: Vec<String>,
}

/// Distance matrix of a dataset, validated. Invalid input yields
/// [`Error::InvalidMatrix`] carrying the full report.
pub fn build_matrix(dataset: &Dataset, extraction: Option<&ExtractionScheme>, exec: Execution) -> Result<DistanceMatrix> {
    match (dataset.kind(), extraction) {
        (SourceKind::Texts, None) => Err(Error::Config(
            "text datasets need an extraction scheme (word, char or levenshtein)".into(),
        )),
        (SourceKind::Texts, Some(scheme)) => {
            let texts = dataset.texts().ok_or_else(|| Error::Config("text dataset without texts".into()))?;
            text_matrix_with(&texts, scheme, exec)
        }
        (kind, Some(_)) => Err(Error::Config(format!("extraction applies only to text datasets, not {kind}"))),
        (SourceKind::Vectors, None) => euclidean_matrix_with(&dataset.vectors()?, exec),
        (SourceKind::Matrix, None) => {
            let rows = dataset.matrix_rows().ok_or_else(|| Error::Config("matrix dataset without rows".into()))?;
            let report = validate_matrix(rows);
            if !report.is_valid() {
                return Err(Error::InvalidMatrix(Box::new(report)));
            }
            DistanceMatrix::from_rows(rows)
        }
    }
}

/// As [`build_matrix`], followed by mean normalization when requested.
pub fn prepare_matrix(dataset: &Dataset, options: &PipelineOptions) -> Result<(DistanceMatrix, Vec<String>)> {
    let mut warnings = Vec::new();
    let mut matrix = build_matrix(dataset, options.extraction.as_ref(), options.exec)?;
    let doubletons = matrix.doubletons();
    if !doubletons.is_empty() {
        warnings.push(format!("{} pair(s) of assets at distance 0", doubletons.len()));
    }
    if options.normalize {
        matrix = matrix.normalize_mean()?;
        if let PotentialSpec::Screened { alpha } = options.config.potential {
            if alpha > 0.0 {
                warnings.push(format!("screening rate {alpha} now applies in units of the mean distance"));
            }
        }
    }
    Ok((matrix, warnings))
}

pub fn run_pipeline(dataset: &Dataset, options: &PipelineOptions) -> Result<PipelineOutput> {
    options.config.validate()?;
    let (matrix, warnings) = prepare_matrix(dataset, options)?;
    let report = if options.config.time_ordered {
        let keys = dataset.date_keys(options.date_precision)?;
        time_ordered_scores_with(&matrix, &keys, &options.config, options.exec)?
    } else {
        score_all_with(&matrix, &options.config, options.exec)?
    };
    Ok(PipelineOutput {
        ids: dataset.ids(),
        matrix,
        report,
        options: *options,
        warnings,
    })
}

fn flag_text(flag: &AssetFlag, ids: &[String]) -> String {
    match *flag {
        AssetFlag::Collision { with } => format!("collision_with:{}", ids[with]),
        AssetFlag::Duplicate { of } => format!("duplicate_of:{}", ids[of]),
        AssetFlag::Unscorable => "unscorable".into(),
    }
}

fn opt_string<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

/// `id,score,rank` CSV at full precision, with a trailing `flag` column when
/// any asset is flagged.
pub fn write_scores_csv<W: Write>(out: W, ids: &[String], report: &ScoreReport) -> Result<()> {
    let flagged = report.flags.iter().any(Option::is_some);
    let mut w = csv::Writer::from_writer(out);
    if flagged {
        w.write_record(["id", "score", "rank", "flag"])?;
    } else {
        w.write_record(["id", "score", "rank"])?;
    }
    for (k, id) in ids.iter().enumerate() {
        let mut record = vec![id.clone(), opt_string(report.scores[k]), opt_string(report.ranks[k])];
        if flagged {
            record.push(report.flags[k].as_ref().map_or_else(String::new, |f| flag_text(f, ids)));
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Fixed-width table with scores rounded to two decimals.
pub fn write_scores_table<W: Write>(mut out: W, ids: &[String], report: &ScoreReport) -> Result<()> {
    let width = ids.iter().map(|s| s.chars().count()).chain([2]).max().unwrap_or(2);
    writeln!(out, "{:<width$}  {:>8}  {:>4}", "id", "score", "rank")?;
    for (k, id) in ids.iter().enumerate() {
        let score = report.scores[k].map_or_else(|| "-".to_owned(), |s| format!("{s:.2}"));
        let rank = opt_string(report.ranks[k]);
        let pad = width - id.chars().count();
        write!(out, "{id}{:pad$}  {score:>8}  {rank:>4}", "")?;
        if let Some(f) = &report.flags[k] {
            write!(out, "  {}", flag_text(f, ids))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonAsset<'a> {
    id: &'a str,
    score: Option<f64>,
    rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    flag: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparands: Option<Vec<&'a str>>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    assets: Vec<JsonAsset<'a>>,
    config: &'a ScoreConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    extraction: Option<&'a ExtractionScheme>,
    normalized: bool,
    energies: Option<&'a EnergyBreakdown>,
    normalization_residual: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    same_date_pairs: Vec<(&'a str, &'a str)>,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    warnings: &'a [String],
}

pub fn write_report_json<W: Write>(mut out: W, output: &PipelineOutput) -> Result<()> {
    let ids = &output.ids;
    let report = &output.report;
    let assets = ids
        .iter()
        .enumerate()
        .map(|(k, id)| JsonAsset {
            id,
            score: report.scores[k],
            rank: report.ranks[k],
            flag: report.flags[k].as_ref().map(|f| flag_text(f, ids)),
            comparands: report
                .comparands
                .as_ref()
                .map(|c| c[k].iter().map(|&i| ids[i].as_str()).collect()),
        })
        .collect();
    let json = JsonReport {
        assets,
        config: &report.config,
        extraction: output.options.extraction.as_ref(),
        normalized: output.options.normalize,
        energies: report.energies.as_ref(),
        normalization_residual: report.normalization_residual,
        same_date_pairs: report
            .same_date_pairs
            .iter()
            .map(|&(i, j)| (ids[i].as_str(), ids[j].as_str()))
            .collect(),
        warnings: &output.warnings,
    };
    serde_json::to_writer_pretty(&mut out, &json)?;
    writeln!(out)?;
    Ok(())
}

/// Square CSV with ids as header row and first column; readable by
/// [`crate::dataset::read_matrix`].
pub fn write_matrix_csv<W: Write>(out: W, ids: &[String], matrix: &DistanceMatrix) -> Result<()> {
    if ids.len() != matrix.len() {
        return Err(Error::Config(format!("{} ids for a {}-asset matrix", ids.len(), matrix.len())));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once("id").chain(ids.iter().map(String::as_str)))?;
    for (i, id) in ids.iter().enumerate() {
        let mut record = Vec::with_capacity(ids.len() + 1);
        record.push(id.clone());
        record.extend(matrix.row(i).iter().map(f64::to_string));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
