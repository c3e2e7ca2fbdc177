use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use originality::dataset::{read_dates, DatePrecision, Dataset, SourceKind};
use originality::exec::init_thread_pool;
use originality::heatmap::heatmap_grid_with;
use originality::pipeline::{
    prepare_matrix, run_pipeline, write_matrix_csv, write_report_json, write_scores_csv, write_scores_table,
    PipelineOptions,
};
use originality::{
    correlations, validate_matrix, Bounds, CollisionPolicy, Error, Execution, ExtractionMode, ExtractionScheme,
    PotentialSpec, Result, ScoreConfig, Variant,
};

#[derive(Parser)]
#[command(name = "originality", version, about = "Score how original each asset is relative to the others")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every asset and write id, score and rank.
    Score(ScoreArgs),
    /// Write the distance matrix of a dataset as square CSV.
    Distances(DistanceArgs),
    /// Evaluate a probe's score on a grid over a 2D point set.
    Heatmap(HeatmapArgs),
    /// Pearson and Spearman correlation of two score files joined on id.
    Correlate(CorrelateArgs),
    /// Check that a dataset yields a usable distance matrix.
    Validate(InputArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("input").required(true).args(["matrix", "vectors", "texts"])))]
struct InputArgs {
    /// Square CSV distance matrix with ids in the header row and first column.
    #[arg(long, value_name = "PATH")]
    matrix: Option<PathBuf>,
    /// CSV feature vectors: id[,date],v0,v1,...
    #[arg(long, value_name = "PATH")]
    vectors: Option<PathBuf>,
    /// Texts, one per line, or CSV id,text[,date] for a .csv file.
    #[arg(long, value_name = "PATH")]
    texts: Option<PathBuf>,
    /// How texts become distances.
    #[arg(long, value_name = "MODE", value_parser = parse_extraction)]
    extract: Option<ExtractionMode>,
    /// Count whitespace as a character in char mode.
    #[arg(long)]
    keep_whitespace: bool,
    /// Keep letter case when tokenizing or comparing texts.
    #[arg(long)]
    no_lowercase: bool,
    /// Split word tokens on whitespace only, leaving punctuation attached.
    #[arg(long)]
    attached_punctuation: bool,
    /// CSV id,date assigning or overriding asset dates.
    #[arg(long, value_name = "PATH")]
    dates: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Precision::Day)]
    date_precision: Precision,
    /// Divide all distances by their mean before scoring.
    #[arg(long)]
    normalize: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("variant").args(["mean_p", "j_nearest", "bounded", "mean_energy"])))]
struct ScoreArgs {
    #[command(flatten)]
    input: InputArgs,
    /// coulomb, screened:ALPHA or power:N
    #[arg(long, default_value = "coulomb", value_parser = parse_potential)]
    potential: PotentialSpec,
    /// Score by the ratio of power means with exponent P ≤ 0 (-inf for the minimum).
    #[arg(long, value_name = "P", allow_hyphen_values = true)]
    mean_p: Option<f64>,
    /// Only the J nearest neighbours of each asset contribute.
    #[arg(long, value_name = "J")]
    j_nearest: Option<usize>,
    /// With --j-nearest, keep the asset's own row in the reference sum.
    #[arg(long, requires = "j_nearest")]
    include_self_row: bool,
    /// Report O/(1+O) instead of O.
    #[arg(long)]
    bounded: bool,
    /// Score as ⟨U⟩/U_k against the given mean energy.
    #[arg(long, value_name = "U")]
    mean_energy: Option<f64>,
    /// Compare each asset only with strictly earlier ones.
    #[arg(long)]
    time_ordered: bool,
    /// Collapse assets at distance zero onto their first occurrence.
    #[arg(long)]
    dedupe: bool,
    #[arg(long, value_enum, default_value_t = OnCollision::Zero)]
    on_collision: OnCollision,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistanceArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HeatmapArgs {
    /// CSV of 2D points: id[,date],x,y
    #[arg(long, value_name = "PATH")]
    vectors: PathBuf,
    #[arg(long, default_value = "coulomb", value_parser = parse_potential)]
    potential: PotentialSpec,
    /// X_MIN,X_MAX,Y_MIN,Y_MAX; defaults to the points' box padded by 10%.
    #[arg(long, value_name = "BOX", allow_hyphen_values = true, value_parser = parse_bounds)]
    bounds: Option<Bounds>,
    /// Grid size as NXxNY.
    #[arg(long, value_name = "NXxNY", default_value = "100x100", value_parser = parse_resolution)]
    resolution: (usize, usize),
    /// Grid CSV (x,y,score); standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Also write a greyscale PGM image.
    #[arg(long, value_name = "PATH")]
    image: Option<PathBuf>,
}

#[derive(Args)]
struct CorrelateArgs {
    a: PathBuf,
    b: PathBuf,
    /// Column to correlate in both files.
    #[arg(long, default_value = "score")]
    column: String,
    /// Column of the second file, when it differs.
    #[arg(long)]
    column_b: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Precision {
    Day,
    Second,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnCollision {
    Zero,
    Error,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Table,
}

fn parse_extraction(s: &str) -> std::result::Result<ExtractionMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_potential(s: &str) -> std::result::Result<PotentialSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_bounds(s: &str) -> std::result::Result<Bounds, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| format!("bounds: {e}"))?;
    match v[..] {
        [x0, x1, y0, y1] => Bounds::new(x0, x1, y0, y1).map_err(|e| e.to_string()),
        _ => Err("bounds take four numbers: X_MIN,X_MAX,Y_MIN,Y_MAX".into()),
    }
}

fn parse_resolution(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or("resolution must look like 100x100")?;
    let nx: usize = a.trim().parse().map_err(|e| format!("resolution: {e}"))?;
    let ny: usize = b.trim().parse().map_err(|e| format!("resolution: {e}"))?;
    if nx == 0 || ny == 0 {
        return Err("resolution must be positive".into());
    }
    Ok((nx, ny))
}

impl InputArgs {
    fn source(&self) -> (SourceKind, &Path) {
        match (&self.matrix, &self.vectors, &self.texts) {
            (Some(p), _, _) => (SourceKind::Matrix, p),
            (_, Some(p), _) => (SourceKind::Vectors, p),
            (_, _, Some(p)) => (SourceKind::Texts, p),
            _ => unreachable!("clap requires one input"),
        }
    }

    fn load(&self) -> Result<Dataset> {
        let (kind, path) = self.source();
        let mut ds = Dataset::load(kind, path)?;
        if let Some(p) = &self.dates {
            let file = File::open(p).map_err(|e| Error::Config(format!("cannot open {}: {e}", p.display())))?;
            ds = ds.with_dates(&read_dates(file)?)?;
        }
        Ok(ds)
    }

    fn extraction(&self) -> Result<Option<ExtractionScheme>> {
        let (kind, _) = self.source();
        match (kind, self.extract) {
            (SourceKind::Texts, None) => Err(Error::Config(
                "--texts needs --extract word|char|levenshtein".into(),
            )),
            (SourceKind::Texts, Some(mode)) => Ok(Some(ExtractionScheme {
                mode,
                lowercase: !self.no_lowercase,
                detach_punctuation: !self.attached_punctuation,
                keep_whitespace: self.keep_whitespace,
            })),
            (_, Some(_)) => Err(Error::Config("--extract applies only to --texts".into())),
            (_, None) => Ok(None),
        }
    }

    fn options(&self, config: ScoreConfig, exec: Execution) -> Result<PipelineOptions> {
        let mut options = PipelineOptions::new(config)
            .with_extraction(self.extraction()?)
            .with_normalize(self.normalize)
            .with_exec(exec);
        options.date_precision = match self.date_precision {
            Precision::Day => DatePrecision::Day,
            Precision::Second => DatePrecision::Second,
        };
        Ok(options)
    }
}

impl ScoreArgs {
    fn config(&self) -> ScoreConfig {
        let variant = if let Some(p) = self.mean_p {
            Variant::GeneralizedMean { p }
        } else if let Some(j) = self.j_nearest {
            Variant::JNearest {
                j,
                include_self_row: self.include_self_row,
            }
        } else if self.bounded {
            Variant::Bounded
        } else if let Some(mean_u) = self.mean_energy {
            Variant::MeanEnergy { mean_u }
        } else {
            Variant::Standard
        };
        ScoreConfig::new(self.potential, variant)
            .with_policy(match self.on_collision {
                OnCollision::Zero => CollisionPolicy::ScoreZero,
                OnCollision::Error => CollisionPolicy::Error,
            })
            .with_dedupe(self.dedupe)
            .with_time_ordered(self.time_ordered)
    }
}

/// Buffers the whole output and writes it in one go at the end of the run.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => {
            let mut w = BufWriter::new(
                File::create(p).map_err(|e| Error::Config(format!("cannot create {}: {e}", p.display())))?,
            );
            w.write_all(bytes)?;
            w.flush()?;
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn score(args: &ScoreArgs, exec: Execution) -> Result<()> {
    let dataset = args.input.load()?;
    let options = args.input.options(args.config(), exec)?;
    let output = run_pipeline(&dataset, &options)?;
    warn(&output.warnings);
    let mut buf = Vec::new();
    match args.format {
        Format::Csv => write_scores_csv(&mut buf, &output.ids, &output.report)?,
        Format::Json => write_report_json(&mut buf, &output)?,
        Format::Table => write_scores_table(&mut buf, &output.ids, &output.report)?,
    }
    emit(args.out.as_deref(), &buf)
}

fn distances(args: &DistanceArgs, exec: Execution) -> Result<()> {
    let dataset = args.input.load()?;
    let options = args.input.options(ScoreConfig::default(), exec)?;
    let (matrix, warnings) = prepare_matrix(&dataset, &options)?;
    warn(&warnings);
    let mut buf = Vec::new();
    write_matrix_csv(&mut buf, &dataset.ids(), &matrix)?;
    emit(args.out.as_deref(), &buf)
}

fn heatmap(args: &HeatmapArgs, exec: Execution) -> Result<()> {
    let points = Dataset::load(SourceKind::Vectors, &args.vectors)?.vectors()?;
    let bounds = match args.bounds {
        Some(b) => b,
        None => Bounds::around(&points, 0.1)?,
    };
    let grid = heatmap_grid_with(&points, bounds, args.resolution, &args.potential, exec)?;
    let mut csv = Vec::new();
    grid.write_csv(&mut csv)?;
    let mut pgm = Vec::new();
    if args.image.is_some() {
        grid.write_pgm(&mut pgm)?;
    }
    emit(args.out.as_deref(), &csv)?;
    if let Some(p) = &args.image {
        emit(Some(p), &pgm)?;
    }
    Ok(())
}

fn read_column(path: &Path, column: &str) -> Result<(Vec<String>, HashMap<String, f64>)> {
    let file = File::open(path).map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header = reader.headers()?.clone();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("{} has no {name:?} column", path.display())))
    };
    let (id_col, value_col) = (find("id")?, find(column)?);
    let mut order = Vec::new();
    let mut values = HashMap::new();
    for record in reader.records() {
        let record = record?;
        let id = record[id_col].to_owned();
        let raw = &record[value_col];
        if raw.is_empty() {
            continue;
        }
        let v: f64 = raw
            .parse()
            .map_err(|_| Error::Parse(format!("{}: {raw:?} is not a number", path.display())))?;
        if values.insert(id.clone(), v).is_some() {
            return Err(Error::DuplicateId(id));
        }
        order.push(id);
    }
    Ok((order, values))
}

fn correlate(args: &CorrelateArgs) -> Result<()> {
    let (order, a) = read_column(&args.a, &args.column)?;
    let (_, b) = read_column(&args.b, args.column_b.as_deref().unwrap_or(&args.column))?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = order.iter().filter_map(|id| Some((a[id], *b.get(id)?))).unzip();
    let c = correlations(&xs, &ys)?;
    let body = json!({"n": xs.len(), "pearson": c.pearson, "spearman": c.spearman});
    emit(None, format!("{body}\n").as_bytes())
}

fn validate(args: &InputArgs, exec: Execution) -> Result<bool> {
    let dataset = args.load()?;
    let report = match dataset.matrix_rows() {
        Some(rows) => validate_matrix(rows),
        None => {
            let options = args.options(ScoreConfig::default(), exec)?;
            match prepare_matrix(&dataset, &options) {
                Ok((m, _)) => m.validate(),
                Err(Error::InvalidMatrix(r)) => *r,
                Err(e) => return Err(e),
            }
        }
    };
    let body = json!({
        "valid": report.is_valid(),
        "clean": report.is_clean(),
        "ids": dataset.ids(),
        "report": report,
    });
    emit(None, format!("{}\n", serde_json::to_string_pretty(&body)?).as_bytes())?;
    Ok(report.is_valid())
}

fn execution() -> Result<Execution> {
    match std::env::var("ORIGINALITY_THREADS") {
        Ok(v) => {
            let threads: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&t| t > 0)
                .ok_or_else(|| Error::Config(format!("ORIGINALITY_THREADS must be a positive integer, got {v:?}")))?;
            if threads == 1 {
                return Ok(Execution::Sequential);
            }
            init_thread_pool(threads);
            Ok(Execution::Parallel)
        }
        Err(_) => Ok(Execution::default()),
    }
}

fn report_error(kind: &str, message: &str, extra: Option<serde_json::Value>) {
    let mut error = json!({"kind": kind, "message": message});
    if let Some(extra) = extra {
        error["report"] = extra;
    }
    eprintln!("{}", json!({ "error": error }));
}

fn fail(e: &Error) -> ExitCode {
    let extra = match e {
        Error::InvalidMatrix(r) => serde_json::to_value(r).ok(),
        _ => None,
    };
    report_error(e.kind(), &e.to_string(), extra);
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("").trim_start_matches("error: ");
            report_error("usage", first, None);
            return ExitCode::from(2);
        }
    };
    let exec = match execution() {
        Ok(exec) => exec,
        Err(e) => return fail(&e),
    };
    let result = match &cli.command {
        Command::Score(args) => score(args, exec),
        Command::Distances(args) => distances(args, exec),
        Command::Heatmap(args) => heatmap(args, exec),
        Command::Correlate(args) => correlate(args),
        Command::Validate(args) => match validate(args, exec) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
