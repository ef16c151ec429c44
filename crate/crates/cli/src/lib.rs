//! `bri` command-line front end.
//!
//! Every command reads plain files, is deterministic for fixed inputs and
//! seed, and exits with 0 on success, 2 on usage or input errors and 1 on
//! internal failures.

use std::fmt::Write as _;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use bri_core::eval::{
    baseline2_featurize, cross_validate, featurize, parse_values, render_accuracy_table, sweep,
    AccuracyRow, AccuracyTable, ClassifierKind, EvalConfig, EvalError, EvalReport, FeatureSet,
    Granularity, LabelSet, LabeledPoint, SweepAxis, SweepTable,
};
use bri_core::index::{
    Entity, ImputationConfig, IndexError, Metric, RankParams, Ranking, WeightingScheme,
    DEFAULT_GAMMA, DEFAULT_NEIGHBORS,
};
use bri_core::ingest::{
    default_schema, normalize, parse_data, parse_labels, parse_schema, scalings, write_data,
    write_labels, IngestError, RawDataset, RawRow, Schema,
};
use bri_core::synth::{generate, SynthConfig, SynthError};
use bri_service::{AppState, DataSource, DatasetSnapshot, ServiceError};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Ingest { path: PathBuf, source: IngestError },
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Service(#[from] ServiceError),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. }
            | CliError::Ingest { .. }
            | CliError::Eval(_)
            | CliError::Synth(_)
            | CliError::Usage(_)
            | CliError::Service(_) => 2,
            CliError::Index(e) => match e {
                IndexError::LengthMismatch { .. } | IndexError::OutOfRange { .. } => 1,
                _ => 2,
            },
            CliError::Write { .. } | CliError::Internal(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bri", version, about = "Blockchain readiness index: rank, impute, evaluate")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score and rank every country.
    Rank(RankCmd),
    /// Fill missing indicators and write the completed data file.
    Impute(ImputeCmd),
    /// Cross-validate classifiers on the index features against labels.
    Evaluate(EvaluateCmd),
    /// Cross-validate over a grid of gamma or neighbor values.
    Sweep(SweepCmd),
    /// Write a synthetic labeled dataset.
    Synth(SynthCmd),
    /// Serve rankings over HTTP.
    Serve(ServeCmd),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Country data CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Indicator schema JSON; the built-in schema when omitted.
    #[arg(long)]
    pub schema: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// Weighting scheme: linear or sigmoid.
    #[arg(long, default_value = "linear")]
    pub scheme: String,
    /// Sigmoid centre, strictly between 0 and 1.
    #[arg(long, default_value_t = DEFAULT_GAMMA, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Donors averaged per missing indicator.
    #[arg(long, default_value_t = DEFAULT_NEIGHBORS)]
    pub neighbors: usize,
    /// Donor similarity: cosine or euclidean.
    #[arg(long, default_value = "cosine")]
    pub metric: String,
}

impl IndexArgs {
    fn params(&self) -> Result<RankParams, CliError> {
        Ok(RankParams::new(&self.scheme, self.gamma, self.neighbors, self.metric.parse()?)?)
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Labels CSV (`country,label`).
    #[arg(long)]
    pub labels: PathBuf,
    /// nb or svm.
    #[arg(long, default_value = "svm")]
    pub classifier: String,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// 2 (high/low) or 3 (high/mid/low); both when omitted.
    #[arg(long)]
    pub granularity: Option<String>,
}

impl EvalArgs {
    fn classifier(&self) -> Result<ClassifierKind, CliError> {
        Ok(self.classifier.parse()?)
    }

    fn granularities(&self) -> Result<Vec<Granularity>, CliError> {
        match &self.granularity {
            Some(g) => Ok(vec![g.parse()?]),
            None => Ok(vec![Granularity::ThreeClass, Granularity::TwoClass]),
        }
    }
}

#[derive(Debug, Args)]
pub struct RankCmd {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub index: IndexArgs,
    /// Ranking CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Append the imputed normalized indicator values.
    #[arg(long)]
    pub emit_imputed: bool,
}

#[derive(Debug, Args)]
pub struct ImputeCmd {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = DEFAULT_NEIGHBORS)]
    pub neighbors: usize,
    #[arg(long, default_value = "cosine")]
    pub metric: String,
    /// Completed data CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateCmd {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Restrict to one scheme; both linear and sigmoid when omitted.
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long, default_value_t = DEFAULT_GAMMA, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = DEFAULT_NEIGHBORS)]
    pub neighbors: usize,
    #[arg(long, default_value = "cosine")]
    pub metric: String,
    /// JSON report destination; the text table also goes to `<out>.txt`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepCmd {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub eval: EvalArgs,
    /// gamma or neighbors.
    #[arg(long)]
    pub axis: String,
    /// `start:end:step` or a comma list; the standard grid when omitted.
    #[arg(long)]
    pub values: Option<String>,
    /// Scheme for a neighbors sweep; a gamma sweep always uses sigmoid.
    #[arg(long, default_value = "sigmoid")]
    pub scheme: String,
    #[arg(long, default_value_t = DEFAULT_GAMMA, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = DEFAULT_NEIGHBORS)]
    pub neighbors: usize,
    #[arg(long, default_value = "cosine")]
    pub metric: String,
    /// JSON destination; the text table also goes to `<out>.txt`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthCmd {
    /// Output directory for data.csv, labels.csv and schema.json.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 190)]
    pub countries: usize,
    /// High,mid,low shares summing to 1; 45/55/90 of 190 when omitted.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub proportions: Option<Vec<f64>>,
    #[arg(long, default_value_t = 16)]
    pub indicators: usize,
    #[arg(long, default_value_t = 0.25)]
    pub missing_rate: f64,
    #[arg(long, default_value_t = 4.0)]
    pub separation: f64,
    #[arg(long, default_value_t = 10)]
    pub complete_quota: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ServeCmd {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Rank(cmd) => run_rank(&cmd),
        Command::Impute(cmd) => run_impute(&cmd),
        Command::Evaluate(cmd) => run_evaluate(&cmd),
        Command::Sweep(cmd) => run_sweep(&cmd),
        Command::Synth(cmd) => run_synth(&cmd),
        Command::Serve(cmd) => run_serve(&cmd),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn with_extension(path: &Path, ext: &str) -> PathBuf {
    let mut p = path.to_path_buf();
    p.set_extension(ext);
    p
}

pub fn load_dataset(args: &DataArgs) -> Result<RawDataset, CliError> {
    let schema = match &args.schema {
        Some(path) => parse_schema(&read(path)?).map_err(|source| CliError::Ingest {
            path: path.clone(),
            source,
        })?,
        None => default_schema(),
    };
    parse_data(&read(&args.data)?, &schema).map_err(|source| CliError::Ingest {
        path: args.data.clone(),
        source,
    })
}

fn load_labels(path: &Path) -> Result<LabelSet, CliError> {
    parse_labels(&read(path)?).map_err(|source| CliError::Ingest {
        path: path.to_path_buf(),
        source,
    })
}

fn warn(ranking_warnings: &[impl std::fmt::Display]) {
    for w in ranking_warnings {
        eprintln!("warning: {w}");
    }
}

/// Ranking table: `rank,country,score,similarity,g,weight,n_missing`, then one
/// column per indicator when `emit_imputed` is set.
pub fn ranking_csv(ranking: &Ranking, schema: &Schema, emit_imputed: bool) -> String {
    let mut out = String::from("rank,country,score,similarity,g,weight,n_missing");
    if emit_imputed {
        for id in schema.ids() {
            out.push(',');
            out.push_str(&csv_field(id));
        }
    }
    out.push('\n');
    for s in &ranking.scored {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            s.rank,
            csv_field(&s.name),
            s.score,
            s.similarity,
            s.g,
            s.weight,
            s.n_missing
        );
        if emit_imputed {
            let row = ranking
                .imputed
                .iter()
                .find(|e| e.name == s.name)
                .expect("every scored country was imputed");
            for v in &row.values {
                let _ = write!(out, ",{v}");
            }
        }
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn run_rank(cmd: &RankCmd) -> Result<(), CliError> {
    let params = cmd.index.params()?;
    let raw = load_dataset(&cmd.data)?;
    let ranking = params.rank(&normalize(&raw))?;
    warn(&ranking.warnings);
    emit(cmd.out.as_deref(), &ranking_csv(&ranking, &raw.schema, cmd.emit_imputed))?;
    if let Some(path) = &cmd.out {
        let top = &ranking.scored[0];
        println!(
            "ranked {} countries ({}, k={}, {}) -> {}; top: {} {:.4}",
            ranking.scored.len(),
            params.scheme(),
            params.neighbors,
            params.metric,
            path.display(),
            top.name,
            top.score
        );
    }
    Ok(())
}

/// Fills missing cells in raw units. Countries with no observed value are
/// left empty since nothing supports an estimate for them.
pub fn impute_raw(raw: &RawDataset, cfg: &ImputationConfig) -> Result<(RawDataset, Vec<String>), CliError> {
    let entities = normalize(raw);
    let imputation = bri_core::index::impute(&entities, cfg)?;
    let scales = scalings(raw);
    let rows = raw
        .rows
        .iter()
        .zip(&imputation.entities)
        .map(|(row, imputed)| {
            let void = row.values.iter().all(Option::is_none);
            let values = row
                .values
                .iter()
                .enumerate()
                .map(|(k, cell)| match cell {
                    Some(v) => Some(*v),
                    None if void => None,
                    None => Some(scales[k].invert(imputed.values[k])),
                })
                .collect();
            RawRow {
                name: row.name.clone(),
                values,
            }
        })
        .collect();
    let warnings = imputation.warnings.iter().map(ToString::to_string).collect();
    Ok((
        RawDataset {
            schema: raw.schema.clone(),
            rows,
        },
        warnings,
    ))
}

fn run_impute(cmd: &ImputeCmd) -> Result<(), CliError> {
    let cfg = ImputationConfig::new(cmd.neighbors, cmd.metric.parse()?)?;
    let raw = load_dataset(&cmd.data)?;
    if raw.is_empty() {
        return Err(IndexError::EmptyDataset.into());
    }
    let (filled, warnings) = impute_raw(&raw, &cfg)?;
    warn(&warnings);
    emit(cmd.out.as_deref(), &write_data(&filled))
}

#[derive(Debug, Serialize)]
pub struct EvaluationDocument {
    pub classifier: ClassifierKind,
    pub folds: usize,
    pub seed: u64,
    pub neighbors: usize,
    pub metric: Metric,
    pub table: AccuracyTable,
    pub runs: Vec<EvalReport>,
}

fn column_name(scheme: &WeightingScheme) -> String {
    match scheme {
        WeightingScheme::Linear => "Linear scheme".into(),
        WeightingScheme::Sigmoid { gamma } => format!("Sigmoid scheme (γ={gamma})"),
    }
}

/// Baseline 1, Baseline 2 and proposed-feature accuracies per scheme and
/// granularity.
#[allow(clippy::too_many_arguments)]
pub fn evaluate(
    entities: &[Entity],
    labels: &LabelSet,
    schemes: &[WeightingScheme],
    granularities: &[Granularity],
    imputation: &ImputationConfig,
    classifier: &ClassifierKind,
    folds: usize,
    seed: u64,
) -> Result<EvaluationDocument, CliError> {
    if schemes.is_empty() || granularities.is_empty() {
        return Err(CliError::Internal("nothing to evaluate".into()));
    }
    let unweighted = baseline2_featurize(entities, labels, imputation)?;
    let proposed = schemes
        .iter()
        .map(|s| featurize(entities, labels, *s, imputation))
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for &g in granularities {
        let b2 = cross_validate(&unweighted, classifier, folds, g, seed)?.with_config(EvalConfig::new(
            FeatureSet::Unweighted,
            WeightingScheme::Linear,
            imputation.neighbors(),
            imputation.metric,
        ));
        let mut proposed_acc = Vec::new();
        for (scheme, points) in schemes.iter().zip(&proposed) {
            let r = cross_validate(points, classifier, folds, g, seed)?.with_config(EvalConfig::new(
                FeatureSet::Proposed,
                *scheme,
                imputation.neighbors(),
                imputation.metric,
            ));
            proposed_acc.push(r.mean_accuracy);
            runs.push(r);
        }
        let row = |features: &str, values: Vec<f64>| AccuracyRow {
            granularity: g,
            features: features.into(),
            values,
        };
        rows.push(row("Baseline 1", vec![b2.baseline1_accuracy; schemes.len()]));
        rows.push(row("Baseline 2", vec![b2.mean_accuracy; schemes.len()]));
        rows.push(row("Proposed", proposed_acc));
        runs.push(b2);
    }
    Ok(EvaluationDocument {
        classifier: *classifier,
        folds,
        seed,
        neighbors: imputation.neighbors(),
        metric: imputation.metric,
        table: AccuracyTable {
            columns: schemes.iter().map(column_name).collect(),
            rows,
        },
        runs,
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn run_evaluate(cmd: &EvaluateCmd) -> Result<(), CliError> {
    let metric: Metric = cmd.metric.parse()?;
    let imputation = ImputationConfig::new(cmd.neighbors, metric)?;
    let schemes = match &cmd.scheme {
        Some(name) => vec![RankParams::new(name, cmd.gamma, cmd.neighbors, metric)?.scheme()],
        None => vec![WeightingScheme::Linear, WeightingScheme::sigmoid(cmd.gamma)?],
    };
    let classifier = cmd.eval.classifier()?;
    let granularities = cmd.eval.granularities()?;
    let raw = load_dataset(&cmd.data)?;
    let labels = load_labels(&cmd.eval.labels)?;
    let doc = evaluate(
        &normalize(&raw),
        &labels,
        &schemes,
        &granularities,
        &imputation,
        &classifier,
        cmd.eval.folds,
        cmd.eval.seed,
    )?;
    let table = render_accuracy_table(&doc.table);
    print!("{table}");
    if let Some(path) = &cmd.out {
        write(path, &to_json(&doc)?)?;
        write(&with_extension(path, "txt"), &table)?;
    }
    if doc.runs.iter().any(|r| !r.converged) {
        eprintln!("warning: some SVM runs hit the pass cap before converging");
    }
    Ok(())
}

pub const GAMMA_GRID: &str = "0.1:0.9:0.1";
pub const NEIGHBOR_GRID: &str = "1,2,3,5,10,15,20,30,40";

#[derive(Debug, Serialize)]
pub struct SweepDocument {
    pub classifier: ClassifierKind,
    pub folds: usize,
    pub seed: u64,
    pub scheme: &'static str,
    pub fixed_gamma: Option<f64>,
    pub fixed_neighbors: Option<usize>,
    pub metric: Metric,
    pub sweep: SweepTable,
}

#[allow(clippy::too_many_arguments)]
pub fn run_sweep_table(
    entities: &[Entity],
    labels: &LabelSet,
    axis: SweepAxis,
    values: &[f64],
    scheme: &str,
    gamma: f64,
    neighbors: usize,
    metric: Metric,
    classifier: &ClassifierKind,
    folds: usize,
    granularities: &[Granularity],
    seed: u64,
) -> Result<SweepDocument, CliError> {
    let build = |v: f64| -> Result<Vec<LabeledPoint>, EvalError> {
        match axis {
            SweepAxis::Gamma => featurize(
                entities,
                labels,
                WeightingScheme::sigmoid(v)?,
                &ImputationConfig::new(neighbors, metric)?,
            ),
            SweepAxis::Neighbors => {
                if v < 1.0 || v.fract() != 0.0 {
                    return Err(EvalError::InvalidParameter(format!(
                        "neighbors must be a positive integer, got {v}"
                    )));
                }
                featurize(
                    entities,
                    labels,
                    WeightingScheme::from_name(scheme, gamma)?,
                    &ImputationConfig::new(v as usize, metric)?,
                )
            }
        }
    };
    let table = sweep(build, axis, values, classifier, folds, granularities, seed)?;
    let sigmoid = axis == SweepAxis::Gamma || scheme.eq_ignore_ascii_case("sigmoid");
    Ok(SweepDocument {
        classifier: *classifier,
        folds,
        seed,
        scheme: if sigmoid { "sigmoid" } else { "linear" },
        fixed_gamma: (axis == SweepAxis::Neighbors && sigmoid).then_some(gamma),
        fixed_neighbors: (axis == SweepAxis::Gamma).then_some(neighbors),
        metric,
        sweep: table,
    })
}

fn run_sweep(cmd: &SweepCmd) -> Result<(), CliError> {
    let axis: SweepAxis = cmd.axis.parse()?;
    let metric: Metric = cmd.metric.parse()?;
    let grid = cmd.values.as_deref().unwrap_or(match axis {
        SweepAxis::Gamma => GAMMA_GRID,
        SweepAxis::Neighbors => NEIGHBOR_GRID,
    });
    let values = parse_values(grid)?;
    // validates the fixed parameters up front
    match axis {
        SweepAxis::Gamma => {
            ImputationConfig::new(cmd.neighbors, metric)?;
        }
        SweepAxis::Neighbors => {
            RankParams::new(&cmd.scheme, cmd.gamma, 1, metric)?;
        }
    }
    let classifier = cmd.eval.classifier()?;
    let granularities = cmd.eval.granularities()?;
    let raw = load_dataset(&cmd.data)?;
    let labels = load_labels(&cmd.eval.labels)?;
    let doc = run_sweep_table(
        &normalize(&raw),
        &labels,
        axis,
        &values,
        &cmd.scheme,
        cmd.gamma,
        cmd.neighbors,
        metric,
        &classifier,
        cmd.eval.folds,
        &granularities,
        cmd.eval.seed,
    )?;
    let table = doc.sweep.render();
    print!("{table}");
    if let Some(path) = &cmd.out {
        write(path, &to_json(&doc)?)?;
        write(&with_extension(path, "txt"), &table)?;
    }
    Ok(())
}

fn run_synth(cmd: &SynthCmd) -> Result<(), CliError> {
    let defaults = SynthConfig::default();
    let class_proportions = match &cmd.proportions {
        Some(p) => [p[0], p[1], p[2]],
        None => defaults.class_proportions,
    };
    let cfg = SynthConfig {
        n_countries: cmd.countries,
        class_proportions,
        n_indicators: cmd.indicators,
        missing_rate: cmd.missing_rate,
        class_separation: cmd.separation,
        seed: cmd.seed,
        complete_quota: cmd.complete_quota,
    };
    let (data, labels) = generate(&cfg)?;
    fs::create_dir_all(&cmd.out).map_err(|source| CliError::Write {
        path: cmd.out.clone(),
        source,
    })?;
    write(&cmd.out.join("data.csv"), &write_data(&data))?;
    write(&cmd.out.join("labels.csv"), &write_labels(&labels))?;
    let mut schema = data.schema.to_json();
    schema.push('\n');
    write(&cmd.out.join("schema.json"), &schema)?;
    println!(
        "wrote {} countries x {} indicators to {}",
        data.len(),
        data.schema.len(),
        cmd.out.display()
    );
    Ok(())
}

fn run_serve(cmd: &ServeCmd) -> Result<(), CliError> {
    let addr: SocketAddr = format!("{}:{}", cmd.host, cmd.port)
        .parse()
        .map_err(|e| CliError::Usage(format!("bad listen address: {e}")))?;
    let source = DataSource {
        data: cmd.data.data.clone(),
        schema: cmd.data.schema.clone(),
    };
    let state = AppState::with_source(source.clone());
    state.install(DatasetSnapshot::load(&source)?);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Internal(e.to_string()))?;
    println!("listening on http://{addr}");
    runtime
        .block_on(bri_service::serve(state, addr))
        .map_err(|e| CliError::Internal(format!("server: {e}")))
}
