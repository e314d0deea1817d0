//! `cadvote` command-line driver.
//!
//! Every subcommand that writes artifacts puts them under `--out` together
//! with a `manifest.json` recording the arguments, resolved configuration,
//! seed, versions and input checksums.

pub mod manifest;

use std::ffi::OsString;
use std::fs::File;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cadvote_core::bundle::ModelBundle;
use cadvote_core::eval::{
    benchmark_report, default_pipelines, run_pipeline, MetricsReport, Mode, PipelineSpec, Preprocessing,
};
use cadvote_core::fixture::fixture;
use cadvote_core::preprocess::{iqr_flag, smote, SmoteConfig, SmoteTarget};
use cadvote_core::selection::rank_and_select;
use cadvote_core::stats::{correlation_matrix, summarize};
use cadvote_core::{load_dataset, save_bundle, Dataset, FeatureSchema, LoadOptions, ModelKind, ModelSpec};
use cadvote_service::{load_state, ServiceConfig, ServiceError};

pub use manifest::{sha256_file, Manifest, MANIFEST_FILE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<cadvote_core::Error> for CliError {
    fn from(e: cadvote_core::Error) -> Self {
        if e.is_data_error() {
            CliError::Data(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

impl From<ServiceError> for CliError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::Bundle { .. } => CliError::Data(e.to_string()),
            ServiceError::Config(m) => CliError::Usage(m),
            ServiceError::Io(_) => CliError::Internal(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Internal(format!("{}: {e}", path.display()))
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "cadvote", version, about = "Coronary artery disease classification pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// CSV with one row per patient and a Cath label column.
    #[arg(long, conflicts_with = "fixture", required_unless_present = "fixture")]
    data: Option<PathBuf>,
    /// Use the seeded synthetic cohort (300 records) instead of a CSV.
    #[arg(long)]
    fixture: bool,
    /// Schema file; defaults to the bundled thirteen-feature schema.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Fill empty cells with the column median instead of failing.
    #[arg(long)]
    impute: bool,
}

#[derive(Debug, Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    /// `default` fits preprocessing per training fold; `paper` fits it once
    /// on all records before the folds are drawn.
    #[arg(long, default_value = "default")]
    mode: Mode,
    /// Number of cross-validation folds.
    #[arg(long = "k", default_value_t = 10)]
    k: usize,
    /// Features kept by gain-ratio ranking.
    #[arg(long, default_value_t = 12)]
    select_k: usize,
    /// Skip SMOTE (refused by `benchmark`).
    #[arg(long)]
    no_smote: bool,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// tree, forest, adaboost, mlp, naive_bayes, knn or voting.
    #[arg(long, default_value = "voting")]
    model: String,
    /// Hyperparameter override, repeatable (e.g. `--param n_trees=50`).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-feature summary table and correlation matrix.
    Stats {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        common: Common,
    },
    /// IQR outlier and extreme-value counts per numeric feature.
    Outliers {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.5)]
        factor: f64,
        #[arg(long, default_value_t = 3.0)]
        extreme: f64,
    },
    /// Oversample the minority class and write the balanced CSV.
    Smote {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        k_neighbors: usize,
        /// Synthesize this percentage of the minority count instead of balancing.
        #[arg(long)]
        percentage: Option<u32>,
    },
    /// Rank features by gain ratio; `--sweep` cross-validates several k.
    Select {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated selection sizes to cross-validate.
        #[arg(long, value_delimiter = ',')]
        sweep: Vec<usize>,
    },
    /// Train on all records and write a model bundle.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Also cross-validate and store the metrics in the bundle.
        #[arg(long)]
        cv: bool,
    },
    /// Cross-validate one pipeline.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Cross-validate the ensemble, its members and the baselines.
    Benchmark {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Predict one record given as a JSON object of raw feature values.
    Predict {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        allow_out_of_range: bool,
    },
    /// Serve a bundle over HTTP until interrupted.
    Serve {
        #[arg(long)]
        bundle: PathBuf,
        /// Listen address; overrides CAD_BIND.
        #[arg(long)]
        bind: Option<String>,
        /// Allowed origins; overrides CAD_CORS_ORIGINS.
        #[arg(long, value_delimiter = ',')]
        cors: Vec<String>,
    },
}

/// Parses `argv` and runs the subcommand; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .try_init();

    let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(cli.command, args) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("cadvote: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, args: Vec<String>) -> CliResult<()> {
    match command {
        Command::Stats { data, common } => stats(&data, &common, args),
        Command::Outliers {
            data,
            common,
            factor,
            extreme,
        } => outliers(&data, &common, factor, extreme, args),
        Command::Smote {
            data,
            common,
            k_neighbors,
            percentage,
        } => smote_cmd(&data, &common, k_neighbors, percentage, args),
        Command::Select {
            data,
            common,
            pipeline,
            model,
            sweep,
        } => select(&data, &common, &pipeline, &model, &sweep, args),
        Command::Train {
            data,
            common,
            pipeline,
            model,
            cv,
        } => train(&data, &common, &pipeline, &model, cv, args),
        Command::Evaluate {
            data,
            common,
            pipeline,
            model,
        } => evaluate(&data, &common, &pipeline, &model, args),
        Command::Benchmark { data, common, pipeline } => benchmark(&data, &common, &pipeline, args),
        Command::Predict {
            bundle,
            input,
            out,
            allow_out_of_range,
        } => predict(&bundle, &input, &out, allow_out_of_range, args),
        Command::Serve { bundle, bind, cors } => serve(&bundle, bind, cors),
    }
}

/// Loads the dataset and describes it for the manifest.
fn load(d: &DataArgs, seed: u64) -> CliResult<(Dataset, Value)> {
    if d.fixture {
        let ds = fixture(seed);
        let counts = ds.class_counts();
        return Ok((ds, json!({ "fixture": { "seed": seed, "records": counts[0] + counts[1] } })));
    }
    let path = d.data.as_ref().ok_or_else(|| CliError::Usage("one of --data or --fixture is required".into()))?;
    if !path.is_file() {
        return Err(CliError::Data(format!("dataset {} not found", path.display())));
    }
    let (schema, schema_info) = match &d.schema {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
            (FeatureSchema::parse(&text)?, json!({ "path": p, "sha256": sha256_file(p)? }))
        }
        None => (FeatureSchema::cad12(), json!("cad12 (bundled)")),
    };
    let opts = LoadOptions {
        impute_median: d.impute,
        ..LoadOptions::default()
    };
    let ds = load_dataset(path, &schema, &opts)?;
    let flagged = ds.records.iter().filter(|r| r.out_of_range).count();
    if flagged > 0 {
        tracing::warn!(records = flagged, "records with out-of-range values (kept, flagged)");
    }
    let info = json!({
        "data": { "path": path, "sha256": sha256_file(path)?, "records": ds.len() },
        "schema": schema_info,
    });
    Ok((ds, info))
}

fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn create(path: &Path) -> CliResult<File> {
    File::create(path).map_err(|e| io_err(path, e))
}

fn preprocessing(p: &PipelineArgs, d: &Dataset, seed: u64) -> CliResult<Preprocessing> {
    if p.select_k == 0 || p.select_k > d.n_features() {
        return Err(CliError::Usage(format!("--select-k must be in 1..={}, got {}", d.n_features(), p.select_k)));
    }
    if p.k < 2 || p.k > d.len() {
        return Err(CliError::Usage(format!("--k must be in 2..={}, got {}", d.len(), p.k)));
    }
    Ok(Preprocessing {
        mode: p.mode,
        smote: (!p.no_smote).then(|| SmoteConfig {
            seed,
            ..SmoteConfig::default()
        }),
        selection_k: Some(p.select_k),
        standardize: true,
    })
}

/// The benchmark pipeline for the model kind when no overrides are given,
/// so `evaluate --model knn` tunes k exactly as `benchmark` does.
fn pipeline_spec(m: &ModelArgs, pre: Preprocessing, seed: u64) -> CliResult<PipelineSpec> {
    let kind: ModelKind = m.model.parse().map_err(|e: cadvote_core::Error| CliError::Usage(e.to_string()))?;
    if m.params.is_empty() {
        if let Some(p) = default_pipelines(&pre, seed).into_iter().find(|p| p.model.kind() == kind) {
            return Ok(p);
        }
    }
    let mut spec = ModelSpec::default_for(kind).with_seed(seed);
    for kv in &m.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--param expects KEY=VALUE, got `{kv}`")))?;
        spec.set(k.trim(), v.trim()).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(PipelineSpec::new(spec, pre))
}

fn finish(out: &Path, m: Manifest) -> CliResult<()> {
    m.write(out)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn stats(d: &DataArgs, c: &Common, args: Vec<String>) -> CliResult<()> {
    let (ds, input) = load(d, c.seed)?;
    create_dir(&c.out)?;
    summarize(&ds)?.write_csv(create(&c.out.join("stats.csv"))?)?;
    correlation_matrix(&ds)?.write_csv(create(&c.out.join("correlation.csv"))?)?;
    finish(
        &c.out,
        Manifest::new("stats", args, Some(c.seed), json!({}), input).outputs(["stats.csv", "correlation.csv"]),
    )
}

fn outliers(d: &DataArgs, c: &Common, factor: f64, extreme: f64, args: Vec<String>) -> CliResult<()> {
    if !(factor > 0.0 && extreme >= factor) {
        return Err(CliError::Usage(format!("need 0 < --factor <= --extreme, got {factor} and {extreme}")));
    }
    let (ds, input) = load(d, c.seed)?;
    create_dir(&c.out)?;
    iqr_flag(&ds, factor, extreme)?.write_csv(create(&c.out.join("outliers.csv"))?)?;
    let config = json!({ "factor": factor, "extreme": extreme });
    finish(&c.out, Manifest::new("outliers", args, Some(c.seed), config, input).outputs(["outliers.csv"]))
}

fn class_line(ds: &Dataset, tag: &str) -> String {
    let c = ds.class_counts();
    format!(
        "{tag}: {}={} {}={}",
        ds.schema.label_text(1),
        c[1],
        ds.schema.label_text(0),
        c[0]
    )
}

fn smote_cmd(d: &DataArgs, c: &Common, k_neighbors: usize, percentage: Option<u32>, args: Vec<String>) -> CliResult<()> {
    let (ds, input) = load(d, c.seed)?;
    let cfg = SmoteConfig {
        k_neighbors,
        target: percentage.map_or(SmoteTarget::Balance, SmoteTarget::Percentage),
        seed: c.seed,
    };
    let out = smote(&ds, &cfg)?;
    create_dir(&c.out)?;
    out.write_csv(c.out.join("balanced.csv"))?;
    let log = format!(
        "{}\n{}\nsynthetic: {}\n",
        class_line(&ds, "before"),
        class_line(&out, "after"),
        out.len() - ds.len()
    );
    print!("{log}");
    let path = c.out.join("class_counts.log");
    std::fs::write(&path, log).map_err(|e| io_err(&path, e))?;
    let config = serde_json::to_value(cfg).map_err(|e| CliError::Internal(e.to_string()))?;
    finish(
        &c.out,
        Manifest::new("smote", args, Some(c.seed), config, input).outputs(["balanced.csv", "class_counts.log"]),
    )
}

fn select(
    d: &DataArgs,
    c: &Common,
    p: &PipelineArgs,
    m: &ModelArgs,
    sweep: &[usize],
    args: Vec<String>,
) -> CliResult<()> {
    let (ds, input) = load(d, c.seed)?;
    let pre = preprocessing(p, &ds, c.seed)?;
    create_dir(&c.out)?;
    let sel = rank_and_select(&ds, p.select_k)?;
    sel.write_csv(create(&c.out.join("gain_ratio.csv"))?)?;
    println!("selected: {}", sel.selected().join(", "));
    let mut outputs = vec!["gain_ratio.csv".to_string()];
    let mut config = json!({ "select_k": p.select_k });

    if !sweep.is_empty() {
        let base = pipeline_spec(m, pre, c.seed)?;
        let mut w = csv::Writer::from_writer(create(&c.out.join("select_sweep.csv"))?);
        w.write_record(["k", "accuracy"]).map_err(|e| CliError::Internal(e.to_string()))?;
        for &k in sweep {
            if k == 0 || k > ds.n_features() {
                return Err(CliError::Usage(format!("sweep size {k} not in 1..={}", ds.n_features())));
            }
            let mut pipe = base.clone();
            pipe.pre.selection_k = Some(k);
            let outcome = run_pipeline(&ds, &pipe, p.k, c.seed)?;
            let acc = outcome.report.accuracy.map_or_else(|| "NA".into(), |a| format!("{:.2}", 100.0 * a));
            println!("k={k:>2} accuracy={acc}");
            w.write_record([k.to_string(), acc]).map_err(|e| CliError::Internal(e.to_string()))?;
        }
        w.flush().map_err(|e| io_err(&c.out, e))?;
        outputs.push("select_sweep.csv".into());
        config = json!({ "select_k": p.select_k, "sweep": sweep, "folds": p.k, "pipeline": base });
    }
    finish(&c.out, Manifest::new("select", args, Some(c.seed), config, input).outputs(outputs))
}

fn train(d: &DataArgs, c: &Common, p: &PipelineArgs, m: &ModelArgs, cv: bool, args: Vec<String>) -> CliResult<()> {
    let (ds, input) = load(d, c.seed)?;
    let pipe = pipeline_spec(m, preprocessing(p, &ds, c.seed)?, c.seed)?;
    let (model, _) = cadvote_core::eval::train_pipeline(&ds, &pipe, c.seed)?;
    for w in &model.meta.warnings {
        tracing::warn!("{w}");
    }
    let canary: Vec<f64> = model
        .feature_list
        .iter()
        .map(|n| ds.records[0].values[ds.schema.index_of(n).expect("selected from schema")])
        .collect();
    let mut bundle = ModelBundle::new(model, canary, c.seed);
    if cv {
        bundle.metrics = Some(run_pipeline(&ds, &pipe, p.k, c.seed)?.report);
    }
    bundle.pipeline = Some(pipe.clone());
    create_dir(&c.out)?;
    save_bundle(&bundle, c.out.join("model.cadm"))?;
    println!("features: {}", bundle.model.feature_list.join(", "));
    let config = json!({ "pipeline": pipe, "folds": cv.then_some(p.k) });
    finish(&c.out, Manifest::new("train", args, Some(c.seed), config, input).outputs(["model.cadm"]))
}

fn print_report(name: &str, r: &MetricsReport) {
    let pct = |v: Option<f64>| v.map_or_else(|| "NA".into(), |x| format!("{:.2}%", 100.0 * x));
    let num = |v: Option<f64>| v.map_or_else(|| "NA".into(), |x| format!("{x:.4}"));
    println!(
        "{name}: accuracy {} precision {} recall {} F {} MCC {} AUC {} kappa {} RMSE {}",
        pct(r.accuracy),
        pct(r.precision),
        pct(r.recall),
        pct(r.f_measure),
        num(r.mcc),
        num(r.roc_auc),
        num(r.kappa),
        num(r.rmse)
    );
}

fn evaluate(d: &DataArgs, c: &Common, p: &PipelineArgs, m: &ModelArgs, args: Vec<String>) -> CliResult<()> {
    let (ds, input) = load(d, c.seed)?;
    let pipe = pipeline_spec(m, preprocessing(p, &ds, c.seed)?, c.seed)?;
    let outcome = run_pipeline(&ds, &pipe, p.k, c.seed)?;
    print_report(&pipe.name, &outcome.report);
    create_dir(&c.out)?;

    let path = c.out.join("metrics.json");
    let body = serde_json::to_string_pretty(&outcome.report).map_err(|e| CliError::Internal(e.to_string()))?;
    std::fs::write(&path, body + "\n").map_err(|e| io_err(&path, e))?;

    let csv_err = |e: csv::Error| CliError::Internal(e.to_string());
    let mut w = csv::Writer::from_writer(create(&c.out.join("held_out.csv"))?);
    w.write_record(["index", "fold", "truth", "label", "p_positive"]).map_err(csv_err)?;
    for h in &outcome.held_out {
        w.write_record([
            h.index.to_string(),
            h.fold.to_string(),
            h.truth.to_string(),
            h.prediction.label.to_string(),
            h.prediction.p_positive.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| io_err(&c.out, e))?;

    let mut w = csv::Writer::from_writer(create(&c.out.join("roc.csv"))?);
    w.write_record(["fpr", "tpr", "threshold"]).map_err(csv_err)?;
    for pt in &outcome.report.roc_points {
        w.write_record([pt.fpr.to_string(), pt.tpr.to_string(), pt.threshold.to_string()]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| io_err(&c.out, e))?;

    let config = json!({ "pipeline": pipe, "folds": p.k, "evaluated": outcome.evaluated });
    finish(
        &c.out,
        Manifest::new("evaluate", args, Some(c.seed), config, input).outputs(["metrics.json", "held_out.csv", "roc.csv"]),
    )
}

fn benchmark(d: &DataArgs, c: &Common, p: &PipelineArgs, args: Vec<String>) -> CliResult<()> {
    if p.no_smote {
        return Err(CliError::Usage(
            "benchmark always balances with SMOTE before selection; --no-smote is only for evaluate/train".into(),
        ));
    }
    let (ds, input) = load(d, c.seed)?;
    let pre = preprocessing(p, &ds, c.seed)?;
    let pipelines = default_pipelines(&pre, c.seed);
    let bench = benchmark_report(&ds, &pipelines, p.k, c.seed)?;
    bench.write_all(&c.out)?;
    for r in &bench.rows {
        match (&r.report, &r.error) {
            (Some(m), _) => print_report(&r.name, m),
            (None, Some(e)) => println!("{}: failed: {e}", r.name),
            (None, None) => {}
        }
    }
    let mut outputs = vec!["report.csv".to_string(), "roc.svg".to_string()];
    outputs.extend(bench.rows.iter().filter(|r| r.report.is_some()).map(|r| format!("roc_{}.csv", r.kind.as_str())));
    let config = json!({ "folds": p.k, "pipelines": pipelines });
    finish(&c.out, Manifest::new("benchmark", args, Some(c.seed), config, input).outputs(outputs))
}

fn predict(bundle: &Path, input: &Path, out: &Path, allow: bool, args: Vec<String>) -> CliResult<()> {
    if !bundle.is_file() {
        return Err(CliError::Data(format!("bundle {} not found", bundle.display())));
    }
    let state = load_state(bundle)?;
    let text = std::fs::read_to_string(input).map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?;
    let mut body: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: invalid JSON: {e}", input.display())))?;
    if allow {
        if let Some(o) = body.as_object_mut() {
            o.insert(cadvote_service::OVERRIDE_FIELD.into(), Value::Bool(true));
        }
    }
    let response = state
        .predict_value(&body)
        .map_err(|e| CliError::Data(e.error))?;
    let text = serde_json::to_string_pretty(&response).map_err(|e| CliError::Internal(e.to_string()))?;
    println!("{text}");
    create_dir(out)?;
    let path = out.join("prediction.json");
    std::fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;
    let inputs = json!({
        "bundle": { "path": bundle, "sha256": sha256_file(bundle)?, "model_version": state.model_version },
        "record": { "path": input, "sha256": sha256_file(input)? },
    });
    finish(out, Manifest::new("predict", args, None, json!({ "allow_out_of_range": allow }), inputs).outputs(["prediction.json"]))
}

fn serve(bundle: &Path, bind: Option<String>, cors: Vec<String>) -> CliResult<()> {
    let mut cfg = ServiceConfig::from_env()?;
    if let Some(b) = bind {
        cfg.bind = b.parse().map_err(|_| CliError::Usage(format!("--bind `{b}` is not address:port")))?;
    }
    if !cors.is_empty() {
        cfg.cors_origins = cors;
    }
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    rt.block_on(cadvote_service::serve(bundle, cfg))?;
    Ok(())
}
