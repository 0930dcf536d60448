//! The `cheapboot` command line. Every subcommand serializes a library
//! result; nothing is computed here that the library does not expose.
//!
//! Exit codes: 0 success, 2 invalid input or config, 3 more than 10% of
//! coverage repetitions failed, 4 network simulation diverged.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::bootstrap::{self, Method};
use crate::bounds::{self, GenericBoundInputs, ModelBoundInputs, Theorem};
use crate::estimators::{EstimatorKind, EstimatorSpec};
use crate::harness::{self, ExperimentConfig, HarnessError, SweepConfig, DEFAULT_SEED};
use crate::netsim::{self, InputModels, NetsimError, NetworkConfig};
use crate::resampling::{io::read_sample, io::ColumnSelector, SeedSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_EXCLUDED: i32 = 3;
pub const EXIT_DIVERGED: i32 = 4;

/// Largest tolerated fraction of failed coverage repetitions.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.10;

#[derive(Debug, Parser)]
#[command(
    name = "cheapboot",
    version,
    about = "Cheap bootstrap intervals, coverage experiments, bounds and network simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Confidence intervals for an estimator on a data file.
    Ci(CiArgs),
    /// Monte Carlo coverage experiment (or a B × n sweep when the config has `n_list`).
    Coverage(CoverageArgs),
    /// Per-run mean delays of the network simulator.
    Simulate(SimulateArgs),
    /// Coverage-error bound values over an optional (p, n, B) grid.
    Bounds(BoundsArgs),
    /// Expected cheap/normal half-width ratios.
    Width(WidthArgs),
}

#[derive(Debug, Args)]
pub struct CiArgs {
    /// CSV, binary (CBS1) or svmlight data file.
    #[arg(long)]
    pub data: PathBuf,
    /// quad_norm, sinusoid_sum, linear, ols, ridge, logistic, or an inline JSON spec.
    #[arg(long, default_value = "quad_norm")]
    pub estimator: String,
    /// Response column (index or header name).
    #[arg(long)]
    pub response: Option<String>,
    /// Coefficients of the linear functional.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub g1: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub g2: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub l2: Option<f64>,
    /// Output coordinates to keep.
    #[arg(long, value_delimiter = ',')]
    pub targets: Option<Vec<usize>>,
    /// Number of resamples.
    #[arg(short = 'B', long = "resamples", default_value_t = 1)]
    pub b: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "cheap,basic,percentile,std_error"
    )]
    pub methods: Vec<Method>,
    /// JSON output file.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Report CSV; the summary, boxplot and config files are written next to it.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Worker threads (0 = one per core). Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Network config (JSON). Defaults to the c3-exponential preset.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Bound inputs (JSON).
    #[arg(long)]
    pub inputs: PathBuf,
    /// thm1..thm9.
    #[arg(long)]
    pub thm: Theorem,
    #[arg(long, value_delimiter = ',')]
    pub p_grid: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    pub b_grid: Option<Vec<u64>>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WidthArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10")]
    pub b_list: Vec<u64>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn invalid(message: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.to_string(),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Ci(a) => cmd_ci(a, out, err),
        Command::Coverage(a) => cmd_coverage(a, out, err),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Width(a) => cmd_width(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// `dir/name.ext` → `dir/name.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

fn write_sidecar<C: Serialize>(output: &Path, command: &str, config: &C) -> Result<()> {
    let doc = json!({ "command": command, "config": config });
    write_file(
        &sibling(output, "config.json"),
        &(serde_json::to_string_pretty(&doc).expect("json value") + "\n"),
    )
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::invalid(e)
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Builds the estimator spec from `--estimator` and its parameter flags.
pub fn estimator_spec(a: &CiArgs) -> Result<EstimatorSpec> {
    let mut spec = if a.estimator.trim_start().starts_with('{') {
        serde_json::from_str::<EstimatorSpec>(&a.estimator)
            .map_err(|e| CliError::invalid(format!("--estimator: {e}")))?
    } else {
        let kind = match a.estimator.as_str() {
            "quad_norm" => EstimatorKind::QuadNorm,
            "sinusoid_sum" => EstimatorKind::SinusoidSum,
            "linear" | "linear_functional" => EstimatorKind::LinearFunctional {
                g1: a
                    .g1
                    .clone()
                    .ok_or_else(|| CliError::invalid("--estimator linear needs --g1"))?,
                g2: a.g2,
            },
            "ols" => EstimatorKind::Ols,
            "ridge" => EstimatorKind::Ridge {
                lambda: a
                    .lambda
                    .ok_or_else(|| CliError::invalid("--estimator ridge needs --lambda"))?,
            },
            "logistic" => EstimatorKind::Logistic {
                l2: a.l2.unwrap_or(0.0),
            },
            other => return Err(CliError::invalid(format!("unknown estimator '{other}'"))),
        };
        EstimatorSpec::new(kind)
    };
    if let Some(t) = &a.targets {
        spec = spec.with_targets(t.clone());
    }
    spec.validate().map_err(CliError::invalid)?;
    Ok(spec)
}

#[derive(Serialize)]
struct CiConfig<'a> {
    data: &'a Path,
    estimator: &'a EstimatorSpec,
    response: Option<&'a str>,
    #[serde(rename = "B")]
    b: usize,
    alpha: f64,
    seed: u64,
    methods: &'a [Method],
}

fn cmd_ci(a: &CiArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let spec = estimator_spec(a)?;
    if a.b == 0 {
        return Err(CliError::invalid("-B must be at least 1"));
    }
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(CliError::invalid(format!(
            "--alpha must lie in (0, 1), got {}",
            a.alpha
        )));
    }
    let selector = a
        .response
        .as_deref()
        .map(|s| s.parse::<ColumnSelector>().expect("infallible"));
    let sample = read_sample(&a.data, selector.as_ref())
        .map_err(|e| CliError::invalid(format!("{}: {e}", a.data.display())))?;
    if spec.needs_response() && sample.response().is_none() {
        return Err(CliError::invalid(format!(
            "{}: estimator needs a response column; pass --response",
            a.data.display()
        )));
    }
    let reps = bootstrap::compute_replicates(&spec, &sample, a.b, SeedSpec::new(a.seed, 0, 0, 0))
        .map_err(CliError::invalid)?;

    let mut results = Vec::new();
    writeln!(
        out,
        "{:<11} {:>5} {:>24} {:>24} {:>10}",
        "method", "coord", "lo", "hi", "degenerate"
    )
    .map_err(io_err)?;
    for &m in &a.methods {
        if a.b < m.min_replicates() {
            writeln!(
                err,
                "warning: {m} needs B >= {}, reporting N.A.",
                m.min_replicates()
            )
            .map_err(io_err)?;
            writeln!(
                out,
                "{:<11} {:>5} {:>24} {:>24} {:>10}",
                m.as_str(),
                "-",
                "N.A.",
                "N.A.",
                "-"
            )
            .map_err(io_err)?;
            results.push(json!({ "method": m, "status": "N.A." }));
            continue;
        }
        let set = bootstrap::interval(m, &reps, a.alpha).map_err(CliError::invalid)?;
        for (j, iv) in set.intervals.iter().enumerate() {
            writeln!(
                out,
                "{:<11} {:>5} {:>24.16e} {:>24.16e} {:>10}",
                m.as_str(),
                j,
                iv.lo,
                iv.hi,
                iv.degenerate
            )
            .map_err(io_err)?;
        }
        results.push(
            json!({ "method": m, "status": "ok", "level": set.level, "intervals": set.intervals }),
        );
    }
    if let Some(path) = &a.output {
        let doc = json!({ "point": reps.point(), "B": a.b, "alpha": a.alpha, "results": results });
        write_file(
            path,
            &(serde_json::to_string_pretty(&doc).expect("json value") + "\n"),
        )?;
        let cfg = CiConfig {
            data: &a.data,
            estimator: &spec,
            response: a.response.as_deref(),
            b: a.b,
            alpha: a.alpha,
            seed: a.seed,
            methods: &a.methods,
        };
        write_sidecar(path, "ci", &cfg)?;
    }
    Ok(())
}

fn harness_err(e: HarnessError) -> CliError {
    match e {
        HarnessError::AllExcluded { .. } => CliError {
            code: EXIT_EXCLUDED,
            message: e.to_string(),
        },
        other => CliError::invalid(other),
    }
}

fn check_excluded(excluded: usize, requested: usize) -> Result<()> {
    if excluded as f64 > MAX_EXCLUDED_FRACTION * requested as f64 {
        return Err(CliError {
            code: EXIT_EXCLUDED,
            message: format!("{excluded} of {requested} repetitions failed (limit 10%)"),
        });
    }
    Ok(())
}

fn cmd_coverage(a: &CoverageArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let value: serde_json::Value = read_json(&a.config)?;
    let is_sweep = value.get("n_list").is_some();
    let invalid = |e: serde_json::Error| CliError::invalid(format!("{}: {e}", a.config.display()));
    if is_sweep {
        let cfg: SweepConfig = serde_json::from_value(value).map_err(invalid)?;
        cfg.cells().map_err(harness_err)?;
        let report = harness::sweep(&cfg, a.workers).map_err(harness_err)?;
        write_file(&a.output, &report.to_csv_string().map_err(harness_err)?)?;
        let summary =
            serde_json::to_string_pretty(&report.summary_json()).expect("json value") + "\n";
        write_file(&sibling(&a.output, "summary.json"), &summary)?;
        write_sidecar(&a.output, "coverage", &cfg)?;
        out.write_all(report.summary_table().as_bytes())
            .map_err(io_err)?;
        for f in &report.failures {
            writeln!(err, "warning: cell {f}").map_err(io_err)?;
        }
        if !report.failures.is_empty() {
            return Err(CliError {
                code: EXIT_EXCLUDED,
                message: format!("{} sweep cells failed", report.failures.len()),
            });
        }
        check_excluded(report.excluded_reps(), report.requested_repetitions())
    } else {
        let cfg: ExperimentConfig = serde_json::from_value(value).map_err(invalid)?;
        cfg.validate().map_err(harness_err)?;
        let report = harness::run_experiment_with(&cfg, a.workers).map_err(harness_err)?;
        write_file(&a.output, &report.to_csv_string().map_err(harness_err)?)?;
        write_file(
            &sibling(&a.output, "boxplot.csv"),
            &report.boxplot_csv_string().map_err(harness_err)?,
        )?;
        let summary =
            serde_json::to_string_pretty(&report.summary_json()).expect("json value") + "\n";
        write_file(&sibling(&a.output, "summary.json"), &summary)?;
        write_sidecar(&a.output, "coverage", &cfg)?;
        out.write_all(report.summary_table().as_bytes())
            .map_err(io_err)?;
        for na in &report.not_applicable {
            writeln!(err, "warning: {} at B={} reported as N.A.", na.method, na.b)
                .map_err(io_err)?;
        }
        check_excluded(report.excluded_reps, report.requested_repetitions)
    }
}

fn netsim_err(e: NetsimError) -> CliError {
    match e {
        NetsimError::Divergence { .. } => CliError {
            code: EXIT_DIVERGED,
            message: e.to_string(),
        },
        other => CliError::invalid(other),
    }
}

#[derive(Serialize)]
struct SimulateConfig<'a> {
    network: &'a NetworkConfig,
    seed: u64,
    reps: usize,
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    if a.reps == 0 {
        return Err(CliError::invalid("--reps must be at least 1"));
    }
    let config = match (&a.config, &a.preset) {
        (Some(path), _) => read_json::<NetworkConfig>(path)?,
        (None, Some(name)) => NetworkConfig::preset(name).map_err(netsim_err)?,
        (None, None) => NetworkConfig::exponential_preset(),
    };
    config.validate().map_err(netsim_err)?;
    let models = InputModels::parametric(&config).map_err(netsim_err)?;
    let delays = (0..a.reps as u64)
        .map(|i| {
            netsim::simulate(&models, &config, SeedSpec::new(a.seed, i, 0, 0)).map(|o| o.mean_delay)
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(netsim_err)?;
    let k = delays.len() as f64;
    let mean = delays.iter().sum::<f64>() / k;
    let se = if delays.len() > 1 {
        (delays.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
    } else {
        0.0
    };
    let mut rows: Vec<Vec<String>> = delays
        .iter()
        .enumerate()
        .map(|(i, d)| vec![i.to_string(), num(*d)])
        .collect();
    rows.push(vec!["mean".into(), num(mean)]);
    rows.push(vec!["se".into(), num(se)]);
    let text = csv_text(&["seed_index", "mean_delay"], &rows);
    match &a.output {
        Some(path) => {
            write_file(path, &text)?;
            write_sidecar(
                path,
                "simulate",
                &SimulateConfig {
                    network: &config,
                    seed: a.seed,
                    reps: a.reps,
                },
            )?;
            writeln!(
                out,
                "mean delay {mean:.6e} s, s.e. {se:.2e} over {} runs",
                a.reps
            )
            .map_err(io_err)?;
        }
        None => out.write_all(text.as_bytes()).map_err(io_err)?,
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(untagged)]
enum BoundInputs {
    Generic(GenericBoundInputs),
    Model(ModelBoundInputs),
}

fn cmd_bounds(a: &BoundsArgs, out: &mut dyn Write) -> Result<()> {
    let bad = |e: bounds::BoundError| CliError::invalid(format!("{}: {e}", a.thm));
    let mut rows = Vec::new();
    let resolved = if a.thm.is_generic() {
        if a.p_grid.is_some() || a.n_grid.is_some() {
            return Err(CliError::invalid(format!(
                "{} has no p or n; only --b-grid applies",
                a.thm
            )));
        }
        let inp: GenericBoundInputs = read_json(&a.inputs)?;
        for b in a.b_grid.clone().unwrap_or_else(|| vec![inp.b]) {
            let point = GenericBoundInputs { b, ..inp.clone() };
            let v = bounds::evaluate_generic(a.thm, &point).map_err(bad)?;
            rows.push(vec![String::new(), String::new(), b.to_string(), num(v)]);
        }
        BoundInputs::Generic(inp)
    } else {
        let inp: ModelBoundInputs = read_json(&a.inputs)?;
        let ps = a.p_grid.clone().unwrap_or_else(|| vec![inp.p]);
        let ns = a.n_grid.clone().unwrap_or_else(|| vec![inp.n]);
        let bs = a.b_grid.clone().unwrap_or_else(|| vec![inp.b]);
        for &p in &ps {
            for &n in &ns {
                for &b in &bs {
                    let point = ModelBoundInputs {
                        p,
                        n,
                        b,
                        ..inp.clone()
                    };
                    let v = bounds::evaluate_model(a.thm, &point).map_err(bad)?.total;
                    rows.push(vec![p.to_string(), n.to_string(), b.to_string(), num(v)]);
                }
            }
        }
        BoundInputs::Model(inp)
    };
    let text = csv_text(&["p", "n", "B", "bound"], &rows);
    match &a.output {
        Some(path) => {
            write_file(path, &text)?;
            let cfg = json!({
                "thm": a.thm,
                "inputs": resolved,
                "p_grid": a.p_grid,
                "n_grid": a.n_grid,
                "B_grid": a.b_grid,
            });
            write_sidecar(path, "bounds", &cfg)?;
        }
        None => out.write_all(text.as_bytes()).map_err(io_err)?,
    }
    Ok(())
}

fn cmd_width(a: &WidthArgs, out: &mut dyn Write) -> Result<()> {
    if a.b_list.is_empty() || a.b_list.contains(&0) {
        return Err(CliError::invalid("--b-list entries must be at least 1"));
    }
    let mut rows = Vec::new();
    for &b in &a.b_list {
        let r = bootstrap::expected_halfwidth_ratio(b, a.alpha).map_err(CliError::invalid)?;
        rows.push(vec![b.to_string(), num(r), num(100.0 * (r - 1.0))]);
    }
    let text = csv_text(&["B", "ratio", "inflation_percent"], &rows);
    out.write_all(text.as_bytes()).map_err(io_err)?;
    if let Some(path) = &a.output {
        write_file(path, &text)?;
        write_sidecar(
            path,
            "width",
            &json!({ "B_list": a.b_list, "alpha": a.alpha }),
        )?;
    }
    Ok(())
}
