//! Monte Carlo coverage experiments: generate data from a known truth, build
//! every requested interval on each repetition, and tabulate how often the
//! truth is covered.

mod report;
mod scenario;

pub use report::{
    quartiles, CellReport, CoordinateStats, CoverageReport, NotApplicable, RepFailure, SweepCell,
    SweepReport, CSV_HEADER,
};
pub use scenario::{
    generate_scenario, linear_beta, logistic_beta, Covariance, NetworkSpec, Scenario, ScenarioData,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bootstrap::{self, BootstrapError, Method, ReplicateSet};
use crate::estimators::EstimatorError;
use crate::netsim::{delay_estimator, NetsimError, SOURCES};
use crate::resampling::{resample_multi, SampleError};
use report::Accumulator;
use scenario::Prepared;

/// Master seed used whenever none is given.
pub const DEFAULT_SEED: u64 = 20_220_101;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("all {repetitions} repetitions failed; first error: {first}")]
    AllExcluded { repetitions: usize, first: String },
    #[error("could not build worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Bootstrap(#[from] BootstrapError),
    #[error(transparent)]
    Netsim(#[from] NetsimError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

fn default_alpha() -> f64 {
    0.05
}
fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn one() -> f64 {
    1.0
}
fn one_run() -> usize {
    1
}

/// One coverage experiment. Field names follow the JSON config schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    /// Sample size; may be omitted in a sweep, where `n_list` supplies it.
    #[serde(default)]
    pub n: usize,
    pub p: usize,
    #[serde(rename = "B_list", alias = "b_list")]
    pub b_list: Vec<usize>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub repetitions: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    /// Ridge penalty on ||β||².
    #[serde(default = "one")]
    pub lambda: f64,
    /// Penalty ||β||²·l2/2 for `logreg_l2`.
    #[serde(default = "one")]
    pub l2: f64,
    /// Covariate law for `ridge`; the other scenarios fix their own.
    #[serde(default)]
    pub covariance: Covariance,
    /// Standard deviation of the regression noise.
    #[serde(default = "one")]
    pub noise_sd: f64,
    #[serde(default)]
    pub target_coords: Option<Vec<usize>>,
    #[serde(default)]
    pub network: NetworkSpec,
    /// Observations per netsim input source; defaults to `n` for all 13.
    #[serde(default)]
    pub source_sizes: Option<Vec<usize>>,
    #[serde(default = "one_run")]
    pub inner_runs: usize,
    /// Externally supplied target for `netsim`.
    #[serde(default)]
    pub truth: Option<f64>,
    /// Added to every repetition index; keeps sweep cells on disjoint streams.
    #[serde(default)]
    pub rep_offset: u64,
}

impl ExperimentConfig {
    pub fn new(
        scenario: Scenario,
        n: usize,
        p: usize,
        b_list: Vec<usize>,
        repetitions: usize,
    ) -> Self {
        Self {
            scenario,
            n,
            p,
            b_list,
            alpha: default_alpha(),
            repetitions,
            methods: default_methods(),
            master_seed: DEFAULT_SEED,
            lambda: 1.0,
            l2: 1.0,
            covariance: Covariance::Independent,
            noise_sd: 1.0,
            target_coords: None,
            network: NetworkSpec::default(),
            source_sizes: None,
            inner_runs: 1,
            truth: None,
            rep_offset: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.n == 0 || self.p == 0 {
            return bad(format!(
                "n and p must be positive, got n={} p={}",
                self.n, self.p
            ));
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.b_list.is_empty() || self.b_list.contains(&0) {
            return bad(format!(
                "B_list must be nonempty with positive entries, got {:?}",
                self.b_list
            ));
        }
        if self.methods.is_empty() {
            return bad("methods must be nonempty".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        for (name, v) in [
            ("lambda", self.lambda),
            ("l2", self.l2),
            ("noise_sd", self.noise_sd),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        match self.scenario {
            Scenario::Ellipsoidal | Scenario::Sinusoidal => {
                if self.target_coords.as_ref().is_some_and(|c| c != &[0]) {
                    return bad("scalar scenarios only have coordinate 0".into());
                }
            }
            Scenario::Netsim => {
                if self.p != SOURCES {
                    return bad(format!(
                        "netsim has p = {SOURCES} input sources, got p={}",
                        self.p
                    ));
                }
                if self.truth.is_none_or(|t| !t.is_finite()) {
                    return bad("netsim scenario needs a finite external `truth`".into());
                }
                if let Some(sizes) = &self.source_sizes {
                    if sizes.len() != SOURCES || sizes.contains(&0) {
                        return bad(format!("source_sizes needs {SOURCES} positive entries"));
                    }
                }
                if self.target_coords.as_ref().is_some_and(|c| c != &[0]) {
                    return bad("netsim only has coordinate 0".into());
                }
            }
            _ => {
                if let Some(c) = self
                    .target_coords
                    .as_ref()
                    .and_then(|c| c.iter().find(|&&i| i >= self.p))
                {
                    return bad(format!(
                        "target coordinate {c} out of range for p={}",
                        self.p
                    ));
                }
                let unpenalised = match self.scenario {
                    Scenario::Ridge => self.lambda == 0.0,
                    Scenario::LogregL2 => self.l2 == 0.0,
                    _ => true,
                };
                if unpenalised && self.n <= self.p {
                    return bad(format!(
                        "{} needs n > p, got n={} p={}",
                        self.scenario, self.n, self.p
                    ));
                }
            }
        }
        Ok(())
    }

    fn b_max(&self) -> usize {
        self.b_list.iter().copied().max().unwrap_or(1)
    }

    /// Requested (method, B) pairs in output order, split into runnable
    /// ones and ones that need more replicates than B.
    fn combos(&self) -> (Vec<(Method, usize)>, Vec<NotApplicable>) {
        let mut methods = self.methods.clone();
        dedup_in_order(&mut methods);
        let mut bs = self.b_list.clone();
        dedup_in_order(&mut bs);
        let mut run = Vec::new();
        let mut na = Vec::new();
        for &m in &methods {
            for &b in &bs {
                if b >= m.min_replicates() {
                    run.push((m, b));
                } else {
                    na.push(NotApplicable { method: m, b });
                }
            }
        }
        (run, na)
    }
}

fn dedup_in_order<T: PartialEq + Copy>(v: &mut Vec<T>) {
    let mut out: Vec<T> = Vec::with_capacity(v.len());
    for x in v.iter() {
        if !out.contains(x) {
            out.push(*x);
        }
    }
    *v = out;
}

/// Point estimate and `b_max` replicates for one repetition.
fn replicates_for(prep: &Prepared, config: &ExperimentConfig, rep: u64) -> Result<ReplicateSet> {
    let seed = prep.rep_seed(rep);
    let b_max = config.b_max();
    match prep.generate(rep)? {
        ScenarioData::Sample(sample) => Ok(bootstrap::compute_replicates(
            &prep.estimator,
            &sample,
            b_max,
            seed,
        )?),
        ScenarioData::Sources(data) => {
            let network = prep
                .network
                .as_ref()
                .expect("netsim scenario carries a network");
            let point = delay_estimator(&data, network, seed, config.inner_runs)?;
            let replicates = (1..=b_max as u64)
                .map(|k| {
                    let s = seed.with_resample(k);
                    delay_estimator(&resample_multi(&data, s), network, s, config.inner_runs)
                        .map(|v| vec![v])
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let n = data.sizes().into_iter().min().unwrap_or(0);
            Ok(ReplicateSet::new(vec![point], replicates, n)?)
        }
    }
}

/// Per (method, B): coverage flag and width for each coordinate.
type RepOutcome = Vec<Vec<(bool, f64)>>;

fn run_rep(
    prep: &Prepared,
    config: &ExperimentConfig,
    truth: &[f64],
    combos: &[(Method, usize)],
    rep: u64,
) -> Result<RepOutcome> {
    let r = replicates_for(prep, config, rep)?;
    if r.dim() != truth.len() {
        return Err(HarnessError::Config(format!(
            "estimator returned {} coordinates, truth has {}",
            r.dim(),
            truth.len()
        )));
    }
    combos
        .iter()
        .map(|&(method, b)| {
            let set = bootstrap::interval(method, &r.prefix(b), config.alpha)?;
            Ok(set
                .intervals
                .iter()
                .zip(truth)
                .map(|(iv, &t)| (iv.contains(t), iv.width()))
                .collect())
        })
        .collect()
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))
}

/// Runs the experiment on the global rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<CoverageReport> {
    run_experiment_with(config, 0)
}

/// Runs the experiment on a pool of `workers` threads (0 picks the rayon
/// default). The report does not depend on `workers`.
pub fn run_experiment_with(config: &ExperimentConfig, workers: usize) -> Result<CoverageReport> {
    let pool = build_pool(workers)?;
    pool.install(|| run_in_pool(config))
}

fn run_in_pool(config: &ExperimentConfig) -> Result<CoverageReport> {
    let prep = Prepared::new(config)?;
    let truth = prep.truth();
    let (combos, not_applicable) = config.combos();
    let mut acc = Accumulator::new(combos.len(), truth.len());
    let mut failures = Vec::new();

    // Outcomes are folded strictly in repetition order, so float sums do not
    // depend on how the chunks were scheduled.
    let chunk = (rayon::current_num_threads() * 4).max(1);
    let reps = config.repetitions as u64;
    let mut start = 0u64;
    while start < reps {
        let end = (start + chunk as u64).min(reps);
        let outcomes: Vec<Result<RepOutcome>> = (start..end)
            .into_par_iter()
            .map(|rep| run_rep(&prep, config, &truth, &combos, rep))
            .collect();
        for (rep, outcome) in (start..end).zip(outcomes) {
            match outcome {
                Ok(o) => acc.add(&o),
                Err(e) => failures.push(RepFailure {
                    repetition: rep,
                    message: e.to_string(),
                }),
            }
        }
        start = end;
    }
    if acc.used == 0 {
        return Err(HarnessError::AllExcluded {
            repetitions: config.repetitions,
            first: failures
                .first()
                .map(|f| f.message.clone())
                .unwrap_or_default(),
        });
    }
    Ok(CoverageReport::from_accumulator(
        config,
        &combos,
        acc,
        not_applicable,
        failures,
    ))
}

/// A grid of experiments over `B_list × n_list`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(flatten)]
    pub base: ExperimentConfig,
    pub n_list: Vec<usize>,
}

impl SweepConfig {
    /// Cells in B-major order. Cell `c` shifts repetition indices by
    /// `c · repetitions`, so no two cells share a random stream.
    pub fn cells(&self) -> Result<Vec<ExperimentConfig>> {
        if self.n_list.is_empty() || self.base.b_list.is_empty() {
            return Err(HarnessError::Config(
                "sweep needs nonempty B_list and n_list".into(),
            ));
        }
        let mut cells = Vec::new();
        for &b in &self.base.b_list {
            for &n in &self.n_list {
                let mut cfg = self.base.clone();
                cfg.b_list = vec![b];
                cfg.n = n;
                cfg.rep_offset =
                    self.base.rep_offset + (cells.len() * self.base.repetitions) as u64;
                cfg.validate()?;
                cells.push(cfg);
            }
        }
        Ok(cells)
    }
}

/// Runs every grid cell; a cell whose repetitions all fail is recorded in
/// `failures` and the remaining cells still run.
pub fn sweep(config: &SweepConfig, workers: usize) -> Result<SweepReport> {
    let pool = build_pool(workers)?;
    let cells = config.cells()?;
    let mut out = SweepReport {
        scenario: config.base.scenario,
        methods: config.base.methods.clone(),
        cells: Vec::new(),
        failures: Vec::new(),
    };
    dedup_in_order(&mut out.methods);
    for cfg in cells {
        match pool.install(|| run_in_pool(&cfg)) {
            Ok(report) => out.cells.push(SweepCell {
                b: cfg.b_list[0],
                n: cfg.n,
                report,
            }),
            Err(e) => out
                .failures
                .push(format!("B={} n={}: {e}", cfg.b_list[0], cfg.n)),
        }
    }
    Ok(out)
}
