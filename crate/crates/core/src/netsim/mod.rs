//! Discrete-event simulator of a four-node ring network. Messages arrive on
//! twelve ordered node pairs, are processed by every node they visit and
//! cross capacity-limited channels; the output functional is the mean delay
//! of messages `warmup+1 ..= horizon`.
//!
//! Conventions: channel `c` (1-based) joins node `c` and node `c mod 4 + 1`;
//! routes are minimum-hop with antipodal ties sent through the lower-numbered
//! intermediate node; each channel is a single FIFO transmitter shared by
//! both directions, and a message reserves its length in channel capacity
//! from transmission start until it leaves the channel.

mod sim;

use std::sync::Arc;

use rand_distr::{Distribution as _, Exp, Gamma};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::resampling::{MultiSourceSample, SeedSpec, StreamDomain, StreamRng};

pub use sim::{simulate, simulate_with, MessageRecord, SimDiagnostics, SimOptions, SimOutput};

pub const NODES: usize = 4;
/// 12 inter-arrival sources plus message length.
pub const SOURCES: usize = 13;
pub const LENGTH_SOURCE: usize = 12;

/// The twelve ordered `(from, to)` pairs (0-based) in row-major order; the
/// position in this table is the source index.
pub const PAIRS: [(usize, usize); 12] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 0),
    (1, 2),
    (1, 3),
    (2, 0),
    (2, 1),
    (2, 3),
    (3, 0),
    (3, 1),
    (3, 2),
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetsimError {
    #[error("invalid network configuration: {0}")]
    Config(String),
    #[error("simulation exceeded the time cap of {cap} s with {delivered} of {horizon} tracked messages delivered")]
    Divergence {
        cap: f64,
        delivered: usize,
        horizon: usize,
    },
    #[error("message of {len} bits can never fit a channel of {capacity} bits")]
    MessageTooLong { len: f64, capacity: f64 },
    #[error("source {source_index} holds a nonpositive or non-finite value {value}")]
    NonPositiveData { source_index: usize, value: f64 },
    #[error("expected {expected} data sources, got {got}")]
    SourceCount { expected: usize, got: usize },
    #[error("unknown preset '{0}' (expected c3-exponential or c3-gamma)")]
    UnknownPreset(String),
}

pub type Result<T> = std::result::Result<T, NetsimError>;

/// A parametric positive distribution. Gamma uses the shape/rate form with
/// density `β^α x^{α−1} e^{−βx} / Γ(α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
}

impl Distribution {
    pub fn mean(&self) -> f64 {
        match *self {
            Distribution::Exponential { rate } => 1.0 / rate,
            Distribution::Gamma { shape, rate } => shape / rate,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Distribution::Exponential { rate } => 1.0 / (rate * rate),
            Distribution::Gamma { shape, rate } => shape / (rate * rate),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Distribution::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            Distribution::Gamma { shape, rate } => {
                shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(NetsimError::Config(format!(
                "distribution parameters must be positive: {self:?}"
            )))
        }
    }

    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        match *self {
            Distribution::Exponential { rate } => {
                Exp::new(rate).expect("validated rate").sample(rng)
            }
            Distribution::Gamma { shape, rate } => Gamma::new(shape, 1.0 / rate)
                .expect("validated parameters")
                .sample(rng),
        }
    }
}

/// Inter-arrival ground truth as a 4×4 table; diagonal entries must be null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArrivalTable {
    /// Poisson arrivals with rates `λ_{i,j}` per second.
    Exponential {
        rates: [[Option<f64>; NODES]; NODES],
    },
    /// Gamma inter-arrival times with `(shape, rate)` per pair.
    Gamma {
        params: [[Option<(f64, f64)>; NODES]; NODES],
    },
}

impl ArrivalTable {
    /// Distribution of source `k` (see [`PAIRS`]).
    pub fn source(&self, k: usize) -> Result<Distribution> {
        let (i, j) = PAIRS[k];
        let missing = || {
            NetsimError::Config(format!(
                "arrival table entry ({}, {}) is missing",
                i + 1,
                j + 1
            ))
        };
        match self {
            ArrivalTable::Exponential { rates } => Ok(Distribution::Exponential {
                rate: rates[i][j].ok_or_else(missing)?,
            }),
            ArrivalTable::Gamma { params } => {
                let (shape, rate) = params[i][j].ok_or_else(missing)?;
                Ok(Distribution::Gamma { shape, rate })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub arrivals: ArrivalTable,
    pub msg_len: Distribution,
    #[serde(default = "defaults::proc")]
    pub node_proc_time: f64,
    #[serde(default = "defaults::capacity")]
    pub channel_capacity_bits: f64,
    #[serde(default = "defaults::capacity")]
    pub channel_bandwidth_bits_per_s: f64,
    /// Length of channel `c` (1-based) is entry `c − 1`.
    #[serde(default = "defaults::lengths")]
    pub channel_length_miles: [f64; NODES],
    #[serde(default = "defaults::speed")]
    pub propagation_miles_per_s: f64,
    #[serde(default = "defaults::warmup")]
    pub warmup_messages: usize,
    #[serde(default = "defaults::horizon")]
    pub horizon_messages: usize,
    #[serde(default = "defaults::cap")]
    pub time_cap_s: f64,
}

mod defaults {
    pub fn proc() -> f64 {
        0.001
    }
    pub fn capacity() -> f64 {
        275_000.0
    }
    pub fn lengths() -> [f64; 4] {
        [100.0, 200.0, 300.0, 400.0]
    }
    pub fn speed() -> f64 {
        150_000.0
    }
    pub fn warmup() -> usize {
        500
    }
    pub fn horizon() -> usize {
        10_000
    }
    pub fn cap() -> f64 {
        1e6
    }
}

pub const PRESETS: [&str; 2] = ["c3-exponential", "c3-gamma"];

impl NetworkConfig {
    fn with_tables(arrivals: ArrivalTable, msg_len: Distribution) -> Self {
        Self {
            arrivals,
            msg_len,
            node_proc_time: defaults::proc(),
            channel_capacity_bits: defaults::capacity(),
            channel_bandwidth_bits_per_s: defaults::capacity(),
            channel_length_miles: defaults::lengths(),
            propagation_miles_per_s: defaults::speed(),
            warmup_messages: defaults::warmup(),
            horizon_messages: defaults::horizon(),
            time_cap_s: defaults::cap(),
        }
    }

    /// Poisson arrivals and exponential message lengths with mean 300 bits.
    pub fn exponential_preset() -> Self {
        let r = |v: f64| Some(v);
        Self::with_tables(
            ArrivalTable::Exponential {
                rates: [
                    [None, r(40.0), r(30.0), r(35.0)],
                    [r(50.0), None, r(45.0), r(15.0)],
                    [r(60.0), r(15.0), None, r(20.0)],
                    [r(25.0), r(30.0), r(40.0), None],
                ],
            },
            Distribution::Exponential { rate: 1.0 / 300.0 },
        )
    }

    /// Gamma inter-arrival times and Gamma(2.5, 1/200) message lengths.
    pub fn gamma_preset() -> Self {
        let g = |a: f64, b: f64| Some((a, b));
        Self::with_tables(
            ArrivalTable::Gamma {
                params: [
                    [None, g(1.5, 60.0), g(0.7, 40.0), g(1.3, 50.0)],
                    [g(2.0, 80.0), None, g(1.5, 65.0), g(0.6, 20.0)],
                    [g(3.0, 100.0), g(0.5, 25.0), None, g(1.2, 30.0)],
                    [g(0.8, 40.0), g(1.1, 50.0), g(0.9, 35.0), None],
                ],
            },
            Distribution::Gamma {
                shape: 2.5,
                rate: 1.0 / 200.0,
            },
        )
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "c3-exponential" => Ok(Self::exponential_preset()),
            "c3-gamma" => Ok(Self::gamma_preset()),
            other => Err(NetsimError::UnknownPreset(other.to_string())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for d in self.ground_truth()? {
            d.validate()?;
        }
        let positive = [
            ("node_proc_time", self.node_proc_time),
            ("channel_capacity_bits", self.channel_capacity_bits),
            (
                "channel_bandwidth_bits_per_s",
                self.channel_bandwidth_bits_per_s,
            ),
            ("propagation_miles_per_s", self.propagation_miles_per_s),
            ("time_cap_s", self.time_cap_s),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(NetsimError::Config(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self
            .channel_length_miles
            .iter()
            .any(|l| !(*l >= 0.0 && l.is_finite()))
        {
            return Err(NetsimError::Config(
                "channel lengths must be nonnegative".into(),
            ));
        }
        if self.horizon_messages <= self.warmup_messages {
            return Err(NetsimError::Config(format!(
                "horizon_messages ({}) must exceed warmup_messages ({})",
                self.horizon_messages, self.warmup_messages
            )));
        }
        let diagonal_set = match &self.arrivals {
            ArrivalTable::Exponential { rates } => (0..NODES).any(|i| rates[i][i].is_some()),
            ArrivalTable::Gamma { params } => (0..NODES).any(|i| params[i][i].is_some()),
        };
        if diagonal_set {
            return Err(NetsimError::Config(
                "diagonal arrival entries must be null".into(),
            ));
        }
        Ok(())
    }

    /// The 13 ground-truth distributions in source order.
    pub fn ground_truth(&self) -> Result<Vec<Distribution>> {
        let mut out = (0..12)
            .map(|k| self.arrivals.source(k))
            .collect::<Result<Vec<_>>>()?;
        out.push(self.msg_len);
        Ok(out)
    }
}

/// Sampler for one input source.
#[derive(Debug, Clone, PartialEq)]
pub enum InputModel {
    Parametric(Distribution),
    /// Uniform draws, with replacement, from observed values.
    Empirical(Arc<[f64]>),
    /// A source that never emits; only meaningful for arrival sources.
    Disabled,
}

impl InputModel {
    fn draw(&self, rng: &mut StreamRng) -> Option<f64> {
        match self {
            InputModel::Parametric(d) => Some(d.sample(rng)),
            InputModel::Empirical(v) => Some(v[rng.below(v.len() as u64) as usize]),
            InputModel::Disabled => None,
        }
    }
}

/// The 13 samplers driving a simulation, in source order.
#[derive(Debug, Clone, PartialEq)]
pub struct InputModels {
    models: Vec<InputModel>,
}

impl InputModels {
    pub fn new(models: Vec<InputModel>) -> Result<Self> {
        if models.len() != SOURCES {
            return Err(NetsimError::SourceCount {
                expected: SOURCES,
                got: models.len(),
            });
        }
        if models[LENGTH_SOURCE] == InputModel::Disabled {
            return Err(NetsimError::Config(
                "the message-length source cannot be disabled".into(),
            ));
        }
        for (k, m) in models.iter().enumerate() {
            match m {
                InputModel::Parametric(d) => d.validate()?,
                InputModel::Empirical(v) => check_positive(k, v)?,
                InputModel::Disabled => {}
            }
        }
        Ok(Self { models })
    }

    pub fn parametric(config: &NetworkConfig) -> Result<Self> {
        Self::new(
            config
                .ground_truth()?
                .into_iter()
                .map(InputModel::Parametric)
                .collect(),
        )
    }

    pub fn empirical(data: &MultiSourceSample) -> Result<Self> {
        if data.len() != SOURCES {
            return Err(NetsimError::SourceCount {
                expected: SOURCES,
                got: data.len(),
            });
        }
        Self::new(
            data.sources()
                .iter()
                .map(|s| InputModel::Empirical(s.as_slice().into()))
                .collect(),
        )
    }

    pub fn models(&self) -> &[InputModel] {
        &self.models
    }
}

fn check_positive(source_index: usize, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(NetsimError::Config(format!(
            "source {source_index} is empty"
        )));
    }
    match values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        Some(&value) => Err(NetsimError::NonPositiveData {
            source_index,
            value,
        }),
        None => Ok(()),
    }
}

/// Plug-in delay estimate: simulate with every input replaced by the
/// empirical distribution of its data, averaged over `inner_runs` runs.
pub fn delay_estimator(
    data: &MultiSourceSample,
    config: &NetworkConfig,
    inner_seed: SeedSpec,
    inner_runs: usize,
) -> Result<f64> {
    let models = InputModels::empirical(data)?;
    let runs = inner_runs.max(1);
    let mut total = 0.0;
    for r in 0..runs {
        // Inner run r reads source streams r·SOURCES .. r·SOURCES + 12.
        let seed = inner_seed.with_source(inner_seed.source_index + (r * SOURCES) as u64);
        total += simulate(&models, config, seed)?.mean_delay;
    }
    Ok(total / runs as f64)
}

/// I.i.d. draws from the configured ground truth, `sizes[k]` for source `k`.
pub fn generate_input_data(
    config: &NetworkConfig,
    sizes: &[usize],
    seed: SeedSpec,
) -> Result<MultiSourceSample> {
    if sizes.len() != SOURCES {
        return Err(NetsimError::SourceCount {
            expected: SOURCES,
            got: sizes.len(),
        });
    }
    if sizes.contains(&0) {
        return Err(NetsimError::Config(
            "every source needs at least one observation".into(),
        ));
    }
    config.validate()?;
    let truth = config.ground_truth()?;
    let sources = truth
        .iter()
        .zip(sizes)
        .enumerate()
        .map(|(k, (d, &m))| {
            let mut rng = seed
                .with_source(k as u64)
                .stream(StreamDomain::DataGeneration);
            (0..m).map(|_| d.sample(&mut rng)).collect()
        })
        .collect();
    Ok(MultiSourceSample::new(sources).expect("generated sources are nonempty and finite"))
}
