//! Ground-truth data generators for the built-in experiment scenarios.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, HarnessError, Result};
use crate::estimators::{EstimatorKind, EstimatorSpec};
use crate::netsim::{generate_input_data, NetworkConfig, SOURCES};
use crate::resampling::{EmpiricalSample, MultiSourceSample, SeedSpec, StreamDomain, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Ellipsoidal,
    Sinusoidal,
    LinregIndep,
    LinregExpdecay,
    LinregRandcov,
    LogregIndep,
    LogregExpdecay,
    LogregL2,
    Ridge,
    Netsim,
}

impl Scenario {
    pub const ALL: [Scenario; 10] = [
        Scenario::Ellipsoidal,
        Scenario::Sinusoidal,
        Scenario::LinregIndep,
        Scenario::LinregExpdecay,
        Scenario::LinregRandcov,
        Scenario::LogregIndep,
        Scenario::LogregExpdecay,
        Scenario::LogregL2,
        Scenario::Ridge,
        Scenario::Netsim,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Ellipsoidal => "ellipsoidal",
            Scenario::Sinusoidal => "sinusoidal",
            Scenario::LinregIndep => "linreg_indep",
            Scenario::LinregExpdecay => "linreg_expdecay",
            Scenario::LinregRandcov => "linreg_randcov",
            Scenario::LogregIndep => "logreg_indep",
            Scenario::LogregExpdecay => "logreg_expdecay",
            Scenario::LogregL2 => "logreg_l2",
            Scenario::Ridge => "ridge",
            Scenario::Netsim => "netsim",
        }
    }

    fn is_linear(self) -> bool {
        matches!(
            self,
            Scenario::LinregIndep
                | Scenario::LinregExpdecay
                | Scenario::LinregRandcov
                | Scenario::Ridge
        )
    }

    fn is_logistic(self) -> bool {
        matches!(
            self,
            Scenario::LogregIndep | Scenario::LogregExpdecay | Scenario::LogregL2
        )
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Covariance of the covariates, before the overall 0.01 scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Covariance {
    #[default]
    Independent,
    /// Σ_ij = 0.8^|i-j|.
    ExpDecay,
    /// A·Aᵀ with A i.i.d. U(0,1), drawn once per master seed.
    RandCov,
}

/// Either a named preset or a full network configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetworkSpec {
    Preset(String),
    Config(Box<NetworkConfig>),
}

impl Default for NetworkSpec {
    fn default() -> Self {
        NetworkSpec::Preset("c3-exponential".into())
    }
}

impl NetworkSpec {
    pub fn resolve(&self) -> Result<NetworkConfig> {
        let config = match self {
            NetworkSpec::Preset(name) => NetworkConfig::preset(name)?,
            NetworkSpec::Config(c) => (**c).clone(),
        };
        config.validate()?;
        Ok(config)
    }
}

/// Generated data for one repetition.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioData {
    Sample(EmpiricalSample),
    Sources(MultiSourceSample),
}

/// Everything that stays fixed across repetitions of one experiment.
#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    pub scenario: Scenario,
    pub n: usize,
    pub p: usize,
    pub master_seed: u64,
    pub rep_offset: u64,
    pub noise_sd: f64,
    pub covariance: Covariance,
    /// Transposed mixing matrix for the random-covariance case.
    pub mix_t: Option<DMatrix<f64>>,
    /// Full-dimension truth (β for regressions, the scalar target otherwise).
    pub truth_full: Vec<f64>,
    pub estimator: EstimatorSpec,
    pub network: Option<NetworkConfig>,
    pub source_sizes: Vec<usize>,
}

pub(crate) fn covariance_of(config: &ExperimentConfig) -> Covariance {
    match config.scenario {
        Scenario::LinregExpdecay | Scenario::LogregExpdecay => Covariance::ExpDecay,
        Scenario::LinregRandcov => Covariance::RandCov,
        Scenario::Ridge => config.covariance,
        _ => Covariance::Independent,
    }
}

/// Linear β: thirds equal to 0, 2 and −1 (the last block takes the remainder).
pub fn linear_beta(p: usize) -> Vec<f64> {
    let third = p / 3;
    (0..p)
        .map(|i| {
            if i < third {
                0.0
            } else if i < 2 * third {
                2.0
            } else {
                -1.0
            }
        })
        .collect()
}

/// Logistic β: a block of +1 then a block of −1, each round(0.03·p) long
/// (at least 1), then zeros.
pub fn logistic_beta(p: usize) -> Vec<f64> {
    let block = ((0.03 * p as f64).round() as usize).max(1);
    (0..p)
        .map(|i| {
            if i < block {
                1.0
            } else if i < 2 * block {
                -1.0
            } else {
                0.0
            }
        })
        .collect()
}

fn mixing_matrix_t(p: usize, master_seed: u64) -> DMatrix<f64> {
    let mut rng = SeedSpec::new(master_seed, 0, 0, 0).stream(StreamDomain::Auxiliary);
    // Row-major A, stored transposed so that X = Z·Aᵀ.
    let a = DMatrix::from_row_iterator(p, p, (0..p * p).map(|_| rng.unit()));
    a.transpose()
}

impl Prepared {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let (n, p) = (config.n, config.p);
        let covariance = covariance_of(config);
        let mix_t =
            (covariance == Covariance::RandCov).then(|| mixing_matrix_t(p, config.master_seed));
        let (kind, truth_full) = match config.scenario {
            Scenario::Ellipsoidal => (EstimatorKind::QuadNorm, vec![0.0004 * p as f64]),
            Scenario::Sinusoidal => (EstimatorKind::SinusoidSum, vec![0.0]),
            Scenario::LinregIndep | Scenario::LinregExpdecay | Scenario::LinregRandcov => {
                (EstimatorKind::Ols, linear_beta(p))
            }
            Scenario::Ridge => (
                EstimatorKind::Ridge {
                    lambda: config.lambda,
                },
                linear_beta(p),
            ),
            Scenario::LogregIndep | Scenario::LogregExpdecay => {
                (EstimatorKind::Logistic { l2: 0.0 }, logistic_beta(p))
            }
            Scenario::LogregL2 => (EstimatorKind::Logistic { l2: config.l2 }, logistic_beta(p)),
            Scenario::Netsim => {
                let truth = config.truth.ok_or_else(|| {
                    HarnessError::Config("netsim scenario needs an external `truth`".into())
                })?;
                // The estimator is not a sample functional; the kind is a placeholder.
                (EstimatorKind::QuadNorm, vec![truth])
            }
        };
        let mut estimator = EstimatorSpec::new(kind);
        if let Some(coords) = &config.target_coords {
            estimator = estimator.with_targets(coords.clone());
        }
        let network = match config.scenario {
            Scenario::Netsim => Some(config.network.resolve()?),
            _ => None,
        };
        let source_sizes = config
            .source_sizes
            .clone()
            .unwrap_or_else(|| vec![n; SOURCES]);
        Ok(Self {
            scenario: config.scenario,
            n,
            p,
            master_seed: config.master_seed,
            rep_offset: config.rep_offset,
            noise_sd: config.noise_sd,
            covariance,
            mix_t,
            truth_full,
            estimator,
            network,
            source_sizes,
        })
    }

    /// Truth restricted to the target coordinates.
    pub fn truth(&self) -> Vec<f64> {
        match (&self.estimator.target_coords, self.scenario) {
            (Some(coords), s) if s != Scenario::Netsim => {
                coords.iter().map(|&i| self.truth_full[i]).collect()
            }
            _ => self.truth_full.clone(),
        }
    }

    /// Seed of repetition `rep`; resample `b` of that repetition uses `with_resample(b)`.
    pub fn rep_seed(&self, rep: u64) -> SeedSpec {
        SeedSpec::new(self.master_seed, self.rep_offset + rep, 0, 0)
    }

    pub fn generate(&self, rep: u64) -> Result<ScenarioData> {
        let seed = self.rep_seed(rep);
        if self.scenario == Scenario::Netsim {
            let network = self
                .network
                .as_ref()
                .expect("netsim scenario carries a network");
            return Ok(ScenarioData::Sources(generate_input_data(
                network,
                &self.source_sizes,
                seed,
            )?));
        }
        let mut xrng = seed.with_source(0).stream(StreamDomain::DataGeneration);
        let mut x = self.covariates(&mut xrng);
        match self.scenario {
            Scenario::Ellipsoidal => x.iter_mut().for_each(|v| *v += 0.02),
            Scenario::Sinusoidal => {}
            _ => {
                let mut yrng = seed.with_source(1).stream(StreamDomain::DataGeneration);
                let beta = &self.truth_full;
                let y: Vec<f64> = x
                    .chunks_exact(self.p)
                    .map(|row| {
                        let eta: f64 = row.iter().zip(beta).map(|(a, b)| a * b).sum();
                        if self.scenario.is_logistic() {
                            let prob = 1.0 / (1.0 + (-eta).exp());
                            if yrng.unit() < prob {
                                1.0
                            } else {
                                0.0
                            }
                        } else {
                            debug_assert!(self.scenario.is_linear());
                            let e: f64 = yrng.sample(StandardNormal);
                            eta + self.noise_sd * e
                        }
                    })
                    .collect();
                let sample = EmpiricalSample::new(x, self.n, self.p)?.with_response(y)?;
                return Ok(ScenarioData::Sample(sample));
            }
        }
        Ok(ScenarioData::Sample(EmpiricalSample::new(
            x, self.n, self.p,
        )?))
    }

    /// Row-major n×p draws from N(0, 0.01·Σ).
    fn covariates(&self, rng: &mut StreamRng) -> Vec<f64> {
        let (n, p) = (self.n, self.p);
        let mut z: Vec<f64> = (0..n * p)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        match self.covariance {
            Covariance::Independent => z.iter_mut().for_each(|v| *v *= 0.1),
            Covariance::ExpDecay => {
                let rho: f64 = 0.8;
                let innov = (1.0 - rho * rho).sqrt();
                for row in z.chunks_exact_mut(p) {
                    let mut prev = row[0];
                    row[0] *= 0.1;
                    for v in row.iter_mut().skip(1) {
                        prev = rho * prev + innov * *v;
                        *v = 0.1 * prev;
                    }
                }
            }
            Covariance::RandCov => {
                let zm = DMatrix::from_row_slice(n, p, &z);
                let x = zm * self.mix_t.as_ref().expect("mixing matrix prepared");
                for (i, row) in z.chunks_exact_mut(p).enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = 0.1 * x[(i, j)];
                    }
                }
            }
        }
        z
    }
}

/// Data set and target truth for repetition `rep` of `config`.
pub fn generate_scenario(config: &ExperimentConfig, rep: u64) -> Result<(ScenarioData, Vec<f64>)> {
    let prepared = Prepared::new(config)?;
    Ok((prepared.generate(rep)?, prepared.truth()))
}
