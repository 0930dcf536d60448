//! Plug-in estimators: functions of the mean, OLS, ridge and logistic
//! regression behind one [`Estimator`] interface.

mod linear;
mod logistic;

pub use linear::{fit_ols, fit_ridge};
pub use logistic::{fit_logistic, logistic_objective, LogisticOptions};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::resampling::EmpiricalSample;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("estimator needs a response column")]
    MissingResponse,
    #[error("design matrix is rank deficient at column {column}")]
    RankDeficient { column: usize },
    #[error("need at least as many rows as columns (n = {n}, p = {p})")]
    Underdetermined { n: usize, p: usize },
    #[error("response at row {row} is {value}, expected 0 or 1")]
    NonBinaryResponse { row: usize, value: f64 },
    #[error("logistic fit diverged (|beta| = {norm:.3e}); data look separable")]
    Separation { norm: f64 },
    #[error("parameter {name} = {value} out of range")]
    Parameter { name: &'static str, value: f64 },
    #[error("linear solve failed: {0}")]
    Solve(&'static str),
    #[error("target coordinate {index} out of range (dimension {dim})")]
    TargetCoordinate { index: usize, dim: usize },
    #[error("{0}")]
    Custom(String),
}

pub type Result<T> = std::result::Result<T, EstimatorError>;

/// Outcome of an iterative or direct fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub estimate: Vec<f64>,
    pub iterations: usize,
    /// Optimality residual: gradient norm for logistic, normal-equation
    /// residual (∞-norm) for least squares.
    pub grad_norm: f64,
    pub tolerance: f64,
    pub converged: bool,
}

/// A functional mapping an empirical sample to a vector of targets.
pub trait Estimator: Send + Sync {
    fn evaluate(&self, sample: &EmpiricalSample) -> Result<Vec<f64>>;

    /// Estimate on the resample `sample.gather(indices)`. Implementations may
    /// avoid materializing the rows but must agree with the gathered result.
    fn evaluate_at(&self, sample: &EmpiricalSample, indices: &[usize]) -> Result<Vec<f64>> {
        self.evaluate(&sample.gather(indices))
    }
}

/// Closure-backed estimator for user-defined functionals.
pub struct CustomEstimator<F>(pub F);

impl<F> Estimator for CustomEstimator<F>
where
    F: Fn(&EmpiricalSample) -> Result<Vec<f64>> + Send + Sync,
{
    fn evaluate(&self, sample: &EmpiricalSample) -> Result<Vec<f64>> {
        (self.0)(sample)
    }
}

/// `||mean||²`.
pub fn eval_quad_norm(sample: &EmpiricalSample) -> f64 {
    quad_norm(&sample.column_means())
}

/// `Σ sin(mean_i)`.
pub fn eval_sinusoid(sample: &EmpiricalSample) -> f64 {
    sinusoid(&sample.column_means())
}

/// `g1 · mean + g2`.
pub fn eval_linear(sample: &EmpiricalSample, g1: &[f64], g2: f64) -> Result<f64> {
    if g1.len() != sample.p() {
        return Err(EstimatorError::Dimension {
            expected: sample.p(),
            got: g1.len(),
        });
    }
    Ok(linear(&sample.column_means(), g1, g2))
}

fn quad_norm(means: &[f64]) -> f64 {
    means.iter().map(|m| m * m).sum()
}

fn sinusoid(means: &[f64]) -> f64 {
    means.iter().map(|m| m.sin()).sum()
}

fn linear(means: &[f64], g1: &[f64], g2: f64) -> f64 {
    means.iter().zip(g1).map(|(m, g)| m * g).sum::<f64>() + g2
}

/// Built-in estimator selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimatorKind {
    QuadNorm,
    SinusoidSum,
    LinearFunctional {
        g1: Vec<f64>,
        g2: f64,
    },
    Ols,
    /// `lambda = 0` falls back to the OLS path.
    Ridge {
        lambda: f64,
    },
    Logistic {
        l2: f64,
    },
}

/// A built-in estimator plus an optional subset of output coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    #[serde(flatten)]
    pub kind: EstimatorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_coords: Option<Vec<usize>>,
}

impl EstimatorSpec {
    pub fn new(kind: EstimatorKind) -> Self {
        Self {
            kind,
            target_coords: None,
        }
    }

    pub fn with_targets(mut self, coords: Vec<usize>) -> Self {
        self.target_coords = Some(coords);
        self
    }

    /// Checks parameter invariants (`lambda ≥ 0`, `l2 ≥ 0`).
    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            EstimatorKind::Ridge { lambda } if !(*lambda >= 0.0) || !lambda.is_finite() => {
                Err(EstimatorError::Parameter {
                    name: "lambda",
                    value: *lambda,
                })
            }
            EstimatorKind::Logistic { l2 } if !(*l2 >= 0.0) || !l2.is_finite() => {
                Err(EstimatorError::Parameter {
                    name: "l2",
                    value: *l2,
                })
            }
            _ => Ok(()),
        }
    }

    pub fn needs_response(&self) -> bool {
        matches!(
            self.kind,
            EstimatorKind::Ols | EstimatorKind::Ridge { .. } | EstimatorKind::Logistic { .. }
        )
    }

    fn eval_means(&self, means: &[f64]) -> Result<Vec<f64>> {
        match &self.kind {
            EstimatorKind::QuadNorm => Ok(vec![quad_norm(means)]),
            EstimatorKind::SinusoidSum => Ok(vec![sinusoid(means)]),
            EstimatorKind::LinearFunctional { g1, g2 } => {
                if g1.len() != means.len() {
                    return Err(EstimatorError::Dimension {
                        expected: means.len(),
                        got: g1.len(),
                    });
                }
                Ok(vec![linear(means, g1, *g2)])
            }
            _ => unreachable!("not a function of the mean"),
        }
    }

    fn is_mean_based(&self) -> bool {
        matches!(
            self.kind,
            EstimatorKind::QuadNorm
                | EstimatorKind::SinusoidSum
                | EstimatorKind::LinearFunctional { .. }
        )
    }

    fn select(&self, full: Vec<f64>) -> Result<Vec<f64>> {
        match &self.target_coords {
            None => Ok(full),
            Some(coords) => coords
                .iter()
                .map(|&i| {
                    full.get(i)
                        .copied()
                        .ok_or(EstimatorError::TargetCoordinate {
                            index: i,
                            dim: full.len(),
                        })
                })
                .collect(),
        }
    }
}

impl Estimator for EstimatorSpec {
    fn evaluate(&self, sample: &EmpiricalSample) -> Result<Vec<f64>> {
        let full = match &self.kind {
            _ if self.is_mean_based() => self.eval_means(&sample.column_means())?,
            EstimatorKind::Ols => fit_ols(sample)?.estimate,
            EstimatorKind::Ridge { lambda } if *lambda == 0.0 => fit_ols(sample)?.estimate,
            EstimatorKind::Ridge { lambda } => fit_ridge(sample, *lambda)?.estimate,
            EstimatorKind::Logistic { l2 } => fit_logistic(sample, *l2)?.estimate,
            _ => unreachable!(),
        };
        self.select(full)
    }

    fn evaluate_at(&self, sample: &EmpiricalSample, indices: &[usize]) -> Result<Vec<f64>> {
        if self.is_mean_based() {
            self.select(self.eval_means(&sample.column_means_at(indices))?)
        } else {
            self.evaluate(&sample.gather(indices))
        }
    }
}

impl<E: Estimator + ?Sized> Estimator for Box<E> {
    fn evaluate(&self, sample: &EmpiricalSample) -> Result<Vec<f64>> {
        (**self).evaluate(sample)
    }

    fn evaluate_at(&self, sample: &EmpiricalSample, indices: &[usize]) -> Result<Vec<f64>> {
        (**self).evaluate_at(sample, indices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resampling::{draw_indices, resample, SeedSpec};
    use std::f64::consts::PI;

    fn rows(r: &[&[f64]]) -> EmpiricalSample {
        EmpiricalSample::from_rows(&r.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn quad_norm_examples() {
        assert_eq!(eval_quad_norm(&rows(&[&[3.0, 4.0], &[3.0, 4.0]])), 25.0);
        assert_eq!(eval_quad_norm(&rows(&[&[1.0, -2.0], &[-1.0, 2.0]])), 0.0);
        assert_eq!(eval_quad_norm(&rows(&[&[0.0, 0.0], &[2.0, 0.0]])), 1.0);
    }

    #[test]
    fn sinusoid_examples() {
        assert_eq!(eval_sinusoid(&rows(&[&[0.5], &[-0.5]])), 0.0);
        assert!((eval_sinusoid(&rows(&[&[PI / 2.0]])) - 1.0).abs() < 1e-15);
        assert!((eval_sinusoid(&rows(&[&[PI / 6.0, PI / 6.0]])) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn linear_examples() {
        let s = rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(eval_linear(&s, &[0.0, 0.0], 7.0).unwrap(), 7.0);
        assert_eq!(eval_linear(&s, &[1.0, 0.0], 0.0).unwrap(), 2.0);
        assert_eq!(eval_linear(&s, &[1.0, 1.0], 1.0).unwrap(), 6.0);
        assert!(matches!(
            eval_linear(&s, &[1.0], 0.0),
            Err(EstimatorError::Dimension {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn mean_estimators_ignore_row_order() {
        let a = rows(&[&[0.1, 0.2], &[0.3, -0.4], &[0.5, 0.9]]);
        let b = rows(&[&[0.5, 0.9], &[0.1, 0.2], &[0.3, -0.4]]);
        assert!((eval_quad_norm(&a) - eval_quad_norm(&b)).abs() < 1e-15);
        assert!((eval_sinusoid(&a) - eval_sinusoid(&b)).abs() < 1e-15);
    }

    #[test]
    fn indexed_path_matches_gather() {
        let s = EmpiricalSample::from_rows(
            &(0..25)
                .map(|i| {
                    vec![
                        (i as f64 * 0.37).sin(),
                        (i as f64 * 1.3).cos(),
                        i as f64 / 7.0,
                    ]
                })
                .collect::<Vec<_>>(),
        )
        .unwrap()
        .with_response((0..25).map(|i| (i as f64 * 0.11).exp()).collect())
        .unwrap();
        let specs = [
            EstimatorSpec::new(EstimatorKind::QuadNorm),
            EstimatorSpec::new(EstimatorKind::SinusoidSum),
            EstimatorSpec::new(EstimatorKind::LinearFunctional {
                g1: vec![1.0, -2.0, 0.5],
                g2: 3.0,
            }),
            EstimatorSpec::new(EstimatorKind::Ols).with_targets(vec![2, 0]),
            EstimatorSpec::new(EstimatorKind::Ridge { lambda: 0.7 }),
        ];
        let seed = SeedSpec::new(11, 0, 1, 0);
        let idx = draw_indices(s.n(), seed);
        let gathered = resample(&s, seed);
        for spec in &specs {
            assert_eq!(
                spec.evaluate_at(&s, &idx).unwrap(),
                spec.evaluate(&gathered).unwrap()
            );
        }
    }

    #[test]
    fn spec_validation_and_targets() {
        assert!(EstimatorSpec::new(EstimatorKind::Ridge { lambda: -1.0 })
            .validate()
            .is_err());
        assert!(EstimatorSpec::new(EstimatorKind::Logistic { l2: f64::NAN })
            .validate()
            .is_err());
        assert!(EstimatorSpec::new(EstimatorKind::Ridge { lambda: 0.0 })
            .validate()
            .is_ok());
        let s = rows(&[&[1.0], &[2.0]]);
        let spec = EstimatorSpec::new(EstimatorKind::QuadNorm).with_targets(vec![3]);
        assert!(matches!(
            spec.evaluate(&s),
            Err(EstimatorError::TargetCoordinate { index: 3, dim: 1 })
        ));
        assert!(matches!(
            EstimatorSpec::new(EstimatorKind::Ols).evaluate(&s),
            Err(EstimatorError::MissingResponse)
        ));
    }

    #[test]
    fn spec_json_shape() {
        let spec: EstimatorSpec =
            serde_json::from_str(r#"{"kind":"ridge","lambda":2.5,"target_coords":[0,1]}"#).unwrap();
        assert_eq!(spec.kind, EstimatorKind::Ridge { lambda: 2.5 });
        assert_eq!(spec.target_coords, Some(vec![0, 1]));
        let spec: EstimatorSpec = serde_json::from_str(r#"{"kind":"sinusoid_sum"}"#).unwrap();
        assert_eq!(spec.kind, EstimatorKind::SinusoidSum);
    }

    #[test]
    fn custom_estimator() {
        let median = CustomEstimator(|s: &EmpiricalSample| {
            let mut v: Vec<f64> = s.rows().map(|r| r[0]).collect();
            v.sort_by(f64::total_cmp);
            Ok(vec![v[v.len() / 2]])
        });
        assert_eq!(
            median.evaluate(&rows(&[&[3.0], &[1.0], &[2.0]])).unwrap(),
            vec![2.0]
        );
    }
}
