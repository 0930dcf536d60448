//! Confidence intervals from a point estimate and `B` resample estimates:
//! the cheap bootstrap and the basic, percentile and standard-error baselines.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimators::{Estimator, EstimatorError};
use crate::resampling::{draw_indices, EmpiricalSample, SeedSpec};
use crate::stats::{self, Ecdf, StatsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BootstrapError {
    #[error("{method} interval needs at least 2 replicates, got {b}")]
    InsufficientReplicates { method: Method, b: usize },
    #[error("replicate set has no replicates")]
    NoReplicates,
    #[error("replicate {index} has length {got}, expected {expected}")]
    Dimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("non-finite value in replicate set")]
    NonFinite,
    #[error("alpha must lie in (0, 1), got {0}")]
    Alpha(f64),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
}

pub type Result<T> = std::result::Result<T, BootstrapError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cheap,
    Basic,
    Percentile,
    StdError,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Cheap,
        Method::Basic,
        Method::Percentile,
        Method::StdError,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Cheap => "cheap",
            Method::Basic => "basic",
            Method::Percentile => "percentile",
            Method::StdError => "std_error",
        }
    }

    /// Smallest number of replicates the method accepts.
    pub fn min_replicates(self) -> usize {
        match self {
            Method::Cheap => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "cheap" => Ok(Method::Cheap),
            "basic" => Ok(Method::Basic),
            "percentile" => Ok(Method::Percentile),
            "std_error" | "se" => Ok(Method::StdError),
            other => Err(format!(
                "unknown method '{other}' (expected cheap, basic, percentile or std_error)"
            )),
        }
    }
}

/// Point estimate `ψ̂` and replicates `ψ̂*1..ψ̂*B`, each a vector over `d`
/// target coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateSet {
    point: Vec<f64>,
    replicates: Vec<Vec<f64>>,
    n: usize,
}

impl ReplicateSet {
    pub fn new(point: Vec<f64>, replicates: Vec<Vec<f64>>, n: usize) -> Result<Self> {
        if replicates.is_empty() {
            return Err(BootstrapError::NoReplicates);
        }
        let d = point.len();
        for (index, r) in replicates.iter().enumerate() {
            if r.len() != d {
                return Err(BootstrapError::Dimension {
                    index,
                    expected: d,
                    got: r.len(),
                });
            }
        }
        if point
            .iter()
            .chain(replicates.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return Err(BootstrapError::NonFinite);
        }
        Ok(Self {
            point,
            replicates,
            n,
        })
    }

    /// Scalar-target convenience constructor.
    pub fn scalar(point: f64, replicates: &[f64], n: usize) -> Result<Self> {
        Self::new(
            vec![point],
            replicates.iter().map(|&r| vec![r]).collect(),
            n,
        )
    }

    pub fn b(&self) -> usize {
        self.replicates.len()
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn replicates(&self) -> &[Vec<f64>] {
        &self.replicates
    }

    /// The first `b` replicates.
    pub fn prefix(&self, b: usize) -> ReplicateSet {
        assert!(
            b >= 1 && b <= self.b(),
            "prefix length {b} out of 1..={}",
            self.b()
        );
        ReplicateSet {
            point: self.point.clone(),
            replicates: self.replicates[..b].to_vec(),
            n: self.n,
        }
    }

    /// Replicates of coordinate `j`.
    pub fn coordinate(&self, j: usize) -> Vec<f64> {
        self.replicates.iter().map(|r| r[j]).collect()
    }

    /// `S = sqrt((1/B) Σ (ψ̂*b − ψ̂)²)` per coordinate.
    pub fn rms_deviation(&self) -> Vec<f64> {
        let b = self.b() as f64;
        (0..self.dim())
            .map(|j| {
                let c = self.point[j];
                (self
                    .replicates
                    .iter()
                    .map(|r| (r[j] - c).powi(2))
                    .sum::<f64>()
                    / b)
                    .sqrt()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub degenerate: bool,
}

impl Interval {
    fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            degenerate: lo == hi,
        }
    }

    fn point(c: f64) -> Self {
        Self {
            lo: c,
            hi: c,
            degenerate: true,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Closed-interval membership.
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Per-coordinate intervals produced by one method at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    pub method: Method,
    pub level: f64,
    pub intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn lo(&self) -> Vec<f64> {
        self.intervals.iter().map(|i| i.lo).collect()
    }

    pub fn hi(&self) -> Vec<f64> {
        self.intervals.iter().map(|i| i.hi).collect()
    }

    pub fn degenerate_flags(&self) -> Vec<bool> {
        self.intervals.iter().map(|i| i.degenerate).collect()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(BootstrapError::Alpha(alpha))
    }
}

fn require(method: Method, r: &ReplicateSet) -> Result<()> {
    if r.b() < method.min_replicates() {
        return Err(BootstrapError::InsufficientReplicates { method, b: r.b() });
    }
    Ok(())
}

/// `ψ̂ ± t_{B,1−α/2}·S`. Valid for any `B ≥ 1`; `S = 0` yields a flagged point.
pub fn cheap_interval(r: &ReplicateSet, alpha: f64) -> Result<IntervalSet> {
    check_alpha(alpha)?;
    let t = stats::t_quantile(r.b() as u64, 1.0 - alpha / 2.0)?;
    let intervals = r
        .point
        .iter()
        .zip(r.rms_deviation())
        .map(|(&c, s)| {
            if s == 0.0 {
                Interval::point(c)
            } else {
                Interval::new(c - t * s, c + t * s)
            }
        })
        .collect();
    Ok(IntervalSet {
        method: Method::Cheap,
        level: 1.0 - alpha,
        intervals,
    })
}

/// `[ψ̂ − q_{1−α/2}, ψ̂ − q_{α/2}]` with `q` the inf-quantiles of `ψ̂*b − ψ̂`.
pub fn basic_interval(r: &ReplicateSet, alpha: f64) -> Result<IntervalSet> {
    check_alpha(alpha)?;
    require(Method::Basic, r)?;
    let mut intervals = Vec::with_capacity(r.dim());
    for (j, &c) in r.point.iter().enumerate() {
        let diffs = Ecdf::new(r.replicates.iter().map(|x| x[j] - c).collect())?;
        let lo = c - diffs.quantile(1.0 - alpha / 2.0)?;
        let hi = c - diffs.quantile(alpha / 2.0)?;
        intervals.push(Interval::new(lo, hi));
    }
    Ok(IntervalSet {
        method: Method::Basic,
        level: 1.0 - alpha,
        intervals,
    })
}

/// `[q'_{α/2}, q'_{1−α/2}]` with `q'` the inf-quantiles of the replicates.
pub fn percentile_interval(r: &ReplicateSet, alpha: f64) -> Result<IntervalSet> {
    check_alpha(alpha)?;
    require(Method::Percentile, r)?;
    let mut intervals = Vec::with_capacity(r.dim());
    for j in 0..r.dim() {
        let reps = Ecdf::new(r.coordinate(j))?;
        intervals.push(Interval::new(
            reps.quantile(alpha / 2.0)?,
            reps.quantile(1.0 - alpha / 2.0)?,
        ));
    }
    Ok(IntervalSet {
        method: Method::Percentile,
        level: 1.0 - alpha,
        intervals,
    })
}

/// `ψ̂ ± z_{1−α/2}·sd` with the unbiased replicate standard deviation.
pub fn std_error_interval(r: &ReplicateSet, alpha: f64) -> Result<IntervalSet> {
    check_alpha(alpha)?;
    require(Method::StdError, r)?;
    let z = stats::normal_quantile(1.0 - alpha / 2.0)?;
    let mut intervals = Vec::with_capacity(r.dim());
    for (j, &c) in r.point.iter().enumerate() {
        let reps = r.coordinate(j);
        // Constant replicates give sd = 0 exactly, whatever the rounding of the mean.
        let sd = if reps.iter().all(|&v| v == reps[0]) {
            0.0
        } else {
            stats::sample_moments(&reps)?.1
        };
        intervals.push(if sd == 0.0 {
            Interval::point(c)
        } else {
            Interval::new(c - z * sd, c + z * sd)
        });
    }
    Ok(IntervalSet {
        method: Method::StdError,
        level: 1.0 - alpha,
        intervals,
    })
}

pub fn interval(method: Method, r: &ReplicateSet, alpha: f64) -> Result<IntervalSet> {
    match method {
        Method::Cheap => cheap_interval(r, alpha),
        Method::Basic => basic_interval(r, alpha),
        Method::Percentile => percentile_interval(r, alpha),
        Method::StdError => std_error_interval(r, alpha),
    }
}

/// Expected cheap half-width relative to the `B = ∞` normal interval:
/// `t_{B,1−α/2}·sqrt(2/B)·Γ((B+1)/2)/Γ(B/2) / z_{1−α/2}`.
pub fn expected_halfwidth_ratio(b: u64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if b == 0 {
        return Err(StatsError::Domain {
            name: "B",
            value: 0.0,
            domain: "B >= 1",
        }
        .into());
    }
    let bf = b as f64;
    let t = stats::t_quantile(b, 1.0 - alpha / 2.0)?;
    let z = stats::normal_quantile(1.0 - alpha / 2.0)?;
    let chi_mean = (2.0 / bf).sqrt()
        * (stats::log_gamma((bf + 1.0) / 2.0)? - stats::log_gamma(bf / 2.0)?).exp();
    Ok(t * chi_mean / z)
}

/// Point estimate plus `b` resample estimates; resample `k` (1-based) draws
/// its indices from `seed.with_resample(k)`.
pub fn compute_replicates<E: Estimator + ?Sized>(
    estimator: &E,
    sample: &EmpiricalSample,
    b: usize,
    seed: SeedSpec,
) -> Result<ReplicateSet> {
    let point = estimator.evaluate(sample)?;
    let replicates = (1..=b as u64)
        .map(|k| estimator.evaluate_at(sample, &draw_indices(sample.n(), seed.with_resample(k))))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    ReplicateSet::new(point, replicates, sample.n())
}
