//! Finite-sample coverage-error bounds for the cheap bootstrap and for the
//! quantile-based (basic and percentile) bootstrap, evaluated from
//! caller-supplied problem constants.
//!
//! `C` and `C1` are unspecified universal constants; they default to 1 and
//! the results are meant for comparing rates and shapes, not for certifying
//! coverage. `log` is the natural logarithm.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::{self, StatsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("missing input {0}")]
    Missing(&'static str),
    #[error("input {name} = {value} violates {rule}")]
    Domain {
        name: &'static str,
        value: f64,
        rule: &'static str,
    },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

pub type Result<T> = std::result::Result<T, BoundError>;

/// Which interval a bound applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Cheap,
    /// Basic and percentile share one bound.
    Quantile,
}

/// Inputs of the abstract bounds: `E1` controls the estimator's normal
/// approximation, `E2` the resample one, `beta` the probability that the
/// latter fails; the optional `E3`, `E4`, `sigma` feed the large-`B` branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericBoundInputs {
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
    pub beta: f64,
    #[serde(rename = "B", default = "one_u64")]
    pub b: u64,
    #[serde(rename = "E3", default, skip_serializing_if = "Option::is_none")]
    pub e3: Option<f64>,
    #[serde(rename = "E4", default, skip_serializing_if = "Option::is_none")]
    pub e4: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn one_u64() -> u64 {
    1
}

fn one() -> f64 {
    1.0
}

fn default_alpha() -> f64 {
    0.05
}

impl GenericBoundInputs {
    pub fn new(e1: f64, e2: f64, beta: f64, b: u64) -> Self {
        Self {
            e1,
            e2,
            beta,
            b,
            e3: None,
            e4: None,
            sigma: None,
            alpha: 0.05,
        }
    }

    pub fn with_alternative(mut self, e3: f64, e4: f64, sigma: f64) -> Self {
        self.e3 = Some(e3);
        self.e4 = Some(e4);
        self.sigma = Some(sigma);
        self
    }

    fn validate(&self) -> Result<()> {
        nonneg("E1", self.e1)?;
        nonneg("E2", self.e2)?;
        nonneg("beta", self.beta)?;
        if self.b == 0 {
            return Err(BoundError::Domain {
                name: "B",
                value: 0.0,
                rule: "B >= 1",
            });
        }
        Ok(())
    }
}

/// Problem constants of the model-specific bounds. Fields a given bound does
/// not use may be left out.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelBoundInputs {
    pub n: u64,
    pub p: u64,
    #[serde(rename = "B")]
    pub b: u64,
    /// Sub-Gaussian scale of `X`.
    pub tau: Option<f64>,
    /// Hessian bound of `g`.
    #[serde(rename = "C_Hg")]
    pub c_hg: Option<f64>,
    /// Gradient lower-bound constant: `||∇g(μ)|| > C_gradg·sqrt(p)`.
    #[serde(rename = "C_gradg")]
    pub c_gradg: Option<f64>,
    /// Smallest eigenvalue of the covariance.
    #[serde(rename = "lambda_Sigma")]
    pub lambda_sigma: Option<f64>,
    pub sigma: Option<f64>,
    /// `E|∇g(μ)ᵀ(X−μ)|³`.
    pub m31: Option<f64>,
    /// `E||X−μ||³`.
    pub m32: Option<f64>,
    #[serde(rename = "trace_Sigma")]
    pub trace_sigma: Option<f64>,
    /// Operator norm of the third-moment tensor `E[(X−μ)³]`.
    pub third_moment_norm: Option<f64>,
    /// `||g1ᵀ(X−μ)||_ψ1`.
    pub orlicz_psi1: Option<f64>,
    /// `E|g1ᵀ(X−μ)|³`.
    pub third_abs_moment: Option<f64>,
    pub q: Option<f64>,
    /// `E[|g1ᵀ(X−μ)/σ|^q]^{1/q}`.
    #[serde(rename = "Lq_norm")]
    pub lq_norm: Option<f64>,
    /// `E|g1ᵀ(X−μ)/σ|⁴`.
    #[serde(rename = "L4_moment")]
    pub l4_moment: Option<f64>,
    #[serde(rename = "C", default = "one")]
    pub c: f64,
    #[serde(rename = "C1", default = "one")]
    pub c1: f64,
}

impl ModelBoundInputs {
    pub fn new(n: u64, p: u64, b: u64) -> Self {
        Self {
            n,
            p,
            b,
            c: 1.0,
            c1: 1.0,
            ..Self::default()
        }
    }
}

fn nonneg(name: &'static str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(BoundError::Domain {
            name,
            value: v,
            rule: "finite and >= 0",
        })
    }
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(BoundError::Domain {
            name,
            value: v,
            rule: "finite and > 0",
        })
    }
}

fn req(name: &'static str, v: Option<f64>) -> Result<f64> {
    v.ok_or(BoundError::Missing(name))
}

/// One summand of a bound. `b_scaled` terms already include the factor `B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTerm {
    pub name: &'static str,
    pub value: f64,
    pub b_scaled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundBreakdown {
    pub terms: Vec<BoundTerm>,
    pub total: f64,
}

impl BoundBreakdown {
    fn from_terms(terms: Vec<BoundTerm>) -> Self {
        let total = terms.iter().map(|t| t.value).sum();
        Self { terms, total }
    }

    /// Sum of the terms proportional to `B`.
    pub fn b_portion(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.b_scaled)
            .map(|t| t.value)
            .sum()
    }
}

fn term(name: &'static str, value: f64, b_scaled: bool) -> BoundTerm {
    BoundTerm {
        name,
        value,
        b_scaled,
    }
}

/// Cheap bootstrap: `2·E1 + 2·B·E2 + β`.
pub fn bound_cheap_generic(inp: &GenericBoundInputs) -> Result<f64> {
    inp.validate()?;
    Ok(2.0 * inp.e1 + 2.0 * inp.b as f64 * inp.e2 + inp.beta)
}

/// Basic or percentile bootstrap: `2·E1 + 2·E2 + 2·β`.
pub fn bound_quantile_generic(inp: &GenericBoundInputs) -> Result<f64> {
    inp.validate()?;
    Ok(2.0 * inp.e1 + 2.0 * inp.e2 + 2.0 * inp.beta)
}

/// Large-`B` alternative for the cheap bootstrap: the minimum of
/// [`bound_cheap_generic`] and
/// `2E1 + 2E4 + sqrt(2/π)|t − z| + sqrt(2/π)(E3/σ)·t`.
pub fn bound_cheap_alternative(inp: &GenericBoundInputs) -> Result<f64> {
    let first = bound_cheap_generic(inp)?;
    let e3 = nonneg("E3", req("E3", inp.e3)?)?;
    let e4 = nonneg("E4", req("E4", inp.e4)?)?;
    let sigma = positive("sigma", req("sigma", inp.sigma)?)?;
    if sigma - e3 <= 0.0 {
        return Err(BoundError::Domain {
            name: "sigma",
            value: sigma,
            rule: "sigma > E3",
        });
    }
    if !(inp.alpha > 0.0 && inp.alpha < 1.0) {
        return Err(BoundError::Domain {
            name: "alpha",
            value: inp.alpha,
            rule: "0 < alpha < 1",
        });
    }
    let t = stats::t_quantile(inp.b, 1.0 - inp.alpha / 2.0)?;
    let z = stats::normal_quantile(1.0 - inp.alpha / 2.0)?;
    let k = (2.0 / PI).sqrt();
    let second = 2.0 * inp.e1 + 2.0 * e4 + k * (t - z).abs() + k * (e3 / sigma) * t;
    Ok(first.min(second))
}

fn common(inp: &ModelBoundInputs) -> Result<(f64, f64)> {
    if inp.n < 3 {
        return Err(BoundError::Domain {
            name: "n",
            value: inp.n as f64,
            rule: "n >= 3",
        });
    }
    if inp.b == 0 {
        return Err(BoundError::Domain {
            name: "B",
            value: 0.0,
            rule: "B >= 1",
        });
    }
    nonneg("C", inp.c)?;
    nonneg("C1", inp.c1)?;
    Ok((inp.n as f64, inp.b as f64))
}

/// Function-of-mean model under sub-Gaussian data.
pub fn bound_function_of_mean(
    inp: &ModelBoundInputs,
    method: BoundMethod,
) -> Result<BoundBreakdown> {
    let (n, b) = common(inp)?;
    if inp.p == 0 {
        return Err(BoundError::Domain {
            name: "p",
            value: 0.0,
            rule: "p >= 1",
        });
    }
    let p = inp.p as f64;
    let tau = positive("tau", req("tau", inp.tau)?)?;
    let chg = nonneg("C_Hg", req("C_Hg", inp.c_hg)?)?;
    let cgrad = positive("C_gradg", req("C_gradg", inp.c_gradg)?)?;
    let lam = positive("lambda_Sigma", req("lambda_Sigma", inp.lambda_sigma)?)?;
    let sigma = positive("sigma", req("sigma", inp.sigma)?)?;
    let m31 = nonneg("m31", req("m31", inp.m31)?)?;
    let m32 = nonneg("m32", req("m32", inp.m32)?)?;
    let tr = nonneg("trace_Sigma", req("trace_Sigma", inp.trace_sigma)?)?;
    let t3 = nonneg(
        "third_moment_norm",
        req("third_moment_norm", inp.third_moment_norm)?,
    )?;

    let (scale, lead) = match method {
        BoundMethod::Cheap => (b, 6.0),
        BoundMethod::Quantile => (1.0, 12.0),
    };
    let cheap = method == BoundMethod::Cheap;
    let sn = n.sqrt();
    let ln = n.ln();
    let r = 1.0 + ln / p;
    let c = inp.c * scale;
    let c1 = inp.c1 * scale;

    let terms = vec![
        term("lead_1/n", lead / n, false),
        term("m31", c * m31 / (sn * sigma.powi(3)), cheap),
        term(
            "hessian_trace",
            c * chg * m31.cbrt() * tr / (sn * sigma * sigma),
            cheap,
        ),
        term(
            "hessian_m32",
            c * chg * m32.powf(2.0 / 3.0) / (n.powf(5.0 / 6.0) * sigma),
            cheap,
        ),
        term(
            "hessian_m31_m32",
            c * chg * m31.cbrt() * m32.powf(2.0 / 3.0) / (n * sigma * sigma),
            cheap,
        ),
        term(
            "gradient",
            c * chg * tau * tau / (cgrad * lam.sqrt()) * r * (p / n).sqrt(),
            cheap,
        ),
        term("third_moment_tensor", c * t3 / lam.powf(1.5) / sn, cheap),
        term(
            "tau3",
            c * tau.powi(3) / lam.powf(1.5) * r.powf(1.5) / sn,
            cheap,
        ),
        term(
            "tau4_sqrt_p",
            c * tau.powi(4) * p.sqrt() / (lam * lam * n) * r.sqrt(),
            cheap,
        ),
        term(
            "tau2_sqrt_p",
            c * tau * tau * p.sqrt() / (lam * n) * r.sqrt(),
            cheap,
        ),
        term(
            "tau3_sqrt_p",
            c * tau.powi(3) * p.sqrt() / (lam.powf(1.5) * n) * r,
            cheap,
        ),
        term(
            "tau4_log",
            c1 * tau.powi(4) * ln.powf(1.5) / (lam * lam * sn),
            cheap,
        ),
        term(
            "tau2_log",
            c1 * tau * tau * ln.powf(1.5) / (lam * sn),
            cheap,
        ),
        term(
            "tau3_log",
            c1 * tau.powi(3) / (lam.powf(1.5) * sn) * r.sqrt() * (ln + p.ln()) * ln.sqrt(),
            cheap,
        ),
    ];
    Ok(BoundBreakdown::from_terms(terms))
}

/// Linear functional with sub-exponential `g1ᵀ(X−μ)`.
pub fn bound_linear_subexp(inp: &ModelBoundInputs, method: BoundMethod) -> Result<BoundBreakdown> {
    let (n, b) = common(inp)?;
    let sigma = positive("sigma", req("sigma", inp.sigma)?)?;
    let m3 = nonneg(
        "third_abs_moment",
        req("third_abs_moment", inp.third_abs_moment)?,
    )?;
    let omega = nonneg("orlicz_psi1", req("orlicz_psi1", inp.orlicz_psi1)?)?;
    let c = inp.c;
    let sn = n.sqrt();
    let berry = m3 / (sigma.powi(3) * sn);
    let subexp = omega.powi(4) * n.ln().powi(11) / (sigma.powi(4) * sn);
    let terms = match method {
        BoundMethod::Cheap => vec![
            term("lead_C/n", c / n, false),
            term("third_moment", b * c * berry, true),
            term("orlicz", b * c * subexp, true),
        ],
        BoundMethod::Quantile => vec![
            term("lead_C/n", c / n, false),
            term("third_moment", c * berry, false),
            term("orlicz", c * subexp, false),
            term("third_moment_normal", c * berry, false),
        ],
    };
    Ok(BoundBreakdown::from_terms(terms))
}

/// Linear functional with a finite `q`-th moment, `q ≥ 4`.
pub fn bound_linear_moment(inp: &ModelBoundInputs, method: BoundMethod) -> Result<BoundBreakdown> {
    let (n, b) = common(inp)?;
    let q = req("q", inp.q)?;
    if !(q >= 4.0) {
        return Err(BoundError::Domain {
            name: "q",
            value: q,
            rule: "q >= 4",
        });
    }
    let sigma = positive("sigma", req("sigma", inp.sigma)?)?;
    let m3 = nonneg(
        "third_abs_moment",
        req("third_abs_moment", inp.third_abs_moment)?,
    )?;
    let lq = nonneg("Lq_norm", req("Lq_norm", inp.lq_norm)?)?;
    let l4 = nonneg("L4_moment", req("L4_moment", inp.l4_moment)?)?;
    let moment = lq.max(l4.sqrt());
    let sn = n.sqrt();
    let ln = n.ln();
    let tail = ln.sqrt() / n.powf(0.5 - 1.5 / q);
    let berry = inp.c * m3 / (sigma.powi(3) * sn);
    let terms = match method {
        BoundMethod::Cheap => vec![
            term("moment", b * inp.c1 * tail * moment, true),
            term("third_moment", berry, false),
        ],
        BoundMethod::Quantile => vec![
            term("lead_2/sqrt(n)", 2.0 / sn, false),
            term("moment_log", inp.c1 * moment * ln.powf(1.5) / sn, false),
            term("moment", inp.c1 * moment * tail, false),
            term("third_moment", berry, false),
        ],
    };
    Ok(BoundBreakdown::from_terms(terms))
}

/// Selector for the bound calculators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// Generic cheap bound.
    Thm1,
    /// Generic quantile bound.
    Thm2,
    /// Function of the mean, cheap.
    Thm3,
    /// Sub-exponential linear, cheap.
    Thm4,
    /// Moment-bounded linear, cheap.
    Thm5,
    /// Generic cheap bound, large-`B` alternative.
    Thm6,
    /// Function of the mean, quantile.
    Thm7,
    /// Sub-exponential linear, quantile.
    Thm8,
    /// Moment-bounded linear, quantile.
    Thm9,
}

impl Theorem {
    pub fn is_generic(self) -> bool {
        matches!(self, Theorem::Thm1 | Theorem::Thm2 | Theorem::Thm6)
    }
}

impl FromStr for Theorem {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "thm1" => Theorem::Thm1,
            "thm2" => Theorem::Thm2,
            "thm3" => Theorem::Thm3,
            "thm4" => Theorem::Thm4,
            "thm5" => Theorem::Thm5,
            "thm6" => Theorem::Thm6,
            "thm7" => Theorem::Thm7,
            "thm8" => Theorem::Thm8,
            "thm9" => Theorem::Thm9,
            other => return Err(format!("unknown bound selector '{other}' (thm1..thm9)")),
        })
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit enum serializes");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

/// Evaluates a model-specific bound.
pub fn evaluate_model(theorem: Theorem, inp: &ModelBoundInputs) -> Result<BoundBreakdown> {
    use BoundMethod::{Cheap, Quantile};
    match theorem {
        Theorem::Thm3 => bound_function_of_mean(inp, Cheap),
        Theorem::Thm7 => bound_function_of_mean(inp, Quantile),
        Theorem::Thm4 => bound_linear_subexp(inp, Cheap),
        Theorem::Thm8 => bound_linear_subexp(inp, Quantile),
        Theorem::Thm5 => bound_linear_moment(inp, Cheap),
        Theorem::Thm9 => bound_linear_moment(inp, Quantile),
        _ => panic!("{theorem} takes generic inputs"),
    }
}

/// Evaluates a generic bound.
pub fn evaluate_generic(theorem: Theorem, inp: &GenericBoundInputs) -> Result<f64> {
    match theorem {
        Theorem::Thm1 => bound_cheap_generic(inp),
        Theorem::Thm2 => bound_quantile_generic(inp),
        Theorem::Thm6 => bound_cheap_alternative(inp),
        _ => panic!("{theorem} takes model inputs"),
    }
}
