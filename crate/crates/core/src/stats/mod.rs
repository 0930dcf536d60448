//! Scalar statistical functions shared by every other module.
//!
//! Distribution quantiles (Student t, standard normal), the inf-definition
//! empirical quantile, sample moments and the special functions behind them.
//! Everything here is a pure function.

mod ecdf;
pub(crate) mod special;

pub use ecdf::{empirical_quantile, Ecdf};

use std::f64::consts::{PI, SQRT_2};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("{name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
}

pub type Result<T> = std::result::Result<T, StatsError>;

fn open_unit(name: &'static str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(StatsError::Domain {
            name,
            value: p,
            domain: "(0, 1)",
        })
    }
}

/// Natural log of the gamma function.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(StatsError::Domain {
            name: "x",
            value: x,
            domain: "(0, inf)",
        });
    }
    Ok(special::ln_gamma_unchecked(x))
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * special::erfc(-x / SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `Φ^{-1}(prob)`: rational starting point refined by one Halley step.
pub fn normal_quantile(prob: f64) -> Result<f64> {
    open_unit("prob", prob)?;
    if prob == 0.5 {
        return Ok(0.0);
    }
    let x = acklam_start(prob);
    // One Halley correction against the accurate CDF; work in whichever tail
    // keeps the residual free of cancellation.
    let e = if prob < 0.5 {
        normal_cdf(x) - prob
    } else {
        (1.0 - prob) - normal_cdf(-x)
    };
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    Ok(x - u / (1.0 + 0.5 * x * u))
}

fn acklam_start(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;
    let tail = |q: f64| {
        let q = (-2.0 * q.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail(p)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail(1.0 - p)
    }
}

fn t_ln_norm(df: f64) -> f64 {
    special::ln_gamma_unchecked(0.5 * (df + 1.0))
        - special::ln_gamma_unchecked(0.5 * df)
        - 0.5 * (df * PI).ln()
}

/// Student t density with `df` degrees of freedom.
pub fn t_pdf(df: f64, t: f64) -> f64 {
    (t_ln_norm(df) - 0.5 * (df + 1.0) * (t * t / df).ln_1p()).exp()
}

/// `P(T > t)` for `t ≥ 0`.
fn t_upper_tail(df: f64, t: f64) -> f64 {
    let t2 = t * t;
    let x = df / (df + t2);
    if x < 0.5 {
        0.5 * special::beta_inc(0.5 * df, 0.5, x)
    } else {
        // 1 - x would lose digits; pass it through the complement directly.
        0.5 * special::beta_inc_complement(0.5, 0.5 * df, t2 / (df + t2))
    }
}

/// Student t CDF. Domain errors are reported for `df < 1`.
pub fn t_cdf(df: u64, t: f64) -> Result<f64> {
    check_df(df)?;
    let df = df as f64;
    Ok(if t >= 0.0 {
        1.0 - t_upper_tail(df, t)
    } else {
        t_upper_tail(df, -t)
    })
}

fn check_df(df: u64) -> Result<()> {
    if df == 0 {
        Err(StatsError::Domain {
            name: "df",
            value: 0.0,
            domain: "[1, inf)",
        })
    } else {
        Ok(())
    }
}

/// `t_{df, prob}`: the `prob`-quantile of Student's t.
///
/// Inverts the incomplete-beta tail by safeguarded Newton iteration inside a
/// bisection bracket; the root is refined well past `1e-12` on the CDF scale.
pub fn t_quantile(df: u64, prob: f64) -> Result<f64> {
    check_df(df)?;
    open_unit("prob", prob)?;
    if prob == 0.5 {
        return Ok(0.0);
    }
    let nu = df as f64;
    let target = prob.min(1.0 - prob);

    let mut lo = 0.0;
    let mut hi = 1.0;
    while t_upper_tail(nu, hi) > target {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(StatsError::Degenerate("t quantile bracket overflow"));
        }
    }
    // Normal start is good for moderate df and always inside the bracket after clamping.
    let z = -acklam_start(target);
    let mut t = if z > lo && z < hi { z } else { 0.5 * (lo + hi) };
    for _ in 0..300 {
        let resid = t_upper_tail(nu, t) - target;
        if resid > 0.0 {
            lo = t;
        } else if resid < 0.0 {
            hi = t;
        } else {
            break;
        }
        // Tail decreases in t: t_new = t + resid / f(t).
        let density = t_pdf(nu, t);
        let mut next = t + resid / density;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - t).abs();
        t = next;
        if step <= 4.0 * f64::EPSILON * t.abs().max(f64::MIN_POSITIVE)
            || hi - lo <= f64::EPSILON * hi
        {
            break;
        }
    }
    Ok(if prob < 0.5 { -t } else { t })
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(StatsError::Domain {
            name: "a",
            value: a,
            domain: "(0, inf)",
        });
    }
    Ok(special::gamma_p(a, x))
}

/// Chi-square CDF with `k` degrees of freedom.
pub fn chi_square_cdf(k: u64, x: f64) -> Result<f64> {
    check_df(k)?;
    Ok(special::gamma_p(0.5 * k as f64, 0.5 * x.max(0.0)))
}

/// Arithmetic mean and unbiased (divisor `len - 1`) standard deviation.
pub fn sample_moments(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(StatsError::Degenerate(
            "standard deviation needs at least two values",
        ));
    }
    let m = mean(values)?;
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    Ok((m, (ss / (values.len() - 1) as f64).sqrt()))
}

pub fn mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(StatsError::Degenerate("mean of an empty list"));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}
