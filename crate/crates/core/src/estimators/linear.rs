use nalgebra::{DMatrix, DVector};

use super::{EstimatorError, FitReport, Result};
use crate::resampling::EmpiricalSample;

const RANK_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-8;

fn design(sample: &EmpiricalSample) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let y = sample.response().ok_or(EstimatorError::MissingResponse)?;
    let x = DMatrix::from_row_slice(sample.n(), sample.p(), sample.as_slice());
    Ok((x, DVector::from_column_slice(y)))
}

/// Normal-equation residual `||XᵀXβ + λβ − XᵀY||∞` and its tolerance.
fn residual(x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>, lambda: f64) -> (f64, f64) {
    let xty = x.tr_mul(y);
    let fitted = x * beta;
    let lhs = x.tr_mul(&fitted) + beta * lambda;
    let r = (lhs - &xty).amax();
    let scale = xty.amax().max(x.amax().powi(2) * beta.amax());
    (r, RESIDUAL_TOL * (1.0 + scale))
}

/// Least squares via Householder QR. No intercept is added.
pub fn fit_ols(sample: &EmpiricalSample) -> Result<FitReport> {
    let (x, y) = design(sample)?;
    let (n, p) = x.shape();
    if n < p {
        return Err(EstimatorError::Underdetermined { n, p });
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let diag_max = (0..p).map(|k| r[(k, k)].abs()).fold(0.0, f64::max);
    if let Some(column) =
        (0..p).find(|&k| !(r[(k, k)].abs() >= RANK_TOL * diag_max) || diag_max == 0.0)
    {
        return Err(EstimatorError::RankDeficient { column });
    }
    let mut qty = y.clone();
    qr.q_tr_mul(&mut qty);
    let head = qty.rows(0, p).into_owned();
    let beta = r
        .solve_upper_triangular(&head)
        .ok_or(EstimatorError::Solve("triangular solve"))?;
    let (grad_norm, tolerance) = residual(&x, &y, &beta, 0.0);
    Ok(FitReport {
        estimate: beta.as_slice().to_vec(),
        iterations: 0,
        grad_norm,
        tolerance,
        converged: grad_norm <= tolerance,
    })
}

/// Ridge regression with penalty `lambda > 0`: primal Cholesky when `n ≥ p`,
/// dual form `Xᵀ(XXᵀ + λI)⁻¹Y` otherwise.
pub fn fit_ridge(sample: &EmpiricalSample, lambda: f64) -> Result<FitReport> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(EstimatorError::Parameter {
            name: "lambda",
            value: lambda,
        });
    }
    let (x, y) = design(sample)?;
    let (n, p) = x.shape();
    let beta = if n >= p {
        let mut a = x.tr_mul(&x);
        for i in 0..p {
            a[(i, i)] += lambda;
        }
        let chol = a.cholesky().ok_or(EstimatorError::Solve("cholesky"))?;
        chol.solve(&x.tr_mul(&y))
    } else {
        let mut k = &x * x.transpose();
        for i in 0..n {
            k[(i, i)] += lambda;
        }
        let chol = k.cholesky().ok_or(EstimatorError::Solve("cholesky"))?;
        x.tr_mul(&chol.solve(&y))
    };
    let (grad_norm, tolerance) = residual(&x, &y, &beta, lambda);
    Ok(FitReport {
        estimate: beta.as_slice().to_vec(),
        iterations: 0,
        grad_norm,
        tolerance,
        converged: grad_norm <= tolerance,
    })
}
