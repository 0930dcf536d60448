use nalgebra::{DMatrix, DVector};

use super::{EstimatorError, FitReport, Result};
use crate::resampling::EmpiricalSample;

/// Solver settings for [`fit_logistic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticOptions {
    pub max_newton_iter: usize,
    pub max_lbfgs_iter: usize,
    /// Above this dimension L-BFGS replaces Newton.
    pub newton_max_dim: usize,
    pub lbfgs_memory: usize,
    /// Unpenalized fits abort once `||β||₂` exceeds this.
    pub divergence_norm: f64,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        Self {
            max_newton_iter: 100,
            max_lbfgs_iter: 1000,
            newton_max_dim: 2000,
            lbfgs_memory: 10,
            divergence_norm: 1e4,
        }
    }
}

fn softplus(eta: f64) -> f64 {
    if eta > 0.0 {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

struct Problem<'a> {
    x: &'a [f64],
    y: &'a [f64],
    n: usize,
    p: usize,
    l2: f64,
}

impl Problem<'_> {
    fn linear_predictor(&self, beta: &[f64]) -> Vec<f64> {
        self.x
            .chunks_exact(self.p)
            .map(|row| row.iter().zip(beta).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Penalized log-likelihood and its gradient.
    fn objective(&self, beta: &[f64]) -> (f64, Vec<f64>) {
        let eta = self.linear_predictor(beta);
        let mut value = 0.0;
        let mut grad = vec![0.0; self.p];
        for ((row, &yi), &e) in self.x.chunks_exact(self.p).zip(self.y).zip(&eta) {
            value += yi * e - softplus(e);
            let r = yi - sigmoid(e);
            for (g, xv) in grad.iter_mut().zip(row) {
                *g += r * xv;
            }
        }
        let sq: f64 = beta.iter().map(|b| b * b).sum();
        value -= 0.5 * self.l2 * sq;
        for (g, b) in grad.iter_mut().zip(beta) {
            *g -= self.l2 * b;
        }
        (value, grad)
    }

    fn value(&self, beta: &[f64]) -> f64 {
        let eta = self.linear_predictor(beta);
        let sq: f64 = beta.iter().map(|b| b * b).sum();
        self.y
            .iter()
            .zip(&eta)
            .map(|(y, e)| y * e - softplus(*e))
            .sum::<f64>()
            - 0.5 * self.l2 * sq
    }

    /// Negative Hessian `XᵀWX + l2·I`.
    fn information(&self, beta: &[f64]) -> DMatrix<f64> {
        let eta = self.linear_predictor(beta);
        let mut h = DMatrix::zeros(self.p, self.p);
        for (row, &e) in self.x.chunks_exact(self.p).zip(&eta) {
            let s = sigmoid(e);
            let w = s * (1.0 - s);
            for j in 0..self.p {
                let wj = w * row[j];
                for k in j..self.p {
                    h[(j, k)] += wj * row[k];
                }
            }
        }
        for j in 0..self.p {
            h[(j, j)] += self.l2;
            for k in j + 1..self.p {
                h[(k, j)] = h[(j, k)];
            }
        }
        h
    }

    fn tolerance(&self) -> f64 {
        1e-8 * (1.0 + self.n as f64)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn problem<'a>(sample: &'a EmpiricalSample, l2: f64) -> Result<Problem<'a>> {
    if !(l2 >= 0.0) || !l2.is_finite() {
        return Err(EstimatorError::Parameter {
            name: "l2",
            value: l2,
        });
    }
    let y = sample.response().ok_or(EstimatorError::MissingResponse)?;
    if let Some(row) = y.iter().position(|&v| v != 0.0 && v != 1.0) {
        return Err(EstimatorError::NonBinaryResponse { row, value: y[row] });
    }
    Ok(Problem {
        x: sample.as_slice(),
        y,
        n: sample.n(),
        p: sample.p(),
        l2,
    })
}

/// Penalized log-likelihood `Σ [yᵢηᵢ − log(1 + e^ηᵢ)] − l2·||β||²/2` and its
/// gradient at `beta`.
pub fn logistic_objective(
    sample: &EmpiricalSample,
    beta: &[f64],
    l2: f64,
) -> Result<(f64, Vec<f64>)> {
    if beta.len() != sample.p() {
        return Err(EstimatorError::Dimension {
            expected: sample.p(),
            got: beta.len(),
        });
    }
    Ok(problem(sample, l2)?.objective(beta))
}

/// Maximum (penalized) likelihood logistic regression without intercept.
///
/// Newton's method with step halving, falling back to L-BFGS for wide
/// designs. Converged means `||∇ℓ||₂ ≤ 1e-8·(1 + n)`.
pub fn fit_logistic(sample: &EmpiricalSample, l2: f64) -> Result<FitReport> {
    fit_logistic_with(sample, l2, &LogisticOptions::default())
}

pub fn fit_logistic_with(
    sample: &EmpiricalSample,
    l2: f64,
    opts: &LogisticOptions,
) -> Result<FitReport> {
    let prob = problem(sample, l2)?;
    if prob.p > opts.newton_max_dim {
        lbfgs(&prob, opts)
    } else {
        newton(&prob, opts)
    }
}

fn check_divergence(prob: &Problem, beta: &[f64], opts: &LogisticOptions) -> Result<()> {
    let nb = norm(beta);
    if prob.l2 == 0.0 && nb > opts.divergence_norm {
        return Err(EstimatorError::Separation { norm: nb });
    }
    Ok(())
}

/// Without a penalty, a separable design drives the gradient to zero while
/// `β` escapes to infinity; perfect fitted probabilities expose that case.
fn check_separation(prob: &Problem, beta: &[f64]) -> Result<()> {
    if prob.l2 > 0.0 {
        return Ok(());
    }
    let eta = prob.linear_predictor(beta);
    let perfect = prob
        .y
        .iter()
        .zip(&eta)
        .all(|(y, e)| (y - sigmoid(*e)).abs() < 1e-6);
    if perfect {
        return Err(EstimatorError::Separation { norm: norm(beta) });
    }
    Ok(())
}

fn newton(prob: &Problem, opts: &LogisticOptions) -> Result<FitReport> {
    let tol = prob.tolerance();
    let mut beta = vec![0.0; prob.p];
    let (mut value, mut grad) = prob.objective(&beta);
    let mut iterations = 0;
    while norm(&grad) > tol && iterations < opts.max_newton_iter {
        iterations += 1;
        let info = prob.information(&beta);
        let g = DVector::from_column_slice(&grad);
        let step = match info.clone().cholesky() {
            Some(c) => c.solve(&g),
            None => info
                .lu()
                .solve(&g)
                .ok_or(EstimatorError::Solve("singular information matrix"))?,
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand: Vec<f64> = beta
                .iter()
                .zip(step.iter())
                .map(|(b, s)| b + t * s)
                .collect();
            let v = prob.value(&cand);
            if v >= value {
                beta = cand;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        check_divergence(prob, &beta, opts)?;
        (value, grad) = prob.objective(&beta);
    }
    check_separation(prob, &beta)?;
    let grad_norm = norm(&grad);
    Ok(FitReport {
        estimate: beta,
        iterations,
        grad_norm,
        tolerance: tol,
        converged: grad_norm <= tol,
    })
}

fn lbfgs(prob: &Problem, opts: &LogisticOptions) -> Result<FitReport> {
    let tol = prob.tolerance();
    let m = opts.lbfgs_memory.max(1);
    let mut beta = vec![0.0; prob.p];
    // Minimize f = −ℓ.
    let (v0, g0) = prob.objective(&beta);
    let mut f = -v0;
    let mut g: Vec<f64> = g0.iter().map(|x| -x).collect();
    let mut hist_s: Vec<Vec<f64>> = Vec::new();
    let mut hist_y: Vec<Vec<f64>> = Vec::new();
    let mut iterations = 0;
    while norm(&g) > tol && iterations < opts.max_lbfgs_iter {
        iterations += 1;
        // Two-loop recursion.
        let mut q = g.clone();
        let k = hist_s.len();
        let mut alpha = vec![0.0; k];
        for i in (0..k).rev() {
            let rho = 1.0 / dot(&hist_y[i], &hist_s[i]);
            alpha[i] = rho * dot(&hist_s[i], &q);
            for (qj, yj) in q.iter_mut().zip(&hist_y[i]) {
                *qj -= alpha[i] * yj;
            }
        }
        let gamma = if k > 0 {
            dot(&hist_s[k - 1], &hist_y[k - 1]) / dot(&hist_y[k - 1], &hist_y[k - 1])
        } else {
            1.0 / norm(&g).max(1.0)
        };
        q.iter_mut().for_each(|v| *v *= gamma);
        for i in 0..k {
            let rho = 1.0 / dot(&hist_y[i], &hist_s[i]);
            let b = rho * dot(&hist_y[i], &q);
            for (qj, sj) in q.iter_mut().zip(&hist_s[i]) {
                *qj += (alpha[i] - b) * sj;
            }
        }
        let dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let slope = dot(&g, &dir);
        if !(slope < 0.0) {
            hist_s.clear();
            hist_y.clear();
            continue;
        }
        // Backtracking Armijo line search.
        let mut t = 1.0;
        let mut next = None;
        for _ in 0..60 {
            let cand: Vec<f64> = beta.iter().zip(&dir).map(|(b, d)| b + t * d).collect();
            let (v, gr) = prob.objective(&cand);
            if -v <= f + 1e-4 * t * slope {
                next = Some((cand, -v, gr.iter().map(|x| -x).collect::<Vec<f64>>()));
                break;
            }
            t *= 0.5;
        }
        let Some((nb, nf, ng)) = next else { break };
        let s: Vec<f64> = nb.iter().zip(&beta).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = ng.iter().zip(&g).map(|(a, b)| a - b).collect();
        if dot(&s, &yv) > 1e-12 * norm(&s) * norm(&yv) {
            if hist_s.len() == m {
                hist_s.remove(0);
                hist_y.remove(0);
            }
            hist_s.push(s);
            hist_y.push(yv);
        }
        beta = nb;
        f = nf;
        g = ng;
        check_divergence(prob, &beta, opts)?;
    }
    check_separation(prob, &beta)?;
    let grad_norm = norm(&g);
    Ok(FitReport {
        estimate: beta,
        iterations,
        grad_norm,
        tolerance: tol,
        converged: grad_norm <= tol,
    })
}
