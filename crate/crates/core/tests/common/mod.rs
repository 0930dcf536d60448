//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the library's numerics.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

/// Adaptive Simpson quadrature with Richardson correction on 64 fixed panels.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0
            || delta.abs() <= 15.0 * tol
            || delta.abs() <= 1e-15 * (left.abs() + right.abs())
        {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    // Fixed panels first, so a narrow peak cannot slip between the coarse samples.
    const PANELS: usize = 64;
    let h = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == PANELS { b } else { lo + h };
            let (fa, fb) = (f(lo), f(hi));
            let (m, fm, whole) = simpson(f, lo, fa, hi, fb);
            rec(f, lo, fa, hi, fb, m, fm, whole, tol / PANELS as f64, 40)
        })
        .sum()
}

/// Bisection root of a monotone increasing `g` on `[lo, hi]`.
pub fn bisect<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Student-t quantile. With t = √ν·tan θ the density becomes cos^{ν−1} θ on
/// (−π/2, π/2), which is smooth and bounded, so the CDF is a plain integral.
pub fn t_quantile(df: u64, p: f64) -> f64 {
    let k = (df - 1) as i32;
    let f = move |th: f64| th.cos().powi(k);
    let total = integrate(&f, -FRAC_PI_2, FRAC_PI_2, 1e-15);
    // Upper-tail mass from θ to π/2 avoids cancellation for p near 1.
    let tail = |th: f64| integrate(&f, th, FRAC_PI_2, 1e-16) / total;
    let theta = if p >= 0.5 {
        bisect(|th| (1.0 - p) - tail(th), 0.0, FRAC_PI_2)
    } else {
        -bisect(|th| p - tail(th), 0.0, FRAC_PI_2)
    };
    (df as f64).sqrt() * theta.tan()
}

pub fn normal_cdf(x: f64) -> f64 {
    let f = |u: f64| (-0.5 * u * u).exp();
    let half = integrate(&f, 0.0, x.abs(), 1e-16) / (2.0 * PI).sqrt();
    if x >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

pub fn normal_quantile(p: f64) -> f64 {
    bisect(|x| normal_cdf(x) - p, -40.0, 40.0)
}

/// E[√(χ²_B / B)] as a ratio of two integrals of u^k e^{−u²/2}.
pub fn chi_mean(b: u64) -> f64 {
    let moment = |k: i32| {
        integrate(
            &move |u: f64| u.powi(k) * (-0.5 * u * u).exp(),
            0.0,
            60.0,
            1e-14,
        )
    };
    moment(b as i32) / moment(b as i32 - 1) / (b as f64).sqrt()
}

/// CDF of √(χ²_B / B).
pub fn scaled_chi_cdf(b: u64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let k = b as i32 - 1;
    let f = move |u: f64| u.powi(k) * (-0.5 * u * u).exp();
    let upper = s * (b as f64).sqrt();
    integrate(&f, 0.0, upper.min(60.0), 1e-13) / integrate(&f, 0.0, 60.0, 1e-13)
}

/// Expected cheap/normal half-width ratio, t·E[√(χ²_B/B)]/z.
pub fn halfwidth_ratio(b: u64, alpha: f64) -> f64 {
    t_quantile(b, 1.0 - alpha / 2.0) * chi_mean(b) / normal_quantile(1.0 - alpha / 2.0)
}

// Bound expressions, written out term by term.

pub fn thm1(e1: f64, e2: f64, beta: f64, b: f64) -> f64 {
    2.0 * e1 + 2.0 * b * e2 + beta
}

pub fn thm2(e1: f64, e2: f64, beta: f64) -> f64 {
    2.0 * e1 + 2.0 * e2 + 2.0 * beta
}

#[allow(clippy::too_many_arguments)]
pub fn thm6(e1: f64, e2: f64, e3: f64, e4: f64, beta: f64, sigma: f64, b: u64, alpha: f64) -> f64 {
    let t = t_quantile(b, 1.0 - alpha / 2.0);
    let z = normal_quantile(1.0 - alpha / 2.0);
    let c = (2.0 / PI).sqrt();
    let alt = 2.0 * e1 + 2.0 * e4 + c * (t - z).abs() + c * (e3 / sigma) * t;
    thm1(e1, e2, beta, b as f64).min(alt)
}

/// Constants of the function-of-mean bounds.
#[derive(Debug, Clone, Copy)]
pub struct MeanModel {
    pub n: f64,
    pub p: f64,
    pub b: f64,
    pub tau: f64,
    pub c_hg: f64,
    pub c_gradg: f64,
    pub lambda: f64,
    pub sigma: f64,
    pub m31: f64,
    pub m32: f64,
    pub trace: f64,
    pub third: f64,
    pub c: f64,
    pub c1: f64,
}

fn mean_model_brackets(m: &MeanModel) -> (f64, f64) {
    let n = m.n;
    let p = m.p;
    let ln = n.ln();
    let r = 1.0 + ln / p;
    let sn = n.sqrt();
    let l = m.lambda;
    let first = m.m31 / (sn * m.sigma.powi(3))
        + m.c_hg * m.m31.cbrt() * m.trace / (sn * m.sigma * m.sigma)
        + m.c_hg * m.m32.powf(2.0 / 3.0) / (n.powf(5.0 / 6.0) * m.sigma)
        + m.c_hg * m.m31.cbrt() * m.m32.powf(2.0 / 3.0) / (n * m.sigma * m.sigma)
        + m.c_hg * m.tau * m.tau / (m.c_gradg * l.sqrt()) * r * (p / n).sqrt()
        + m.third / l.powf(1.5) / sn
        + m.tau.powi(3) / l.powf(1.5) * r.powf(1.5) / sn
        + m.tau.powi(4) * p.sqrt() / (l * l * n) * r.sqrt()
        + m.tau * m.tau * p.sqrt() / (l * n) * r.sqrt()
        + m.tau.powi(3) * p.sqrt() / (l.powf(1.5) * n) * r;
    let second = m.tau.powi(4) * ln.powf(1.5) / (l * l * sn)
        + m.tau * m.tau * ln.powf(1.5) / (l * sn)
        + m.tau.powi(3) / (l.powf(1.5) * sn) * r.sqrt() * (ln + p.ln()) * ln.sqrt();
    (first, second)
}

pub fn thm3(m: &MeanModel) -> f64 {
    let (a, b) = mean_model_brackets(m);
    6.0 / m.n + m.b * m.c * a + m.b * m.c1 * b
}

pub fn thm7(m: &MeanModel) -> f64 {
    let (a, b) = mean_model_brackets(m);
    12.0 / m.n + m.c * a + m.c1 * b
}

pub fn thm4(n: f64, b: f64, c: f64, m3: f64, sigma: f64, omega: f64) -> f64 {
    c / n
        + b * c * m3 / (sigma.powi(3) * n.sqrt())
        + b * c * omega.powi(4) * n.ln().powi(11) / (sigma.powi(4) * n.sqrt())
}

pub fn thm8(n: f64, c: f64, m3: f64, sigma: f64, omega: f64) -> f64 {
    let berry = m3 / (sigma.powi(3) * n.sqrt());
    c * (1.0 / n + berry + omega.powi(4) * n.ln().powi(11) / (sigma.powi(4) * n.sqrt())) + c * berry
}

#[allow(clippy::too_many_arguments)]
pub fn thm5(n: f64, b: f64, c: f64, c1: f64, q: f64, lq: f64, l4: f64, m3: f64, sigma: f64) -> f64 {
    b * c1 * n.ln().sqrt() / n.powf(0.5 - 3.0 / (2.0 * q)) * lq.max(l4.sqrt())
        + c * m3 / (sigma.powi(3) * n.sqrt())
}

#[allow(clippy::too_many_arguments)]
pub fn thm9(n: f64, c: f64, c1: f64, q: f64, lq: f64, l4: f64, m3: f64, sigma: f64) -> f64 {
    let ln = n.ln();
    2.0 / n.sqrt()
        + c1 * lq.max(l4.sqrt())
            * (ln.powf(1.5) / n.sqrt() + ln.sqrt() / n.powf(0.5 - 3.0 / (2.0 * q)))
        + c * m3 / (sigma.powi(3) * n.sqrt())
}

/// Relative agreement `|a − b| ≤ tol · max(|a|, |b|, tiny)`.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// One PASS/FAIL line in the acceptance log.
pub fn report(id: usize, name: &str, pass: bool, detail: &str) -> bool {
    println!(
        "{} criterion {id:>2} {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}
