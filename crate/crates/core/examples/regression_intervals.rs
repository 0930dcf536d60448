//! Cheap-bootstrap intervals for selected coefficients of OLS, ridge and
//! logistic regression fits on simulated data.
//!
//! cargo run --release --example regression_intervals

use cheapboot::bootstrap::{cheap_interval, compute_replicates};
use cheapboot::estimators::{EstimatorKind, EstimatorSpec};
use cheapboot::resampling::{EmpiricalSample, SeedSpec, StreamDomain};
use rand::Rng;
use rand_distr::StandardNormal;

const N: usize = 400;
const P: usize = 5;
const BETA: [f64; P] = [1.0, -0.5, 0.0, 0.25, 2.0];

fn design(seed: SeedSpec) -> (Vec<f64>, Vec<f64>) {
    let mut rng = seed.stream(StreamDomain::DataGeneration);
    let x: Vec<f64> = (0..N * P).map(|_| rng.sample(StandardNormal)).collect();
    let eta = x
        .chunks(P)
        .map(|row| row.iter().zip(BETA).map(|(a, b)| a * b).sum())
        .collect();
    (x, eta)
}

fn report(name: &str, spec: EstimatorSpec, sample: &EmpiricalSample, seed: SeedSpec) {
    let r = compute_replicates(&spec, sample, 4, seed).expect("fit succeeds");
    let set = cheap_interval(&r, 0.05).expect("B >= 1");
    for (iv, j) in set.intervals.iter().zip([0, 2, 4]) {
        println!(
            "{name:>8} beta[{j}] = {:>7.3} in [{:>7.3}, {:>7.3}] (truth {})",
            r.point()[j / 2],
            iv.lo,
            iv.hi,
            BETA[j]
        );
    }
}

fn main() {
    let seed = SeedSpec::new(7, 0, 0, 0);
    let (x, eta) = design(seed);
    let mut noise = seed.with_source(1).stream(StreamDomain::DataGeneration);

    let y: Vec<f64> = eta
        .iter()
        .map(|e| e + noise.sample::<f64, _>(StandardNormal))
        .collect();
    let linear = EmpiricalSample::new(x.clone(), N, P)
        .unwrap()
        .with_response(y)
        .unwrap();
    report(
        "ols",
        EstimatorSpec::new(EstimatorKind::Ols).with_targets(vec![0, 2, 4]),
        &linear,
        seed,
    );
    report(
        "ridge",
        EstimatorSpec::new(EstimatorKind::Ridge { lambda: 10.0 }).with_targets(vec![0, 2, 4]),
        &linear,
        seed,
    );

    let labels: Vec<f64> = eta
        .iter()
        .map(|e| (noise.random::<f64>() < 1.0 / (1.0 + (-e).exp())) as u8 as f64)
        .collect();
    let binary = EmpiricalSample::new(x, N, P)
        .unwrap()
        .with_response(labels)
        .unwrap();
    report(
        "logistic",
        EstimatorSpec::new(EstimatorKind::Logistic { l2: 0.0 }).with_targets(vec![0, 2, 4]),
        &binary,
        seed,
    );
}
