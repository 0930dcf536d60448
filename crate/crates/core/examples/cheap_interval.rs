//! Cheap, basic, percentile and standard-error intervals for the mean of a
//! skewed sample, at a few resample budgets.
//!
//! cargo run --release --example cheap_interval

use cheapboot::bootstrap::{compute_replicates, interval, Method};
use cheapboot::estimators::{CustomEstimator, EstimatorError};
use cheapboot::resampling::{EmpiricalSample, SeedSpec, StreamDomain};
use rand::Rng;

fn main() {
    let seed = SeedSpec::new(42, 0, 0, 0);
    let mut rng = seed.stream(StreamDomain::DataGeneration);
    // Exponential(1) data, true mean 1.
    let data: Vec<f64> = (0..500)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let sample = EmpiricalSample::from_column(data).expect("finite data");

    let mean = CustomEstimator(|s: &EmpiricalSample| Ok::<_, EstimatorError>(s.column_means()));
    let all = compute_replicates(&mean, &sample, 20, seed).expect("estimator succeeds");
    println!("point estimate {:.5}", all.point()[0]);
    for b in [1, 2, 5, 20] {
        let r = all.prefix(b);
        for m in Method::ALL {
            if b < m.min_replicates() {
                println!("B={b:>2} {:<11} N.A.", m.as_str());
                continue;
            }
            let iv = interval(m, &r, 0.05)
                .expect("valid replicate set")
                .intervals[0];
            println!(
                "B={b:>2} {:<11} [{:.5}, {:.5}] width {:.5}",
                m.as_str(),
                iv.lo,
                iv.hi,
                iv.width()
            );
        }
    }
}
