//! Cheap-bootstrap interval for the steady-state network delay when all
//! thirteen input distributions are only known through data.
//!
//! cargo run --release --example input_uncertainty -- [B] [observations per source]

use cheapboot::bootstrap::{cheap_interval, ReplicateSet};
use cheapboot::netsim::{delay_estimator, generate_input_data, NetworkConfig, SOURCES};
use cheapboot::resampling::{resample_multi, SeedSpec};

fn main() {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().ok());
    let b = args.next().flatten().unwrap_or(4);
    let size = args.next().flatten().unwrap_or(500);
    let config = NetworkConfig::exponential_preset();
    let seed = SeedSpec::new(11, 0, 0, 0);

    let data = generate_input_data(&config, &[size; SOURCES], seed).expect("valid sizes");
    let point = delay_estimator(&data, &config, seed, 1).expect("stable network");
    let reps: Vec<f64> = (1..=b as u64)
        .map(|k| {
            let s = seed.with_resample(k);
            delay_estimator(&resample_multi(&data, s), &config, s, 1).expect("stable network")
        })
        .collect();
    let set = ReplicateSet::scalar(point, &reps, size).expect("finite replicates");
    let iv = cheap_interval(&set, 0.05).expect("B >= 1").intervals[0];
    println!(
        "plug-in delay {point:.5e} s; 95% cheap interval [{:.5e}, {:.5e}] with B = {b}",
        iv.lo, iv.hi
    );
}
