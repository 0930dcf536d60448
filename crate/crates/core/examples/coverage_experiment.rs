//! Monte Carlo coverage of the four interval methods on the ellipsoidal
//! scenario, printed as a table and as CSV.
//!
//! cargo run --release --example coverage_experiment -- [repetitions]

use cheapboot::harness::{run_experiment, ExperimentConfig, Scenario};

fn main() {
    let reps: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200);
    let config = ExperimentConfig::new(Scenario::Ellipsoidal, 500, 20, vec![1, 2, 5, 10], reps);
    let report = run_experiment(&config).expect("valid configuration");
    print!("{}", report.summary_table());
    println!();
    print!("{}", report.to_csv_string().expect("in-memory csv"));
}
