//! Coverage of the cheap interval for linear regression over a grid of
//! sample sizes and resample budgets.
//!
//! cargo run --release --example coverage_sweep

use cheapboot::bootstrap::Method;
use cheapboot::harness::{sweep, ExperimentConfig, Scenario, SweepConfig};

fn main() {
    let mut base = ExperimentConfig::new(Scenario::LinregExpdecay, 0, 10, vec![1, 3, 10], 100);
    base.methods = vec![Method::Cheap, Method::StdError];
    let grid = SweepConfig {
        base,
        n_list: vec![50, 200, 800],
    };
    let report = sweep(&grid, 0).expect("valid grid");
    print!("{}", report.summary_table());
}
