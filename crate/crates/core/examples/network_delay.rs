//! Mean steady-state delay of the four-node network under both presets,
//! averaged over independent runs.
//!
//! cargo run --release --example network_delay -- [runs]

use cheapboot::netsim::{simulate, InputModels, NetworkConfig, PRESETS};
use cheapboot::resampling::SeedSpec;

fn main() {
    let runs: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(50);
    for name in PRESETS {
        let config = NetworkConfig::preset(name).expect("known preset");
        let models = InputModels::parametric(&config).expect("valid preset");
        let delays: Vec<f64> = (0..runs)
            .map(|r| {
                simulate(&models, &config, SeedSpec::new(2024, r, 0, 0))
                    .expect("stable network")
                    .mean_delay
            })
            .collect();
        let mean = delays.iter().sum::<f64>() / runs as f64;
        let var =
            delays.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (runs as f64 - 1.0).max(1.0);
        println!(
            "{name:>15}: mean delay {mean:.5e} s (MC s.e. {:.2e}, {runs} runs)",
            (var / runs as f64).sqrt()
        );
    }
}
