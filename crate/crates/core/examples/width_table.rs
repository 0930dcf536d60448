//! Expected half-width of the cheap interval relative to the normal interval
//! with known variance, for B = 1..=20.
//!
//! cargo run --example width_table -- [alpha]

use cheapboot::bootstrap::expected_halfwidth_ratio;

fn main() {
    let alpha: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0.05);
    println!("{:>3} {:>10} {:>10}", "B", "ratio", "inflation");
    for b in 1..=20 {
        let r = expected_halfwidth_ratio(b, alpha).expect("alpha in (0, 1)");
        println!("{b:>3} {r:>10.4} {:>9.1}%", 100.0 * (r - 1.0));
    }
}
