//! Coverage-error bounds: the generic bounds for a few error levels and the
//! linear-model bound under a moment condition for growing n.
//!
//! cargo run --example bound_calculator

use cheapboot::bounds::{
    bound_cheap_alternative, bound_cheap_generic, bound_linear_moment, bound_quantile_generic,
    BoundMethod, GenericBoundInputs, ModelBoundInputs,
};

fn main() {
    println!(
        "{:>3} {:>10} {:>10} {:>10}",
        "B", "cheap", "alt", "quantile"
    );
    for b in [1, 2, 5, 10] {
        let g = GenericBoundInputs::new(0.01, 0.004, 0.002, b).with_alternative(0.05, 0.01, 1.0);
        println!(
            "{b:>3} {:>10.4} {:>10.4} {:>10.4}",
            bound_cheap_generic(&g).unwrap(),
            bound_cheap_alternative(&g).unwrap(),
            bound_quantile_generic(&g).unwrap()
        );
    }

    println!();
    println!("{:>16} {:>14} {:>14}", "n", "cheap B=2", "quantile");
    for e in [3, 6, 9, 12, 15] {
        let mut m = ModelBoundInputs::new(10u64.pow(e), 1, 2);
        m.sigma = Some(1.0);
        m.third_abs_moment = Some(2.0);
        m.q = Some(8.0);
        m.lq_norm = Some(1.5);
        m.l4_moment = Some(3.0);
        let cheap = bound_linear_moment(&m, BoundMethod::Cheap).unwrap();
        let quantile = bound_linear_moment(&m, BoundMethod::Quantile).unwrap();
        println!(
            "{:>16} {:>14.4e} {:>14.4e}",
            m.n, cheap.total, quantile.total
        );
    }
}
