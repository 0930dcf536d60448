//! Bootstrap confidence intervals that stay valid with very few resamples.

// `!(x >= 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bootstrap;
pub mod bounds;
pub mod cli;
pub mod estimators;
pub mod harness;
pub mod netsim;
pub mod resampling;
pub mod stats;
