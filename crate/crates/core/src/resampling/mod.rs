//! Seeded with-replacement resampling of one or many data sources.

pub mod io;
mod rng;
mod sample;

pub use rng::{draw_indices, SeedSpec, StreamDomain, StreamRng};
pub use sample::{resample, resample_multi, EmpiricalSample, MultiSourceSample};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("sample must have at least one row and one column")]
    Empty,
    #[error("source {0} is empty")]
    EmptySource(usize),
    #[error("expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("row {row} has {got} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("non-finite entry at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("line {line}, field {field}: {message}")]
    Parse {
        line: usize,
        field: usize,
        message: String,
    },
    #[error("no such column: {0}")]
    MissingColumn(String),
    #[error("binary container: {0}")]
    Binary(String),
    #[error("i/o: {0}")]
    Io(String),
}
