//! Sample ingestion.
//!
//! CSV: comma separated, one record per row, optional single header line
//! (detected when any field of the first record fails to parse as a number).
//! The response column, when requested, is removed from the design matrix.
//!
//! Binary container, little endian:
//!
//! | offset | size    | content                      |
//! |--------|---------|------------------------------|
//! | 0      | 4       | magic `b"CBS1"`              |
//! | 4      | 8       | `n` rows as `u64`            |
//! | 12     | 4       | `p` columns as `u32`         |
//! | 16     | 8·n·p   | entries as `f64`, row-major  |
//!
//! SVMlight (`label idx:value ...`, 1-based indices) is densified on load with
//! labels as the response; `{-1, +1}` labels are mapped to `{0, 1}`.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::{EmpiricalSample, SampleError};

pub const BINARY_MAGIC: [u8; 4] = *b"CBS1";
pub const BINARY_HEADER_LEN: usize = 16;

/// Which column holds the response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.trim().to_string()),
        })
    }
}

/// Parses CSV text into a sample.
pub fn parse_csv(
    text: &str,
    response: Option<&ColumnSelector>,
) -> Result<EmpiricalSample, SampleError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| SampleError::Parse {
            line,
            field: 0,
            message: e.to_string(),
        })?;
        let parsed: Vec<Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
        if i == 0 && parsed.iter().any(Result::is_err) {
            header = Some(record.iter().map(str::to_string).collect());
            width = Some(record.len());
            continue;
        }
        match width {
            Some(w) if w != record.len() => {
                return Err(SampleError::Parse {
                    line,
                    field: record.len().min(w) + 1,
                    message: format!("expected {w} fields, found {}", record.len()),
                })
            }
            None => width = Some(record.len()),
            _ => {}
        }
        let mut row = Vec::with_capacity(record.len());
        for (f, (raw, v)) in record.iter().zip(parsed).enumerate() {
            let v = v.map_err(|_| SampleError::Parse {
                line,
                field: f + 1,
                message: format!("not a number: {raw:?}"),
            })?;
            if !v.is_finite() {
                return Err(SampleError::Parse {
                    line,
                    field: f + 1,
                    message: "non-finite value".into(),
                });
            }
            row.push(v);
        }
        rows.push(row);
    }
    let width = width.ok_or(SampleError::Empty)?;
    let column = match response {
        None => None,
        Some(sel) => Some(resolve_column(sel, header.as_deref(), width)?),
    };
    split_response(rows, width, column)
}

fn resolve_column(
    sel: &ColumnSelector,
    header: Option<&[String]>,
    width: usize,
) -> Result<usize, SampleError> {
    match sel {
        ColumnSelector::Index(i) if *i < width => Ok(*i),
        ColumnSelector::Index(i) => Err(SampleError::MissingColumn(format!(
            "index {i} (data has {width} columns)"
        ))),
        ColumnSelector::Name(name) => header
            .and_then(|h| h.iter().position(|c| c == name))
            .ok_or_else(|| SampleError::MissingColumn(name.clone())),
    }
}

fn split_response(
    rows: Vec<Vec<f64>>,
    width: usize,
    column: Option<usize>,
) -> Result<EmpiricalSample, SampleError> {
    let n = rows.len();
    match column {
        None => EmpiricalSample::new(rows.concat(), n, width),
        Some(c) => {
            if width < 2 {
                return Err(SampleError::MissingColumn(
                    "response column leaves no covariates".into(),
                ));
            }
            let mut data = Vec::with_capacity(n * (width - 1));
            let mut y = Vec::with_capacity(n);
            for row in rows {
                for (j, v) in row.into_iter().enumerate() {
                    if j == c {
                        y.push(v);
                    } else {
                        data.push(v);
                    }
                }
            }
            EmpiricalSample::new(data, n, width - 1)?.with_response(y)
        }
    }
}

pub fn read_csv(
    path: impl AsRef<Path>,
    response: Option<&ColumnSelector>,
) -> Result<EmpiricalSample, SampleError> {
    let text = fs::read_to_string(path.as_ref()).map_err(|e| SampleError::Io(e.to_string()))?;
    parse_csv(&text, response)
}

/// Serializes the design matrix (response excluded) into the binary container.
pub fn encode_binary(sample: &EmpiricalSample) -> Vec<u8> {
    let mut out = Vec::with_capacity(BINARY_HEADER_LEN + 8 * sample.as_slice().len());
    out.extend_from_slice(&BINARY_MAGIC);
    out.extend_from_slice(&(sample.n() as u64).to_le_bytes());
    out.extend_from_slice(&(sample.p() as u32).to_le_bytes());
    for v in sample.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_binary(
    bytes: &[u8],
    response: Option<usize>,
) -> Result<EmpiricalSample, SampleError> {
    if bytes.len() < BINARY_HEADER_LEN || bytes[0..4] != BINARY_MAGIC {
        return Err(SampleError::Binary("missing CBS1 header".into()));
    }
    let n = u64::from_le_bytes(bytes[4..12].try_into().unwrap()) as usize;
    let p = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let body = &bytes[BINARY_HEADER_LEN..];
    if body.len()
        != n.checked_mul(p)
            .and_then(|k| k.checked_mul(8))
            .unwrap_or(usize::MAX)
    {
        return Err(SampleError::Binary(format!(
            "header says {n}x{p} but payload has {} bytes",
            body.len()
        )));
    }
    let values: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    match response {
        None => EmpiricalSample::new(values, n, p),
        Some(c) if c < p => {
            let rows: Vec<Vec<f64>> = values.chunks_exact(p).map(<[f64]>::to_vec).collect();
            split_response(rows, p, Some(c))
        }
        Some(c) => Err(SampleError::MissingColumn(format!(
            "index {c} (data has {p} columns)"
        ))),
    }
}

pub fn read_binary(
    path: impl AsRef<Path>,
    response: Option<usize>,
) -> Result<EmpiricalSample, SampleError> {
    let bytes = fs::read(path.as_ref()).map_err(|e| SampleError::Io(e.to_string()))?;
    decode_binary(&bytes, response)
}

/// Densifies SVMlight text.
pub fn parse_svmlight(
    text: &str,
    n_features: Option<usize>,
) -> Result<EmpiricalSample, SampleError> {
    let mut labels = Vec::new();
    let mut entries: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let label: f64 = parts
            .next()
            .unwrap()
            .parse()
            .map_err(|_| SampleError::Parse {
                line: i + 1,
                field: 1,
                message: "bad label".into(),
            })?;
        let mut row = Vec::new();
        for (f, tok) in parts.enumerate() {
            let bad = || SampleError::Parse {
                line: i + 1,
                field: f + 2,
                message: format!("bad feature {tok:?}"),
            };
            let (idx, val) = tok.split_once(':').ok_or_else(bad)?;
            let idx: usize = idx.parse().map_err(|_| bad())?;
            let val: f64 = val.parse().map_err(|_| bad())?;
            if idx == 0 {
                return Err(bad());
            }
            max_index = max_index.max(idx);
            row.push((idx - 1, val));
        }
        labels.push(label);
        entries.push(row);
    }
    let p = n_features.unwrap_or(max_index).max(1);
    if max_index > p {
        return Err(SampleError::MissingColumn(format!(
            "feature {max_index} exceeds declared width {p}"
        )));
    }
    let n = labels.len();
    let mut data = vec![0.0; n * p];
    for (r, row) in entries.iter().enumerate() {
        for &(c, v) in row {
            data[r * p + c] = v;
        }
    }
    if labels.iter().all(|&l| l == 1.0 || l == -1.0) {
        labels
            .iter_mut()
            .for_each(|l| *l = if *l > 0.0 { 1.0 } else { 0.0 });
    }
    EmpiricalSample::new(data, n, p)?.with_response(labels)
}

/// Loads a sample by sniffing the binary magic; anything else is read as CSV.
pub fn read_sample(
    path: impl AsRef<Path>,
    response: Option<&ColumnSelector>,
) -> Result<EmpiricalSample, SampleError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| SampleError::Io(format!("{}: {e}", path.display())))?;
    if bytes.len() >= 4 && bytes[0..4] == BINARY_MAGIC {
        let idx = match response {
            None => None,
            Some(ColumnSelector::Index(i)) => Some(*i),
            Some(ColumnSelector::Name(n)) => {
                return Err(SampleError::MissingColumn(format!(
                    "{n} (binary files have no column names)"
                )))
            }
        };
        return decode_binary(&bytes, idx);
    }
    let text = String::from_utf8(bytes).map_err(|e| SampleError::Io(e.to_string()))?;
    let is_svm = path
        .extension()
        .is_some_and(|e| e == "svm" || e == "svmlight");
    if is_svm {
        parse_svmlight(&text, None)
    } else {
        parse_csv(&text, response)
    }
}
