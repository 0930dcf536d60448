use super::rng::{draw_indices, SeedSpec};
use super::SampleError;

/// An `n × p` data matrix of i.i.d. rows, stored row-major, with an optional
/// paired response.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    data: Vec<f64>,
    n: usize,
    p: usize,
    response: Option<Vec<f64>>,
}

impl EmpiricalSample {
    /// Validates shape and finiteness once; every later operation trusts it.
    pub fn new(data: Vec<f64>, n: usize, p: usize) -> Result<Self, SampleError> {
        if n == 0 || p == 0 {
            return Err(SampleError::Empty);
        }
        if data.len() != n * p {
            return Err(SampleError::Shape {
                expected: n * p,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(SampleError::NonFinite {
                row: pos / p,
                col: pos % p,
            });
        }
        Ok(Self {
            data,
            n,
            p,
            response: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SampleError> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != p) {
            return Err(SampleError::RaggedRow {
                row: bad,
                expected: p,
                got: rows[bad].len(),
            });
        }
        Self::new(rows.concat(), n, p)
    }

    /// A one-column sample.
    pub fn from_column(values: Vec<f64>) -> Result<Self, SampleError> {
        let n = values.len();
        Self::new(values, n, 1)
    }

    pub fn with_response(mut self, response: Vec<f64>) -> Result<Self, SampleError> {
        if response.len() != self.n {
            return Err(SampleError::Shape {
                expected: self.n,
                got: response.len(),
            });
        }
        if let Some(row) = response.iter().position(|v| !v.is_finite()) {
            return Err(SampleError::NonFinite { row, col: self.p });
        }
        self.response = Some(response);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.p)
    }

    /// Row-major backing storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn response(&self) -> Option<&[f64]> {
        self.response.as_deref()
    }

    /// Rows (and paired responses) at `indices`, in index order.
    pub fn gather(&self, indices: &[usize]) -> EmpiricalSample {
        let mut data = Vec::with_capacity(indices.len() * self.p);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        EmpiricalSample {
            data,
            n: indices.len(),
            p: self.p,
            response: self
                .response
                .as_ref()
                .map(|y| indices.iter().map(|&i| y[i]).collect()),
        }
    }

    /// Column means, accumulated row by row in storage order.
    pub fn column_means(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.p];
        for row in self.rows() {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        let inv = 1.0 / self.n as f64;
        acc.iter_mut().for_each(|a| *a *= inv);
        acc
    }

    /// Column means of the gathered rows without materializing them; bitwise
    /// equal to `self.gather(indices).column_means()`.
    pub fn column_means_at(&self, indices: &[usize]) -> Vec<f64> {
        let mut acc = vec![0.0; self.p];
        for &i in indices {
            for (a, v) in acc.iter_mut().zip(self.row(i)) {
                *a += v;
            }
        }
        let inv = 1.0 / indices.len() as f64;
        acc.iter_mut().for_each(|a| *a *= inv);
        acc
    }
}

/// Resample rows with replacement to the original size.
pub fn resample(sample: &EmpiricalSample, seed: SeedSpec) -> EmpiricalSample {
    sample.gather(&draw_indices(sample.n(), seed))
}

/// Independent univariate data sources, e.g. the inputs of a simulation model.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSourceSample {
    sources: Vec<Vec<f64>>,
}

impl MultiSourceSample {
    pub fn new(sources: Vec<Vec<f64>>) -> Result<Self, SampleError> {
        if sources.is_empty() {
            return Err(SampleError::Empty);
        }
        for (j, s) in sources.iter().enumerate() {
            if s.is_empty() {
                return Err(SampleError::EmptySource(j));
            }
            if let Some(row) = s.iter().position(|v| !v.is_finite()) {
                return Err(SampleError::NonFinite { row, col: j });
            }
        }
        Ok(Self { sources })
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn source(&self, j: usize) -> &[f64] {
        &self.sources[j]
    }

    pub fn sources(&self) -> &[Vec<f64>] {
        &self.sources
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sources.iter().map(Vec::len).collect()
    }
}

/// Resample each source to its own size; source `j` uses `seed.with_source(j)`.
pub fn resample_multi(sample: &MultiSourceSample, seed: SeedSpec) -> MultiSourceSample {
    let sources = sample
        .sources
        .iter()
        .enumerate()
        .map(|(j, s)| {
            draw_indices(s.len(), seed.with_source(j as u64))
                .into_iter()
                .map(|i| s[i])
                .collect()
        })
        .collect();
    MultiSourceSample { sources }
}
