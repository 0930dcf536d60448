use super::{Result, StatsError};

/// Empirical distribution over a finite sample, stored sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    /// Builds the ECDF; rejects empty input and NaN.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(StatsError::Degenerate("ECDF of an empty sample"));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(StatsError::Degenerate("ECDF input contains NaN"));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    /// `F(x)`: fraction of stored values `≤ x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let count = self.sorted.partition_point(|v| *v <= x);
        count as f64 / self.sorted.len() as f64
    }

    /// `F^{-1}(q) = inf{x : F(x) ≥ q}` restricted to stored values; `q = 0`
    /// returns the minimum.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(StatsError::Domain {
                name: "q",
                value: q,
                domain: "[0, 1]",
            });
        }
        Ok(self.sorted[self.quantile_index(q)])
    }

    /// Same as [`Ecdf::quantile`] but maps `q ≤ 0` to `-inf` and `q > 1` to
    /// `+inf`, matching the inf-definition outside the unit interval.
    pub fn quantile_extended(&self, q: f64) -> f64 {
        if q <= 0.0 {
            f64::NEG_INFINITY
        } else if q > 1.0 {
            f64::INFINITY
        } else {
            self.sorted[self.quantile_index(q)]
        }
    }

    fn quantile_index(&self, q: f64) -> usize {
        let m = self.sorted.len();
        let mf = m as f64;
        // Smallest k with (k + 1) / m >= q, evaluated with the same division as `cdf`.
        let mut k = ((q * mf).ceil() as usize).saturating_sub(1).min(m - 1);
        while k > 0 && (k as f64) / mf >= q {
            k -= 1;
        }
        while k + 1 < m && ((k + 1) as f64) / mf < q {
            k += 1;
        }
        k
    }

    /// `sup_x |F_self(x) - F_other(x)|`, evaluated over the merged support
    /// where both step functions attain their jumps.
    pub fn sup_distance(&self, other: &Ecdf) -> f64 {
        let (a, b) = (&self.sorted, &other.sorted);
        let (ma, mb) = (a.len() as f64, b.len() as f64);
        let (mut i, mut j) = (0usize, 0usize);
        let mut best = 0.0f64;
        while i < a.len() || j < b.len() {
            let x = match (a.get(i), b.get(j)) {
                (Some(&u), Some(&v)) => u.min(v),
                (Some(&u), None) => u,
                (None, Some(&v)) => v,
                (None, None) => unreachable!(),
            };
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            best = best.max((i as f64 / ma - j as f64 / mb).abs());
        }
        best
    }
}

/// Inf-definition quantile of a sample.
pub fn empirical_quantile(ecdf: &Ecdf, q: f64) -> Result<f64> {
    ecdf.quantile(q)
}
