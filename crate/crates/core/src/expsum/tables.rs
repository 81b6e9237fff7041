use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bump::BumpSpec;
use crate::error::{Error, Result};

/// Sieve weights `lambda(d)` for `1 <= d <= level`, stored densely.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightTable {
    /// `values[d]`; index 0 is unused and always zero.
    values: Vec<f64>,
}

impl WeightTable {
    /// `lambda(1) = 1` and nothing else.
    pub fn unit() -> Self {
        WeightTable {
            values: vec![0.0, 1.0],
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        let mut values = vec![0.0; 2];
        for (d, w) in pairs {
            if d == 0 {
                return Err(Error::domain("weight index 0"));
            }
            if d as usize >= values.len() {
                values.resize(d as usize + 1, 0.0);
            }
            values[d as usize] = w;
        }
        Ok(WeightTable { values })
    }

    pub fn level(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn get(&self, d: u64) -> f64 {
        self.values.get(d as usize).copied().unwrap_or(0.0)
    }

    /// `(d, lambda(d))` for every nonzero weight, ascending in `d`.
    pub fn nonzero(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(d, w)| (d as u64, *w))
    }

    /// `sum_d |lambda(d)|`.
    pub fn abs_sum(&self) -> f64 {
        self.values.iter().map(|w| w.abs()).sum()
    }
}

/// Coefficients `c(k)` for `0 < |k| <= K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub entries: Vec<(i64, Complex64)>,
    /// `2 c(k)` for `k = 1..=K` when `c` is real and even, enabling a
    /// cosine-series evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cosine: Option<Vec<f64>>,
}

impl CoefficientTable {
    pub fn empty() -> Self {
        CoefficientTable {
            entries: Vec::new(),
            cosine: None,
        }
    }

    pub fn single(k: i64, c: Complex64) -> Result<Self> {
        Self::new(vec![(k, c)])
    }

    pub fn new(entries: Vec<(i64, Complex64)>) -> Result<Self> {
        if entries.iter().any(|(k, _)| *k == 0) {
            return Err(Error::domain("coefficient table contains k = 0"));
        }
        Ok(CoefficientTable {
            entries,
            cosine: None,
        })
    }

    /// `c(k)` of a bump for `0 < |k| <= K`, divided by `scale`.
    /// With `scale = delta` the entries satisfy `|c(k)| <= 1`.
    pub fn from_bump(bump: &BumpSpec, scale: f64) -> Self {
        let n = bump.k_max() as i64;
        let mut entries = Vec::with_capacity(2 * n as usize);
        for k in (-n..=n).filter(|k| *k != 0) {
            let c = bump.coefficients[k.unsigned_abs() as usize] / scale;
            entries.push((k, Complex64::new(c, 0.0)));
        }
        let cosine = (1..=n as usize)
            .map(|k| 2.0 * bump.coefficients[k] / scale)
            .collect();
        CoefficientTable {
            entries,
            cosine: Some(cosine),
        }
    }

    pub fn k_max(&self) -> u64 {
        self.entries
            .iter()
            .map(|(k, _)| k.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn abs_sum(&self) -> f64 {
        self.entries.iter().map(|(_, c)| c.norm()).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
