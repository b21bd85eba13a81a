//! Joint distributions on `{1,…,m}²`.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NEG_TOL: f64 = 1e-10;
const SUM_TOL: f64 = 1e-9;
const WARN_BELOW: f64 = -1e-6;

/// An `m × m` probability matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct DistributionMatrix {
    m: usize,
    entries: Vec<f64>,
}

impl DistributionMatrix {
    /// Validates rows; entries down to `-1e-10` are accepted and clamped to zero.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidDistribution("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidDistribution(format!("matrix must be square {m}×{m}")));
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        Self::from_entries(m, entries)
    }

    pub fn from_entries(m: usize, mut entries: Vec<f64>) -> Result<Self> {
        if m == 0 || entries.len() != m * m {
            return Err(Error::InvalidDistribution(format!("expected {} entries, found {}", m * m, entries.len())));
        }
        if let Some(bad) = entries.iter().find(|e| !e.is_finite() || **e < -NEG_TOL) {
            return Err(Error::InvalidDistribution(format!("entry {bad} is negative or non-finite")));
        }
        let s: f64 = entries.iter().sum();
        if (s - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {s}")));
        }
        for e in entries.iter_mut() {
            *e = e.max(0.0);
        }
        Ok(DistributionMatrix { m, entries })
    }

    /// Wraps a computed matrix: negative round-off is clamped (with a warning when
    /// significant) and the total is checked.
    pub(crate) fn from_computed(m: usize, mut entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::Numerical("non-finite entry in computed matrix".into()));
        }
        for e in entries.iter_mut() {
            if *e < WARN_BELOW {
                warn!("clamping computed entry {e} to zero");
            }
            *e = e.max(0.0);
        }
        let s: f64 = entries.iter().sum();
        if (s - 1.0).abs() > SUM_TOL {
            return Err(Error::Numerical(format!("computed matrix sums to {s}")));
        }
        Ok(DistributionMatrix { m, entries })
    }

    /// Outer product `a bᵀ` of two probability vectors.
    pub fn product(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
        }
        let entries = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        Self::from_entries(a.len(), entries)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.m + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks_exact(self.m).map(<[f64]>::to_vec).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.entries.chunks_exact(self.m).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.m).map(|j| (0..self.m).map(|i| self.get(i, j)).sum()).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for DistributionMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        DistributionMatrix::new(rows)
    }
}

impl From<DistributionMatrix> for Vec<Vec<f64>> {
    fn from(d: DistributionMatrix) -> Self {
        d.rows()
    }
}

/// Total variation distance, half the entrywise ℓ1 distance.
pub fn tv_distance(p: &DistributionMatrix, q: &DistributionMatrix) -> Result<f64> {
    if p.m != q.m {
        return Err(Error::DimensionMismatch { expected: p.m, found: q.m });
    }
    Ok(tv_raw(&p.entries, &q.entries))
}

/// Entrywise ℓ2 distance.
pub fn l2_distance(p: &DistributionMatrix, q: &DistributionMatrix) -> Result<f64> {
    if p.m != q.m {
        return Err(Error::DimensionMismatch { expected: p.m, found: q.m });
    }
    Ok(p.entries.iter().zip(&q.entries).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

#[inline]
pub(crate) fn tv_raw(a: &[f64], b: &[f64]) -> f64 {
    (0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(DistributionMatrix::new(vec![vec![0.5, 0.5], vec![0.0, 0.0]]).is_ok());
        assert!(DistributionMatrix::new(vec![vec![0.5, 0.5], vec![0.1, 0.0]]).is_err());
        assert!(DistributionMatrix::new(vec![vec![1.0, 0.0]]).is_err());
        assert!(DistributionMatrix::new(vec![vec![1.1, -0.1], vec![0.0, 0.0]]).is_err());
        let d = DistributionMatrix::new(vec![vec![1.0 + 5e-11, -5e-11], vec![0.0, 0.0]]).unwrap();
        assert_eq!(d.get(0, 1), 0.0);
    }

    #[test]
    fn tv_shape_mismatch() {
        let a = DistributionMatrix::new(vec![vec![1.0]]).unwrap();
        let b = DistributionMatrix::new(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(tv_distance(&a, &b).is_err());
    }
}
