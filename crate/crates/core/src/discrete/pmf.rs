use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// A joint distribution on `{1,…,p} × {1,…,p'}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JointPmfJson", into = "JointPmfJson")]
pub struct JointPmf {
    alphabet_x: usize,
    alphabet_y: usize,
    mass: Vec<f64>,
    px: Vec<f64>,
    py: Vec<f64>,
}

impl JointPmf {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let p = rows.len();
        if p == 0 {
            return Err(Error::InvalidPmf("empty mass table".into()));
        }
        let q = rows[0].len();
        if q == 0 || rows.iter().any(|r| r.len() != q) {
            return Err(Error::InvalidPmf("rows have different lengths".into()));
        }
        Self::from_flat(p, q, rows.into_iter().flatten().collect())
    }

    pub fn from_flat(alphabet_x: usize, alphabet_y: usize, mass: Vec<f64>) -> Result<Self> {
        if alphabet_x == 0 || alphabet_y == 0 || mass.len() != alphabet_x * alphabet_y {
            return Err(Error::InvalidPmf(format!("expected {}×{} entries", alphabet_x, alphabet_y)));
        }
        if let Some(bad) = mass.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidPmf(format!("entry {bad} is negative or non-finite")));
        }
        let s: f64 = mass.iter().sum();
        if (s - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidPmf(format!("mass sums to {s}")));
        }
        let px = (0..alphabet_x).map(|i| mass[i * alphabet_y..(i + 1) * alphabet_y].iter().sum()).collect();
        let py = (0..alphabet_y).map(|j| (0..alphabet_x).map(|i| mass[i * alphabet_y + j]).sum()).collect();
        Ok(JointPmf { alphabet_x, alphabet_y, mass, px, py })
    }

    pub fn alphabet_x(&self) -> usize {
        self.alphabet_x
    }

    pub fn alphabet_y(&self) -> usize {
        self.alphabet_y
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.mass[x * self.alphabet_y + y]
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn marginal_x(&self) -> &[f64] {
        &self.px
    }

    pub fn marginal_y(&self) -> &[f64] {
        &self.py
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.mass.chunks_exact(self.alphabet_y).map(<[f64]>::to_vec).collect()
    }

    /// Drops symbols of zero marginal probability.
    pub fn normalized(&self) -> JointPmf {
        let xs: Vec<usize> = (0..self.alphabet_x).filter(|&i| self.px[i] > 0.0).collect();
        let ys: Vec<usize> = (0..self.alphabet_y).filter(|&j| self.py[j] > 0.0).collect();
        let mass = xs.iter().flat_map(|&i| ys.iter().map(move |&j| (i, j))).map(|(i, j)| self.get(i, j)).collect();
        let px = xs.iter().map(|&i| self.px[i]).collect();
        let py = ys.iter().map(|&j| self.py[j]).collect();
        JointPmf { alphabet_x: xs.len(), alphabet_y: ys.len(), mass, px, py }
    }

    /// Pushes the distribution through `x ↦ phi[x]`, `y ↦ psi[y]`.
    pub fn coarsen(&self, phi: &[usize], psi: &[usize]) -> Result<JointPmf> {
        if phi.len() != self.alphabet_x || psi.len() != self.alphabet_y {
            return Err(Error::DimensionMismatch { expected: self.alphabet_x, found: phi.len() });
        }
        let p = phi.iter().max().map_or(0, |v| v + 1);
        let q = psi.iter().max().map_or(0, |v| v + 1);
        let mut mass = vec![0.0; p * q];
        for x in 0..self.alphabet_x {
            for y in 0..self.alphabet_y {
                mass[phi[x] * q + psi[y]] += self.get(x, y);
            }
        }
        JointPmf::from_flat(p, q, mass)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JointPmfJson {
    alphabet_x: usize,
    alphabet_y: usize,
    mass: Vec<Vec<f64>>,
}

impl TryFrom<JointPmfJson> for JointPmf {
    type Error = Error;
    fn try_from(j: JointPmfJson) -> Result<Self> {
        if j.mass.len() != j.alphabet_x || j.mass.iter().any(|r| r.len() != j.alphabet_y) {
            return Err(Error::InvalidPmf(format!("mass is not {}×{}", j.alphabet_x, j.alphabet_y)));
        }
        JointPmf::new(j.mass)
    }
}

impl From<JointPmf> for JointPmfJson {
    fn from(p: JointPmf) -> Self {
        JointPmfJson { alphabet_x: p.alphabet_x, alphabet_y: p.alphabet_y, mass: p.rows() }
    }
}

/// Hirschfeld–Gebelein–Rényi maximal correlation: the second singular value of
/// `P(x, y)/√(p_X(x) p_Y(y))`. Zero when either marginal is a point mass.
pub fn maximal_correlation(pmf: &JointPmf) -> Result<f64> {
    let p = pmf.normalized();
    if p.alphabet_x < 2 || p.alphabet_y < 2 {
        return Ok(0.0);
    }
    let q = DMatrix::from_fn(p.alphabet_x, p.alphabet_y, |i, j| p.get(i, j) / (p.px[i] * p.py[j]).sqrt());
    let svd = q.svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("singular value decomposition failed".into()));
    }
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s.get(1).copied().unwrap_or(0.0).clamp(0.0, 1.0))
}

/// Smallest nonzero atom probability.
pub fn alpha_min(pmf: &JointPmf) -> Result<f64> {
    pmf.mass
        .iter()
        .copied()
        .filter(|&v| v > 0.0)
        .min_by(f64::total_cmp)
        .ok_or_else(|| Error::InvalidPmf("no positive atoms".into()))
}
