use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stability::DistributionMatrix;

/// `Σ_ij d_ij (s_ij − z_ij)²` over `m × m` matrices `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ObjectiveJson", into = "ObjectiveJson")]
pub struct QuadraticObjective {
    m: usize,
    d: Vec<f64>,
    z: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectiveJson {
    d: Vec<Vec<f64>>,
    z: Vec<Vec<f64>>,
}

fn square(rows: &[Vec<f64>], what: &str) -> Result<(usize, Vec<f64>)> {
    let m = rows.len();
    if m < 2 {
        return Err(Error::Format(format!("{what} must be at least 2 × 2")));
    }
    let mut flat = Vec::with_capacity(m * m);
    for r in rows {
        if r.len() != m {
            return Err(Error::Format(format!("{what} is not square")));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format(format!("{what} has a non-finite entry")));
        }
        flat.extend_from_slice(r);
    }
    Ok((m, flat))
}

impl QuadraticObjective {
    /// Weights `d` must be strictly positive.
    pub fn new(d: Vec<Vec<f64>>, z: Vec<Vec<f64>>) -> Result<Self> {
        let (m, d) = square(&d, "weight matrix")?;
        let (mz, z) = square(&z, "target matrix")?;
        if mz != m {
            return Err(Error::DimensionMismatch { expected: m, found: mz });
        }
        if let Some(bad) = d.iter().find(|&&v| v <= 0.0) {
            return Err(Error::Format(format!("weight {bad} is not strictly positive")));
        }
        Ok(QuadraticObjective { m, d, z })
    }

    /// All weights one.
    pub fn unweighted(z: Vec<Vec<f64>>) -> Result<Self> {
        let m = z.len();
        Self::new(vec![vec![1.0; m]; m], z)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.m + j]
    }

    pub fn z(&self, i: usize, j: usize) -> f64 {
        self.z[i * self.m + j]
    }

    pub fn value(&self, s: &DistributionMatrix) -> Result<f64> {
        if s.m() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, found: s.m() });
        }
        Ok(self.value_raw(s.entries()))
    }

    pub(crate) fn value_raw(&self, s: &[f64]) -> f64 {
        s.iter().zip(&self.d).zip(&self.z).map(|((s, d), z)| d * (s - z) * (s - z)).sum()
    }

    // e_ij = d_ij (s_ij − z_ij)
    pub(crate) fn residuals(&self, s: &[f64]) -> Vec<f64> {
        s.iter().zip(&self.d).zip(&self.z).map(|((s, d), z)| d * (s - z)).collect()
    }
}

impl TryFrom<ObjectiveJson> for QuadraticObjective {
    type Error = Error;

    fn try_from(j: ObjectiveJson) -> Result<Self> {
        QuadraticObjective::new(j.d, j.z)
    }
}

impl From<QuadraticObjective> for ObjectiveJson {
    fn from(o: QuadraticObjective) -> Self {
        ObjectiveJson { d: o.d.chunks(o.m).map(<[f64]>::to_vec).collect(), z: o.z.chunks(o.m).map(<[f64]>::to_vec).collect() }
    }
}

/// The coefficient tensors `u_ijk` and `u′_ijk`.
#[derive(Debug, Clone, PartialEq)]
pub struct UCoefficients {
    m: usize,
    u: Vec<f64>,
    u_prime: Vec<f64>,
}

impl UCoefficients {
    pub fn m(&self) -> usize {
        self.m
    }

    /// `u_ijk = d_ki(s_ki − z_ki) − d_kj(s_kj − z_kj)`.
    pub fn u(&self, i: usize, j: usize, k: usize) -> f64 {
        self.u[(i * self.m + j) * self.m + k]
    }

    /// `u′_ijk = d_ik(s_ik − z_ik) − d_jk(s_jk − z_jk)`.
    pub fn u_prime(&self, i: usize, j: usize, k: usize) -> f64 {
        self.u_prime[(i * self.m + j) * self.m + k]
    }

    pub(crate) fn u_row(&self, i: usize, j: usize) -> &[f64] {
        let b = (i * self.m + j) * self.m;
        &self.u[b..b + self.m]
    }

    pub(crate) fn u_prime_row(&self, i: usize, j: usize) -> &[f64] {
        let b = (i * self.m + j) * self.m;
        &self.u_prime[b..b + self.m]
    }
}

pub fn u_coefficients(s: &DistributionMatrix, obj: &QuadraticObjective) -> Result<UCoefficients> {
    if s.m() != obj.m() {
        return Err(Error::DimensionMismatch { expected: obj.m(), found: s.m() });
    }
    Ok(u_from_residuals(obj.m(), &obj.residuals(s.entries())))
}

pub(crate) fn u_from_residuals(m: usize, e: &[f64]) -> UCoefficients {
    let mut u = vec![0.0; m * m * m];
    let mut u_prime = vec![0.0; m * m * m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let at = (i * m + j) * m + k;
                u[at] = e[k * m + i] - e[k * m + j];
                u_prime[at] = e[i * m + k] - e[j * m + k];
            }
        }
    }
    UCoefficients { m, u, u_prime }
}
