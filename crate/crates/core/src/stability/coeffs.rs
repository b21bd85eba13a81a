//! Hermite coefficient tables of cell functions and the contractions built on them.

use serde::{Deserialize, Serialize};

use super::cell::CellFunction;
use super::crho::contract;
use super::matrix::DistributionMatrix;
use crate::error::{Error, Result};
use crate::gauss::{hermite_all, std_cdf, std_pdf, Correlation, MultiIndex};

/// Work cap for `(d + 1)^k · cells` in coefficient extraction.
pub const COEFF_WORK_BUDGET: u128 = 1 << 32;

/// Coefficients `∫ f h_j dγ` for all `‖j‖₁ ≤ cap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermiteCoefficients {
    dimension: usize,
    cap: usize,
    m: usize,
    indices: Vec<MultiIndex>,
    /// `indices.len() × m`, row-major.
    table: Vec<f64>,
}

impl HermiteCoefficients {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Coefficient vector of the `n`-th index in [`Self::indices`].
    pub fn coefficient(&self, n: usize) -> &[f64] {
        &self.table[n * self.m..(n + 1) * self.m]
    }

    /// Coefficient vector of a multi-index, if within the cap.
    pub fn get(&self, j: &MultiIndex) -> Option<&[f64]> {
        self.indices.iter().position(|i| i == j).map(|n| self.coefficient(n))
    }

    /// The zero-index coefficient, i.e. the mean vector.
    pub fn mean(&self) -> &[f64] {
        self.coefficient(0)
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.cap != other.cap {
            return Err(Error::CapMismatch(self.cap, other.cap));
        }
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, found: other.dimension });
        }
        if self.m != other.m {
            return Err(Error::DimensionMismatch { expected: self.m, found: other.m });
        }
        Ok(())
    }
}

/// Exact Hermite coefficients of a cell function up to total degree `cap`.
///
/// On an interval `[a, b)`, `∫ h_0 dγ = Φ(b) − Φ(a)` and for `n ≥ 1`
/// `∫ h_n dγ = −(h_{n−1}(b)φ(b) − h_{n−1}(a)φ(a)) / √n`; products over axes follow by
/// separability.
pub fn hermite_coeffs(f: &CellFunction, cap: usize) -> Result<HermiteCoefficients> {
    let grid = f.grid();
    let k = grid.dimension();
    let n = grid.axis_len();
    let width = (cap + 1) as u128;
    let work = width.checked_pow(k as u32).and_then(|w| w.checked_mul(grid.cell_count() as u128)).unwrap_or(u128::MAX);
    if work > COEFF_WORK_BUDGET {
        return Err(Error::BudgetExceeded { what: "hermite coefficients", required: work, budget: COEFF_WORK_BUDGET });
    }
    let edges = grid.axis_edges();
    // boundary terms h_{n}(e) φ(e) for n < cap at each edge
    let edge_terms: Vec<Vec<f64>> = edges
        .iter()
        .map(|&e| {
            if e.is_finite() {
                let d = std_pdf(e);
                hermite_all(cap, e).into_iter().map(|h| h * d).collect()
            } else {
                vec![0.0; cap + 1]
            }
        })
        .collect();
    // per-axis (cap+1) × n matrix I[l][p]
    let mut integ = vec![0.0; (cap + 1) * n];
    for p in 0..n {
        let (a, b) = (edges[p], edges[p + 1]);
        integ[p] = if a >= 0.0 { std_cdf(-a) - std_cdf(-b) } else { std_cdf(b) - std_cdf(a) };
        for l in 1..=cap {
            integ[l * n + p] = -(edge_terms[p + 1][l - 1] - edge_terms[p][l - 1]) / (l as f64).sqrt();
        }
    }
    let m = f.m();
    let full = contract(&integ, cap + 1, n, k, f.values(), m);
    let indices = MultiIndex::up_to_degree(k, cap);
    let mut table = Vec::with_capacity(indices.len() * m);
    for j in &indices {
        let flat = j.entries().iter().fold(0usize, |acc, &e| acc * (cap + 1) + e);
        table.extend_from_slice(&full[flat * m..(flat + 1) * m]);
    }
    Ok(HermiteCoefficients { dimension: k, cap, m, indices, table })
}

/// Raw truncated contraction `Σ_ℓ ρ^{‖ℓ‖₁} F_i(ℓ) G_j(ℓ)`, rows of the `m × m` result.
pub fn crho_contract_raw(f: &HermiteCoefficients, g: &HermiteCoefficients, rho: Correlation) -> Result<Vec<Vec<f64>>> {
    f.check_compatible(g)?;
    let m = f.m;
    let r = rho.value();
    let powers: Vec<f64> = (0..=f.cap).map(|d| r.powi(d as i32)).collect();
    let mut c = vec![0.0; m * m];
    for (n, j) in f.indices.iter().enumerate() {
        let w = powers[j.degree()];
        let (fv, gv) = (f.coefficient(n), g.coefficient(n));
        for i in 0..m {
            for jj in 0..m {
                c[i * m + jj] += w * fv[i] * gv[jj];
            }
        }
    }
    Ok(c.chunks_exact(m).map(<[f64]>::to_vec).collect())
}

/// `C_ρ(f, g)` from truncated Hermite tables.
///
/// Truncation can leave small negative entries; these are clamped to zero and the matrix
/// is rescaled to unit mass.
pub fn crho_from_coeffs(f: &HermiteCoefficients, g: &HermiteCoefficients, rho: Correlation) -> Result<DistributionMatrix> {
    let raw: Vec<f64> = crho_contract_raw(f, g, rho)?.into_iter().flatten().map(|v| v.max(0.0)).collect();
    let total: f64 = raw.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::Numerical("coefficient contraction has no positive mass".into()));
    }
    DistributionMatrix::from_computed(f.m, raw.into_iter().map(|v| v / total).collect())
}

/// `d_ρ(f, g) = (Σ_ℓ |ρ|^{‖ℓ‖₁} ‖F(ℓ) − G(ℓ)‖²)^{1/2}`, truncated at the shared cap.
pub fn drho_metric(f: &HermiteCoefficients, g: &HermiteCoefficients, rho: Correlation) -> Result<f64> {
    f.check_compatible(g)?;
    let r = rho.abs();
    let mut s = 0.0;
    for (n, j) in f.indices.iter().enumerate() {
        let w = r.powi(j.degree() as i32);
        let d: f64 = f.coefficient(n).iter().zip(g.coefficient(n)).map(|(a, b)| (a - b) * (a - b)).sum();
        s += w * d;
    }
    Ok(s.sqrt())
}

/// Plain ℓ2 distance between truncated coefficient tables.
pub fn coeff_distance(f: &HermiteCoefficients, g: &HermiteCoefficients) -> Result<f64> {
    f.check_compatible(g)?;
    Ok(f.table.iter().zip(&g.table).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}
