//! Gauss rules from symmetric Jacobi matrices, tensor Gauss–Hermite rules, and
//! composite Gauss–Legendre integration.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of tensor nodes.
pub const DEFAULT_NODE_BUDGET: u128 = 1_000_000;

/// Tensor-product rule integrating against the standard Gaussian measure on `R^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    dimension: usize,
    order: usize,
    /// Flattened `len × dimension` node coordinates.
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Tensor Gauss–Hermite rule with `q` nodes per axis.
    pub fn gauss_hermite(k: usize, q: usize) -> Result<Self> {
        Self::gauss_hermite_with_budget(k, q, DEFAULT_NODE_BUDGET)
    }

    pub fn gauss_hermite_with_budget(k: usize, q: usize, budget: u128) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("dimension", "must be at least 1"));
        }
        if q == 0 {
            return Err(Error::param("order", "must be at least 1"));
        }
        let total = (q as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if total > budget {
            return Err(Error::BudgetExceeded { what: "quadrature rule", required: total, budget });
        }
        let (x1, w1) = gauss_hermite_1d(q);
        let total = total as usize;
        let mut nodes = Vec::with_capacity(total * k);
        let mut weights = Vec::with_capacity(total);
        let mut digits = vec![0usize; k];
        for _ in 0..total {
            let mut w = 1.0;
            for &d in &digits {
                nodes.push(x1[d]);
                w *= w1[d];
            }
            weights.push(w);
            for a in (0..k).rev() {
                digits[a] += 1;
                if digits[a] < q {
                    break;
                }
                digits[a] = 0;
            }
        }
        Ok(QuadratureRule { dimension: k, order: q, nodes, weights })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks_exact(self.dimension)
    }

    /// `Σ_i w_i f(x_i)`.
    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.nodes().zip(&self.weights).map(|(x, &w)| w * f(x)).sum()
    }
}

/// `quadrature_rule(k, q)` under the default node budget.
pub fn quadrature_rule(k: usize, q: usize) -> Result<QuadratureRule> {
    QuadratureRule::gauss_hermite(k, q)
}

/// Gauss rule for the measure whose orthonormal polynomials satisfy
/// `x p_n = b_{n+1} p_{n+1} + b_n p_{n-1}` (zero diagonal), total mass `mu0`.
/// `b[i]` holds `b_{i+1}`.
fn golub_welsch(b: &[f64], mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let q = b.len() + 1;
    let mut jac = DMatrix::<f64>::zeros(q, q);
    for (i, &bi) in b.iter().enumerate() {
        jac[(i, i + 1)] = bi;
        jac[(i + 1, i)] = bi;
    }
    let eig = jac.symmetric_eigen();
    let mut x: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let p0 = 1.0 / mu0.sqrt();
    let eval = |t: f64| -> (f64, f64, f64) {
        // (p_q(t), p_q'(t), Σ_{j<q} p_j(t)²)
        let (mut pm, mut p) = (0.0, p0);
        let (mut dm, mut d) = (0.0, 0.0);
        let mut sum = p * p;
        for n in 0..q {
            let bn = if n == 0 { 0.0 } else { b[n - 1] };
            let bn1 = if n < q - 1 { b[n] } else { next_coefficient(b) };
            let pn = (t * p - bn * pm) / bn1;
            let dn = (p + t * d - bn * dm) / bn1;
            pm = p;
            p = pn;
            dm = d;
            d = dn;
            if n < q - 1 {
                sum += p * p;
            }
        }
        (p, d, sum)
    };

    for xi in x.iter_mut() {
        for _ in 0..3 {
            let (p, d, _) = eval(*xi);
            if d == 0.0 {
                break;
            }
            let step = p / d;
            *xi -= step;
            if step.abs() < 1e-16 * xi.abs().max(1.0) {
                break;
            }
        }
    }
    // exact symmetry of the measure
    for i in 0..q / 2 {
        let s = 0.5 * (x[q - 1 - i] - x[i]);
        x[i] = -s;
        x[q - 1 - i] = s;
    }
    if q % 2 == 1 {
        x[q / 2] = 0.0;
    }
    let mut w: Vec<f64> = x.iter().map(|&t| 1.0 / eval(t).2).collect();
    for i in 0..q / 2 {
        let m = 0.5 * (w[i] + w[q - 1 - i]);
        w[i] = m;
        w[q - 1 - i] = m;
    }
    let total: f64 = w.iter().sum();
    for wi in w.iter_mut() {
        *wi *= mu0 / total;
    }
    (x, w)
}

// b_q is only needed to scale p_q, whose roots do not depend on it; any positive value works.
fn next_coefficient(b: &[f64]) -> f64 {
    b.last().copied().unwrap_or(1.0)
}

/// Gauss–Hermite nodes and weights for the standard normal density.
pub fn gauss_hermite_1d(q: usize) -> (Vec<f64>, Vec<f64>) {
    if q == 1 {
        return (vec![0.0], vec![1.0]);
    }
    let b: Vec<f64> = (1..q).map(|i| (i as f64).sqrt()).collect();
    golub_welsch(&b, 1.0)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre_1d(q: usize) -> (Vec<f64>, Vec<f64>) {
    if q == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let b: Vec<f64> = (1..q)
        .map(|i| {
            let n = i as f64;
            n / (4.0 * n * n - 1.0).sqrt()
        })
        .collect();
    golub_welsch(&b, 2.0)
}

pub(crate) const PANEL_ORDER: usize = 20;

pub(crate) fn legendre_panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre_1d(PANEL_ORDER))
}

/// Composite 20-point Gauss–Legendre over `[a, b]` with panels no wider than `width`.
pub(crate) fn composite_legendre<F: FnMut(f64) -> f64>(a: f64, b: f64, width: f64, mut f: F) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (x, w) = legendre_panel_rule();
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(w) {
            s += wi * f(mid + 0.5 * h * xi);
        }
        total += 0.5 * h * s;
    }
    total
}
