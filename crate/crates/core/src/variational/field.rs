//! Closed-form `T_ρ` of label indicators on a grid.

use crate::gauss::{std_cdf, std_pdf, Correlation};
use crate::stability::CellGrid;

pub(crate) const GRADIENT_STEP: f64 = 1e-4;

/// `P(a ≤ mean + σZ < b)`.
pub(crate) fn interval_mass(a: f64, b: f64, mean: f64, sigma: f64) -> f64 {
    if a.is_finite() && a > mean {
        let ua = std_cdf((mean - a) / sigma);
        let ub = if b.is_finite() { std_cdf((mean - b) / sigma) } else { 0.0 };
        (ua - ub).max(0.0)
    } else {
        let ca = if a.is_finite() { std_cdf((a - mean) / sigma) } else { 0.0 };
        let cb = if b.is_finite() { std_cdf((b - mean) / sigma) } else { 1.0 };
        (cb - ca).max(0.0)
    }
}

fn interval_mass_dx(a: f64, b: f64, x: f64, rho: f64, sigma: f64) -> f64 {
    let mean = rho * x;
    let pa = if a.is_finite() { std_pdf((a - mean) / sigma) } else { 0.0 };
    let pb = if b.is_finite() { std_pdf((b - mean) / sigma) } else { 0.0 };
    rho / sigma * (pa - pb)
}

/// `(T_ρ 1_{label = l})(x)` for every label `l`.
pub(crate) fn label_masses(grid: &CellGrid, labels: &[usize], m: usize, rho: Correlation, x: &[f64]) -> Vec<f64> {
    let edges = grid.axis_edges();
    let n = grid.axis_len();
    let (r, sigma) = (rho.value(), rho.sigma());
    let per_axis: Vec<Vec<f64>> =
        x.iter().map(|&xa| (0..n).map(|i| interval_mass(edges[i], edges[i + 1], r * xa, sigma)).collect()).collect();
    product_sum(&per_axis, labels, m, n)
}

/// `d/dx (T_ρ 1_{label = l})(x)` in one dimension.
pub(crate) fn label_mass_derivatives(grid: &CellGrid, labels: &[usize], m: usize, rho: Correlation, x: f64) -> Vec<f64> {
    let edges = grid.axis_edges();
    let (r, sigma) = (rho.value(), rho.sigma());
    let mut out = vec![0.0; m];
    for (i, &l) in labels.iter().enumerate() {
        out[l] += interval_mass_dx(edges[i], edges[i + 1], x, r, sigma);
    }
    out
}

fn product_sum(per_axis: &[Vec<f64>], labels: &[usize], m: usize, n: usize) -> Vec<f64> {
    let k = per_axis.len();
    let mut out = vec![0.0; m];
    let mut idx = vec![0usize; k];
    for &l in labels {
        let p: f64 = idx.iter().zip(per_axis).map(|(&i, a)| a[i]).product();
        out[l] += p;
        for a in (0..k).rev() {
            idx[a] += 1;
            if idx[a] < n {
                break;
            }
            idx[a] = 0;
        }
    }
    out
}

/// `T_ρ(Σ_l coeffs_l 1_{label = l})(x)`.
pub(crate) fn field(grid: &CellGrid, labels: &[usize], coeffs: &[f64], rho: Correlation, x: &[f64]) -> f64 {
    label_masses(grid, labels, coeffs.len(), rho, x).iter().zip(coeffs).map(|(a, b)| a * b).sum()
}

/// Central difference of the one-dimensional field.
pub(crate) fn field_slope(grid: &CellGrid, labels: &[usize], coeffs: &[f64], rho: Correlation, x: f64) -> f64 {
    let h = GRADIENT_STEP;
    (field(grid, labels, coeffs, rho, &[x + h]) - field(grid, labels, coeffs, rho, &[x - h])) / (2.0 * h)
}
