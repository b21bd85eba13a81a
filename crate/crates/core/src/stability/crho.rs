//! The noise-stability matrix `C_ρ(f, g)_{ij} = ∫ f_i T_ρ g_j dγ` for cell functions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cell::{CellFunction, CellGrid};
use super::matrix::DistributionMatrix;
use crate::error::{Error, Result};
use crate::gauss::{gauss_legendre_1d, std_cdf, std_pdf, Correlation};

/// Gauss–Legendre points per panel used by default.
pub const DEFAULT_PANEL_ORDER: usize = 20;

const TAIL_CUTOFF: f64 = 9.5;
const MC_SHARD: usize = 1 << 14;

/// Minimum Monte Carlo sample count.
pub const MIN_MC_SAMPLES: usize = 1000;

/// Per-axis cell probabilities `Φ(b) − Φ(a)`.
pub fn axis_probabilities(grid: &CellGrid) -> Vec<f64> {
    let e = grid.axis_edges();
    e.windows(2).map(|w| cell_mass(w[0], w[1])).collect()
}

fn cell_mass(a: f64, b: f64) -> f64 {
    // use the tail that avoids cancellation
    if a >= 0.0 {
        std_cdf(-a) - std_cdf(-b)
    } else {
        std_cdf(b) - std_cdf(a)
    }
}

/// Per-axis joint cell masses `M[p][q] = P(X_a ∈ p, Y_a ∈ q)` for one coordinate of a
/// `ρ`-correlated pair, computed by Gauss–Legendre in `x` with the inner `z`-integral of
/// the step function taken in closed form.
#[derive(Debug, Clone)]
pub struct RectangleTable {
    grid_x: CellGrid,
    grid_y: CellGrid,
    rho: Correlation,
    rows: usize,
    cols: usize,
    mass: Vec<f64>,
    mass_t: Vec<f64>,
}

impl RectangleTable {
    pub fn new(grid_x: &CellGrid, grid_y: &CellGrid, rho: Correlation) -> Result<Self> {
        Self::with_order(grid_x, grid_y, rho, DEFAULT_PANEL_ORDER)
    }

    /// Uses `order` Gauss–Legendre points on each panel.
    pub fn with_order(grid_x: &CellGrid, grid_y: &CellGrid, rho: Correlation, order: usize) -> Result<Self> {
        if grid_x.dimension() != grid_y.dimension() {
            return Err(Error::DimensionMismatch { expected: grid_x.dimension(), found: grid_y.dimension() });
        }
        if order == 0 {
            return Err(Error::param("order", "must be at least 1"));
        }
        let (gx, gw) = gauss_legendre_1d(order);
        let r = rho.value();
        let sigma = rho.sigma();
        let ex = grid_x.axis_edges();
        let ey = grid_y.axis_edges();
        let (rows, cols) = (ex.len() - 1, ey.len() - 1);
        let width = if r == 0.0 { 1.0 } else { (2.0 * sigma / r.abs()).clamp(1e-3, 1.0) };

        let row_of = |p: usize| -> Vec<f64> {
            let lo = if ex[p].is_finite() { ex[p] } else { ex[p + 1].min(-TAIL_CUTOFF) - 1.0 };
            let hi = if ex[p + 1].is_finite() { ex[p + 1] } else { ex[p].max(TAIL_CUTOFF) + 1.0 };
            let mut row = vec![0.0; cols];
            if r == 0.0 {
                let px = cell_mass(ex[p], ex[p + 1]);
                for (q, v) in row.iter_mut().enumerate() {
                    *v = px * cell_mass(ey[q], ey[q + 1]);
                }
                return row;
            }
            let panels = ((hi - lo) / width).ceil().max(1.0) as usize;
            let h = (hi - lo) / panels as f64;
            let mut cdf = vec![0.0; ey.len()];
            for k in 0..panels {
                let mid = lo + h * (k as f64 + 0.5);
                for (xi, wi) in gx.iter().zip(&gw) {
                    let x = mid + 0.5 * h * xi;
                    let w = 0.5 * h * wi * std_pdf(x);
                    for (c, &e) in cdf.iter_mut().zip(&ey) {
                        *c = if e == f64::NEG_INFINITY {
                            0.0
                        } else if e == f64::INFINITY {
                            1.0
                        } else {
                            std_cdf((e - r * x) / sigma)
                        };
                    }
                    for q in 0..cols {
                        let d = conditional_mass(ey[q], ey[q + 1], r, sigma, x, cdf[q], cdf[q + 1]);
                        row[q] += w * d;
                    }
                }
            }
            row
        };
        let mass: Vec<f64> = (0..rows).into_par_iter().flat_map_iter(row_of).collect();
        let mut mass_t = vec![0.0; rows * cols];
        for p in 0..rows {
            for q in 0..cols {
                mass_t[q * rows + p] = mass[p * cols + q];
            }
        }
        Ok(RectangleTable { grid_x: *grid_x, grid_y: *grid_y, rho, rows, cols, mass, mass_t })
    }

    pub fn rho(&self) -> Correlation {
        self.rho
    }

    pub fn grid_x(&self) -> &CellGrid {
        &self.grid_x
    }

    pub fn grid_y(&self) -> &CellGrid {
        &self.grid_y
    }

    /// `M[p][q]` for one axis.
    pub fn axis_mass(&self, p: usize, q: usize) -> f64 {
        self.mass[p * self.cols + q]
    }

    /// `B = M^{⊗k} g`: for each `x`-cell, the vector `E[g(Y) 1{X ∈ cell}]`.
    pub fn right_image(&self, g: &CellFunction) -> Result<Vec<f64>> {
        if g.grid() != &self.grid_y {
            return Err(Error::InvalidGrid("g is not on the table's y-grid".into()));
        }
        Ok(contract(&self.mass, self.rows, self.cols, self.grid_x.dimension(), g.values(), g.m()))
    }

    /// `A = (M^{⊗k})ᵀ f`: for each `y`-cell, the vector `E[f(X) 1{Y ∈ cell}]`.
    pub fn left_image(&self, f: &CellFunction) -> Result<Vec<f64>> {
        if f.grid() != &self.grid_x {
            return Err(Error::InvalidGrid("f is not on the table's x-grid".into()));
        }
        Ok(contract(&self.mass_t, self.cols, self.rows, self.grid_x.dimension(), f.values(), f.m()))
    }

    /// `C_ρ(f, g)`.
    pub fn crho(&self, f: &CellFunction, g: &CellFunction) -> Result<DistributionMatrix> {
        if f.m() != g.m() {
            return Err(Error::DimensionMismatch { expected: f.m(), found: g.m() });
        }
        let b = self.right_image(g)?;
        let m = f.m();
        let c = pair_raw(f.values(), &b, m);
        DistributionMatrix::from_computed(m, c)
    }
}

// E[1{a ≤ Y < b} | X = x] with precomputed Φ at the two limits; the upper tail
// is taken from the complementary side to avoid cancellation.
#[inline]
fn conditional_mass(a: f64, b: f64, r: f64, sigma: f64, x: f64, ca: f64, cb: f64) -> f64 {
    let mean = r * x;
    if a.is_finite() && a > mean {
        let ua = std_cdf(-(a - mean) / sigma);
        let ub = if b.is_finite() { std_cdf(-(b - mean) / sigma) } else { 0.0 };
        (ua - ub).max(0.0)
    } else {
        (cb - ca).max(0.0)
    }
}

/// `C_ij = Σ_c f_i(c) B_j(c)` for flat `cells × m` tables.
#[inline]
pub(crate) fn pair_raw(f: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut c = vec![0.0; m * m];
    for (fr, br) in f.chunks_exact(m).zip(b.chunks_exact(m)) {
        for (i, &fi) in fr.iter().enumerate() {
            if fi == 0.0 {
                continue;
            }
            for (j, &bj) in br.iter().enumerate() {
                c[i * m + j] += fi * bj;
            }
        }
    }
    c
}

/// Applies `mat^{⊗k}` (`rows × cols` per axis) to a `cols^k × m` tensor.
pub(crate) fn contract(mat: &[f64], rows: usize, cols: usize, k: usize, input: &[f64], m: usize) -> Vec<f64> {
    let mut cur = input.to_vec();
    // shape before contracting axis a: rows^a × cols × cols^{k-1-a} × m
    for a in 0..k {
        let outer = rows.pow(a as u32);
        let inner = cols.pow((k - 1 - a) as u32) * m;
        let mut next = vec![0.0; outer * rows * inner];
        for o in 0..outer {
            let src = &cur[o * cols * inner..(o + 1) * cols * inner];
            let dst = &mut next[o * rows * inner..(o + 1) * rows * inner];
            for p in 0..rows {
                let d = &mut dst[p * inner..(p + 1) * inner];
                for q in 0..cols {
                    let w = mat[p * cols + q];
                    if w == 0.0 {
                        continue;
                    }
                    let s = &src[q * inner..(q + 1) * inner];
                    for (dv, sv) in d.iter_mut().zip(s) {
                        *dv += w * sv;
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

/// `C_ρ(f, g)` by Gauss–Legendre integration over each cell of `f` with `order` points per
/// panel; `T_ρ g` is evaluated in closed form at every node.
pub fn crho_quadrature(f: &CellFunction, g: &CellFunction, rho: Correlation, order: usize) -> Result<DistributionMatrix> {
    if f.dimension() != g.dimension() {
        return Err(Error::DimensionMismatch { expected: f.dimension(), found: g.dimension() });
    }
    RectangleTable::with_order(f.grid(), g.grid(), rho, order)?.crho(f, g)
}

/// `C_ρ(f, g)` with the default panel order.
pub fn crho(f: &CellFunction, g: &CellFunction, rho: Correlation) -> Result<DistributionMatrix> {
    crho_quadrature(f, g, rho, DEFAULT_PANEL_ORDER)
}

/// A Monte Carlo estimate of `C_ρ(f, g)` with per-entry standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub matrix: DistributionMatrix,
    pub std_err: Vec<Vec<f64>>,
    pub samples: usize,
}

impl MonteCarloEstimate {
    pub fn max_std_err(&self) -> f64 {
        self.std_err.iter().flatten().fold(0.0, |a, &b| a.max(b))
    }
}

/// Monte Carlo estimate of `C_ρ(f, g)` from `n_samples` pairs `(X, ρX + √(1−ρ²)Z)`.
///
/// Samples are drawn in fixed-size shards, each from its own ChaCha stream, and shard sums
/// are combined in order, so the result depends only on `seed`.
pub fn crho_montecarlo(
    f: &CellFunction,
    g: &CellFunction,
    rho: Correlation,
    n_samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if f.dimension() != g.dimension() {
        return Err(Error::DimensionMismatch { expected: f.dimension(), found: g.dimension() });
    }
    if f.m() != g.m() {
        return Err(Error::DimensionMismatch { expected: f.m(), found: g.m() });
    }
    if n_samples < MIN_MC_SAMPLES {
        return Err(Error::param("n_samples", format!("{n_samples} is below the minimum of {MIN_MC_SAMPLES}")));
    }
    let (k, m) = (f.dimension(), f.m());
    let (r, s) = (rho.value(), rho.sigma());
    let shards = n_samples.div_ceil(MC_SHARD);
    let partial: Vec<(Vec<f64>, Vec<f64>)> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard as u64);
            let count = MC_SHARD.min(n_samples - shard * MC_SHARD);
            let mut sum = vec![0.0; m * m];
            let mut sq = vec![0.0; m * m];
            let mut x = vec![0.0; k];
            let mut y = vec![0.0; k];
            for _ in 0..count {
                for a in 0..k {
                    let xa: f64 = StandardNormal.sample(&mut rng);
                    let za: f64 = StandardNormal.sample(&mut rng);
                    x[a] = xa;
                    y[a] = r * xa + s * za;
                }
                let fv = f.cell_value(f.grid().locate(&x));
                let gv = g.cell_value(g.grid().locate(&y));
                for (i, &fi) in fv.iter().enumerate() {
                    for (j, &gj) in gv.iter().enumerate() {
                        let v = fi * gj;
                        sum[i * m + j] += v;
                        sq[i * m + j] += v * v;
                    }
                }
            }
            (sum, sq)
        })
        .collect();
    let mut sum = vec![0.0; m * m];
    let mut sq = vec![0.0; m * m];
    for (a, b) in &partial {
        for (t, v) in sum.iter_mut().zip(a) {
            *t += v;
        }
        for (t, v) in sq.iter_mut().zip(b) {
            *t += v;
        }
    }
    let n = n_samples as f64;
    let mean: Vec<f64> = sum.iter().map(|v| v / n).collect();
    let se: Vec<f64> = mean
        .iter()
        .zip(&sq)
        .map(|(mu, q)| {
            let var = ((q / n - mu * mu) * n / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        })
        .collect();
    let matrix = DistributionMatrix::from_computed(m, mean)?;
    Ok(MonteCarloEstimate { matrix, std_err: se.chunks_exact(m).map(<[f64]>::to_vec).collect(), samples: n_samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::SimplexPoint;

    #[test]
    fn contract_identity() {
        let id = vec![1.0, 0.0, 0.0, 1.0];
        let v: Vec<f64> = (0..8).map(|x| x as f64).collect();
        assert_eq!(contract(&id, 2, 2, 3, &v, 1), v);
    }

    #[test]
    fn table_rows_are_cell_masses() {
        let g = CellGrid::new(1, 4.0, 8).unwrap();
        let t = RectangleTable::new(&g, &g, Correlation::new(0.8).unwrap()).unwrap();
        let probs = axis_probabilities(&g);
        for (p, want) in probs.iter().enumerate() {
            let got: f64 = (0..10).map(|q| t.axis_mass(p, q)).sum();
            assert!((got - want).abs() < 1e-14, "{p}: {got} vs {want}");
        }
    }

    #[test]
    fn mc_rejects_small_samples() {
        let g = CellGrid::new(1, 4.0, 2).unwrap();
        let f = CellFunction::constant(g, &SimplexPoint::uniform(2));
        assert!(crho_montecarlo(&f, &f, Correlation::new(0.5).unwrap(), 10, 1).is_err());
    }
}
