#![allow(dead_code)]

use nisim::gauss::bvn_orthant_raw;
use nisim::stability::{CellFunction, CellGrid, SimplexPoint};
use nisim::variational::{PartitionGrid, QuadraticObjective};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_simplex(rng: &mut ChaCha8Rng, m: usize) -> SimplexPoint {
    if rng.random::<f64>() < 0.4 {
        return SimplexPoint::vertex(m, rng.random_range(0..m));
    }
    let raw: Vec<f64> = (0..m).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = raw.iter().sum();
    let mut v: Vec<f64> = raw.iter().map(|x| x / s).collect();
    let rest: f64 = v[1..].iter().sum();
    v[0] = (1.0 - rest).max(0.0);
    SimplexPoint::new(v).unwrap()
}

pub fn random_cell_function(rng: &mut ChaCha8Rng, grid: CellGrid, m: usize) -> CellFunction {
    let values = (0..grid.cell_count()).map(|_| random_simplex(rng, m)).collect();
    CellFunction::new(grid, values).unwrap()
}

/// `e_0` on cells with `x_0 < edge`, `e_1` elsewhere, on a 1-D grid.
pub fn threshold(grid: CellGrid, edge_cell: usize) -> CellFunction {
    let labels: Vec<usize> = (0..grid.cell_count()).map(|c| usize::from(c >= edge_cell)).collect();
    CellFunction::from_labels(grid, 2, &labels).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Maximal runs `(a, b, label)` of a 1-D labeling.
pub fn runs(grid: &CellGrid, labels: &[usize]) -> Vec<(f64, f64, usize)> {
    let e = grid.axis_edges();
    let mut out: Vec<(f64, f64, usize)> = Vec::new();
    for (i, &l) in labels.iter().enumerate() {
        match out.last_mut() {
            Some(last) if last.2 == l => last.1 = e[i + 1],
            _ => out.push((e[i], e[i + 1], l)),
        }
    }
    out
}

pub fn bvn_rectangle(a1: f64, b1: f64, a2: f64, b2: f64, rho: f64) -> f64 {
    let o = |s, t| bvn_orthant_raw(s, t, rho).unwrap();
    o(b1, b2) - o(a1, b2) - o(b1, a2) + o(a1, a2)
}

/// Objective of a 1-D pair after translating `Ω` by `h` and `Ω′` by `sign(ρ) h`, from
/// bivariate normal rectangles.
pub fn shifted_objective(p: &PartitionGrid, rho: f64, obj: &QuadraticObjective, h: f64) -> f64 {
    let m = p.m();
    let w = rho.signum() * h;
    let mut s = vec![0.0; m * m];
    for &(a, b, i) in &runs(p.grid(), p.omega()) {
        for &(c, d, j) in &runs(p.grid(), p.omega_prime()) {
            s[i * m + j] += bvn_rectangle(a + h, b + h, c + w, d + w, rho);
        }
    }
    (0..m * m).map(|k| obj.d(k / m, k % m) * (s[k] - obj.z(k / m, k % m)).powi(2)).sum()
}

/// `½ (F(h) − 2F(0) + F(−h)) / h²` for the translation above.
pub fn translation_second_difference(p: &PartitionGrid, rho: f64, obj: &QuadraticObjective, h: f64) -> f64 {
    let f = |s| shifted_objective(p, rho, obj, s);
    0.5 * (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h)
}

/// A 1-D pair where each partition has three random runs.
pub fn random_three_run_pair(rng: &mut ChaCha8Rng, grid: CellGrid, m: usize) -> PartitionGrid {
    let n = grid.axis_len();
    let mut side = || -> Vec<usize> {
        let c1 = rng.random_range(n / 6..n / 2);
        let c2 = rng.random_range(c1 + 2..n - n / 6);
        let labels: Vec<usize> = (0..3).map(|_| rng.random_range(0..m)).collect();
        (0..n).map(|c| labels[usize::from(c >= c1) + usize::from(c >= c2)]).collect()
    };
    let omega = side();
    let omega_prime = side();
    PartitionGrid::new(grid, m, omega, omega_prime).unwrap()
}

pub fn random_objective(rng: &mut ChaCha8Rng, m: usize) -> QuadraticObjective {
    let d = (0..m).map(|_| (0..m).map(|_| rng.random_range(0.5..1.5)).collect()).collect();
    let z = (0..m).map(|_| (0..m).map(|_| rng.random_range(-0.1..0.7)).collect()).collect();
    QuadraticObjective::new(d, z).unwrap()
}
