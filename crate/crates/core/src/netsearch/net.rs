use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stability::SimplexPoint;

/// Default cap on the number of net points.
pub const DEFAULT_NET_BUDGET: usize = 1 << 20;

/// Points of the lattice `{x ∈ Δ_m : N·x ∈ ℤ^m}` at a resolution `N` chosen so that every
/// point of the simplex lies within `ε/2` (Euclidean) of the net.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexNet {
    m: usize,
    epsilon: f64,
    resolution: usize,
    points: Vec<SimplexPoint>,
}

/// Euclidean covering radius of the scaled lattice `A_{m−1}` with unit spacing.
fn unit_covering_radius(m: usize) -> f64 {
    let a = (m / 2) as f64;
    let m = m as f64;
    (a * (m - a) / m).sqrt()
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.checked_mul(n - i)? / (i + 1);
    }
    Some(r)
}

/// An `ε/2`-net of `Δ_m`.
pub fn simplex_net(m: usize, epsilon: f64) -> Result<SimplexNet> {
    simplex_net_with_budget(m, epsilon, DEFAULT_NET_BUDGET)
}

pub fn simplex_net_with_budget(m: usize, epsilon: f64, budget: usize) -> Result<SimplexNet> {
    if m < 2 {
        return Err(Error::param("m", "must be at least 2"));
    }
    if !(epsilon > 0.0 && epsilon < 2.0) {
        return Err(Error::param("epsilon", format!("{epsilon} must lie in (0, 2)")));
    }
    let resolution = (unit_covering_radius(m) / (0.5 * epsilon)).ceil().max(1.0);
    if resolution > 1e9 {
        return Err(Error::BudgetExceeded { what: "simplex net", required: u128::MAX, budget: budget as u128 });
    }
    let n = resolution as usize;
    let count = binomial((n + m - 1) as u128, (m - 1) as u128).unwrap_or(u128::MAX);
    if count > budget as u128 {
        return Err(Error::BudgetExceeded { what: "simplex net", required: count, budget: budget as u128 });
    }
    let mut points = Vec::with_capacity(count as usize);
    let mut cur = vec![0usize; m];
    compositions(&mut cur, 0, n, n, &mut points);
    Ok(SimplexNet { m, epsilon, resolution: n, points })
}

// first coordinate descending, so e_1 comes first and e_m last
fn compositions(cur: &mut Vec<usize>, pos: usize, left: usize, n: usize, out: &mut Vec<SimplexPoint>) {
    let m = cur.len();
    if pos == m - 1 {
        cur[pos] = left;
        let mut v: Vec<f64> = cur.iter().map(|&c| c as f64 / n as f64).collect();
        // keep the sum exact up to one rounding
        let rest: f64 = v[..m - 1].iter().sum();
        if cur[m - 1] != 0 {
            v[m - 1] = (1.0 - rest).max(0.0);
        }
        out.push(SimplexPoint::new(v).expect("lattice point lies in the simplex"));
        return;
    }
    for c in (0..=left).rev() {
        cur[pos] = c;
        compositions(cur, pos + 1, left - c, n, out);
    }
}

impl SimplexNet {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Lattice denominator `N`.
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn points(&self) -> &[SimplexPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Worst-case Euclidean distance from a simplex point to the net.
    pub fn covering_radius(&self) -> f64 {
        unit_covering_radius(self.m) / self.resolution as f64
    }

    /// Index of the net point closest to `x` in ℓ2 (lowest index on ties).
    pub fn nearest(&self, x: &[f64]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, p) in self.points.iter().enumerate() {
            let d: f64 = p.coords().iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    /// A copy with `extra` points appended (skipping ones already present).
    pub fn augmented(&self, extra: &[SimplexPoint]) -> SimplexNet {
        let mut out = self.clone();
        for p in extra {
            if p.m() == self.m && !out.points.contains(p) {
                out.points.push(p.clone());
            }
        }
        out
    }

    /// Index of the vertex `e_i`.
    pub fn vertex_index(&self, i: usize) -> usize {
        self.points.iter().position(|p| p.coords()[i] == 1.0).expect("vertices are always in the net")
    }
}
