//! Orthonormal probabilists' Hermite polynomials and multi-indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A multi-index `j ∈ ℕ^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::param("multi-index", "needs at least one axis"));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zero(k: usize) -> Self {
        MultiIndex(vec![0; k.max(1)])
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    /// ℓ1 norm.
    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    /// All multi-indices in `k` variables with degree at most `cap`,
    /// ordered by degree and then lexicographically.
    pub fn up_to_degree(k: usize, cap: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for deg in 0..=cap {
            let mut cur = vec![0usize; k];
            fill(&mut cur, 0, deg, &mut out);
        }
        out
    }
}

// Writes every composition of `left` into cur[pos..] in lexicographic order.
fn fill(cur: &mut Vec<usize>, pos: usize, left: usize, out: &mut Vec<MultiIndex>) {
    let k = cur.len();
    if pos == k - 1 {
        cur[pos] = left;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for v in 0..=left {
        cur[pos] = v;
        fill(cur, pos + 1, left - v, out);
    }
}

/// Values `h_0(x), …, h_n(x)` of the orthonormal Hermite polynomials.
pub fn hermite_all(n: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(1.0);
    if n >= 1 {
        h.push(x);
    }
    for j in 1..n {
        let next = (x * h[j] - (j as f64).sqrt() * h[j - 1]) / ((j + 1) as f64).sqrt();
        h.push(next);
    }
    h
}

/// `h_n(x)` in one variable.
pub fn hermite_1d(n: usize, x: f64) -> f64 {
    hermite_all(n, x)[n]
}

/// Product `Π_a h_{j_a}(x_a)`.
pub fn hermite_orthonormal(j: &MultiIndex, x: &[f64]) -> Result<f64> {
    if j.dimension() != x.len() {
        return Err(Error::DimensionMismatch { expected: j.dimension(), found: x.len() });
    }
    Ok(j.0.iter().zip(x).map(|(&n, &xa)| hermite_1d(n, xa)).product())
}
