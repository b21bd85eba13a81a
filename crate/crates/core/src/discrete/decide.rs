use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pmf::JointPmf;
use crate::error::{Error, Result};
use crate::netsearch::{Decision, SimplexNet, Verdict};
use crate::stability::{tv_distance, tv_raw, DistributionMatrix};

/// Cap on `p^n` for the product source table.
pub const MAX_SEQUENCES: usize = 4096;

/// Output rules `{1,…,p}^n → Δ_m` for the two parties; rows are indexed by sequences with the
/// first coordinate most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteWitness {
    pub n: usize,
    pub f: Vec<Vec<f64>>,
    pub g: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteEcho {
    pub epsilon: f64,
    pub n: usize,
    pub m: usize,
    pub alphabet_x: usize,
    pub alphabet_y: usize,
    pub net_epsilon: f64,
    pub net_size: usize,
    pub budget: u64,
    /// `log10` of the number of function pairs in the full space.
    pub log10_total_pairs: f64,
}

pub type DiscreteDecision = Decision<DiscreteWitness, DiscreteEcho>;

/// The `n`-fold product source as a `p^n × p'^n` table.
pub fn product_source(source: &JointPmf, n: usize) -> Result<(usize, usize, Vec<f64>)> {
    let (p, q) = (source.alphabet_x(), source.alphabet_y());
    let too_big = |a: usize| a.checked_pow(n as u32).is_none_or(|v| v > MAX_SEQUENCES);
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if too_big(p) || too_big(q) {
        return Err(Error::BudgetExceeded {
            what: "product source",
            required: (p.max(q) as u128).saturating_pow(n as u32),
            budget: MAX_SEQUENCES as u128,
        });
    }
    let (px, qy) = (p.pow(n as u32), q.pow(n as u32));
    let mut table = vec![0.0; px * qy];
    for x in 0..px {
        for y in 0..qy {
            let (mut a, mut b, mut w) = (x, y, 1.0);
            for _ in 0..n {
                w *= source.get(a % p, b % q);
                a /= p;
                b /= q;
            }
            table[x * qy + y] = w;
        }
    }
    Ok((px, qy, table))
}

/// Exact law of `(f(X^n), g(Y^n))` for randomized rules `f`, `g` given as rows of simplex points.
pub fn induced_distribution(source: &JointPmf, n: usize, f: &[Vec<f64>], g: &[Vec<f64>]) -> Result<DistributionMatrix> {
    let (px, qy, table) = product_source(source, n)?;
    if f.len() != px || g.len() != qy {
        return Err(Error::DimensionMismatch { expected: px, found: f.len() });
    }
    let m = f.first().map_or(0, Vec::len);
    if m == 0 || f.iter().chain(g).any(|r| r.len() != m) {
        return Err(Error::InvalidSimplexPoint("rule rows must all have length m".into()));
    }
    let mut c = vec![0.0; m * m];
    for x in 0..px {
        for y in 0..qy {
            let w = table[x * qy + y];
            for i in 0..m {
                for j in 0..m {
                    c[i * m + j] += w * f[x][i] * g[y][j];
                }
            }
        }
    }
    DistributionMatrix::from_computed(m, c)
}

fn digits_of(mut idx: u128, base: usize, len: usize) -> Vec<usize> {
    let mut d = vec![0; len];
    for slot in d.iter_mut().rev() {
        *slot = (idx % base as u128) as usize;
        idx /= base as u128;
    }
    d
}

/// Exhaustive search over pairs of rules `{1,…,p}^n → net`, in the order
/// `pair = f_index · |G| + g_index`, examining at most `budget` pairs.
pub fn decide_discrete(
    target: &DistributionMatrix,
    source: &JointPmf,
    epsilon: f64,
    n: usize,
    net: &SimplexNet,
    budget: u64,
) -> Result<DiscreteDecision> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::param("epsilon", format!("{epsilon} must be positive")));
    }
    if budget == 0 {
        return Err(Error::param("budget", "must be at least 1"));
    }
    let m = target.m();
    if net.m() != m {
        return Err(Error::DimensionMismatch { expected: m, found: net.m() });
    }
    let (px, qy, table) = product_source(source, n)?;
    let k = net.len();
    let count = |len: usize| (k as u128).checked_pow(len as u32);
    let (nf, ng) = (count(px), count(qy));
    let total = nf.zip(ng).and_then(|(a, b)| a.checked_mul(b));
    let examined = total.map_or(budget as u128, |t| t.min(budget as u128));
    let truncated = total.is_none_or(|t| t > budget as u128);
    let log10_total_pairs = (px as f64 + qy as f64) * (k as f64).log10();
    let ng = ng.unwrap_or(u128::MAX);
    let pts: Vec<&[f64]> = net.points().iter().map(|p| p.coords()).collect();
    let t = target.entries();

    let f_count = examined.div_ceil(ng.max(1)) as usize;
    let results: Vec<(f64, u128)> = (0..f_count)
        .into_par_iter()
        .map(|fi| {
            let fd = digits_of(fi as u128, k, px);
            // A[y][i] = Σ_x P(x, y) f_i(x)
            let mut a = vec![0.0; qy * m];
            for (x, &d) in fd.iter().enumerate() {
                let fv = pts[d];
                for y in 0..qy {
                    let w = table[x * qy + y];
                    for i in 0..m {
                        a[y * m + i] += w * fv[i];
                    }
                }
            }
            let start = fi as u128 * ng;
            let end = (start + ng).min(examined);
            let mut best = (f64::INFINITY, 0u128);
            let mut c = vec![0.0; m * m];
            for pair in start..end {
                let gd = digits_of(pair - start, k, qy);
                c.iter_mut().for_each(|v| *v = 0.0);
                for (y, &d) in gd.iter().enumerate() {
                    let gv = pts[d];
                    for i in 0..m {
                        let ai = a[y * m + i];
                        if ai == 0.0 {
                            continue;
                        }
                        for j in 0..m {
                            c[i * m + j] += ai * gv[j];
                        }
                    }
                }
                let dist = tv_raw(&c, t);
                if dist < best.0 {
                    best = (dist, pair);
                }
            }
            best
        })
        .collect();
    let best = results.into_iter().fold((f64::INFINITY, 0u128), |acc, r| if r.0 < acc.0 { r } else { acc });

    let echo = DiscreteEcho {
        epsilon,
        n,
        m,
        alphabet_x: source.alphabet_x(),
        alphabet_y: source.alphabet_y(),
        net_epsilon: net.epsilon(),
        net_size: k,
        budget,
        log10_total_pairs,
    };
    if !best.0.is_finite() {
        return Ok(Decision {
            verdict: Verdict::Indeterminate,
            best_distance: f64::INFINITY,
            witness: None,
            candidates_examined: examined as u64,
            truncated,
            verification: "none".into(),
            config: echo,
        });
    }
    let fi = best.1 / ng;
    let gi = best.1 % ng;
    let rows = |idx: u128, len: usize| digits_of(idx, k, len).into_iter().map(|d| pts[d].to_vec()).collect::<Vec<_>>();
    let witness = DiscreteWitness { n, f: rows(fi, px), g: rows(gi, qy) };
    let exact = induced_distribution(source, n, &witness.f, &witness.g)?;
    let best_distance = tv_distance(&exact, target)?;
    Ok(Decision {
        verdict: Verdict::classify(best_distance, epsilon, truncated),
        best_distance,
        witness: Some(witness),
        candidates_examined: examined as u64,
        truncated,
        verification: "exact product-source sum".into(),
        config: echo,
    })
}
