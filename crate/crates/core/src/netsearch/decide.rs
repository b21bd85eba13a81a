use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::decision::{Decision, Verdict};
use super::enumerate::{enumerate_cell_functions, function_from_digits};
use super::net::{simplex_net, SimplexNet};
use super::separated::separated_set;
use crate::error::{Error, Result};
use crate::gauss::Correlation;
use crate::stability::{crho_quadrature, pair_raw, tv_distance, tv_raw, CellFunction, CellGrid, DistributionMatrix, RectangleTable, SimplexPoint};

/// Panel order of the verification pass; differs from the search table so nodes are not reused.
pub const VERIFY_ORDER: usize = 32;

/// Parameters of [`decide_gaussian`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Closeness threshold in total variation.
    pub epsilon: f64,
    /// Separation of the pruned candidate set; defaults to `epsilon`.
    pub separation: Option<f64>,
    /// Net parameter (covering radius is half of it); defaults to `epsilon`.
    pub net_epsilon: Option<f64>,
    /// Domain dimension `k`; defaults to `m² − 1`.
    pub domain_dimension: Option<usize>,
    pub radius: f64,
    pub cells_per_axis: usize,
    /// Hermite degree cap; defaults to `⌈log(ε/2)/log|ρ|⌉`.
    pub degree_cap: Option<usize>,
    /// Maximum number of candidate functions drawn.
    pub budget: usize,
    pub seed: u64,
    /// Refine the best pairs by single-cell coordinate descent.
    pub polish: bool,
    /// Number of best pairs refined.
    pub polish_starts: usize,
    /// Seed candidates with constants and threshold functions before the lexicographic stream,
    /// and add the target's marginals to the value set.
    pub structured_seeds: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            epsilon: 0.05,
            separation: None,
            net_epsilon: None,
            domain_dimension: None,
            radius: CellGrid::DEFAULT_RADIUS,
            cells_per_axis: 4,
            degree_cap: None,
            budget: 2048,
            seed: 0,
            polish: true,
            polish_starts: 8,
            structured_seeds: true,
        }
    }
}

/// Configuration as resolved for a particular run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianEcho {
    pub rho: f64,
    pub m: usize,
    pub epsilon: f64,
    pub separation: f64,
    pub net_epsilon: f64,
    pub net_resolution: usize,
    pub net_size: usize,
    pub domain_dimension: usize,
    pub radius: f64,
    pub cells_per_axis: usize,
    pub degree_cap: usize,
    pub budget: usize,
    pub seed: u64,
    pub polish: bool,
    pub metric: String,
}

pub type GaussianDecision = Decision<(CellFunction, CellFunction), GaussianEcho>;

/// Default Hermite cap `⌈log(ε/2)/log|ρ|⌉`, at least 1.
pub fn default_degree_cap(epsilon: f64, rho: Correlation) -> usize {
    let r = rho.abs();
    if r == 0.0 {
        return 1;
    }
    ((0.5 * epsilon).ln() / r.ln()).ceil().max(1.0) as usize
}

impl SearchConfig {
    /// Checks the configuration against `rho` without running anything.
    pub fn validate(&self, rho: Correlation) -> Result<()> {
        let e = self.epsilon;
        if !(e > 0.0 && e < rho.abs()) {
            return Err(Error::EpsilonNotBelowRho { epsilon: e, rho_abs: rho.abs() });
        }
        if let Some(d) = self.degree_cap {
            if d < 1 {
                return Err(Error::param("degree_cap", "must be at least 1"));
            }
        }
        if self.budget < 1 {
            return Err(Error::param("budget", "must be at least 1"));
        }
        if let Some(s) = self.separation {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::param("separation", format!("{s} must be finite and nonnegative")));
            }
        }
        if let Some(k) = self.domain_dimension {
            if k < 1 {
                return Err(Error::param("domain_dimension", "must be at least 1"));
            }
        }
        if let Some(n) = self.net_epsilon {
            if !(n > 0.0 && n < 2.0) {
                return Err(Error::param("net_epsilon", format!("{n} must lie in (0, 2)")));
            }
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::param("radius", format!("{} must be positive and finite", self.radius)));
        }
        if self.cells_per_axis < 1 {
            return Err(Error::param("cells_per_axis", "must be at least 1"));
        }
        Ok(())
    }
}

/// Constant functions at every net point, then two-level vertex-valued threshold functions
/// along each axis (and three-level ones along the first axis when `m ≥ 3`).
/// Points past `base_len` (the appended marginals) come first.
fn structured_digits(grid: &CellGrid, net: &SimplexNet, base_len: usize) -> Vec<Vec<usize>> {
    let cells = grid.cell_count();
    let n = grid.axis_len();
    let m = net.m();
    let mut out: Vec<Vec<usize>> = (base_len..net.len()).chain(0..base_len).map(|p| vec![p; cells]).collect();
    let vert: Vec<usize> = (0..m).map(|i| net.vertex_index(i)).collect();
    let axis_of = |cell: usize, a: usize| grid.unflatten(cell)[a];
    for a in 0..grid.dimension() {
        for cut in 1..n {
            for (i, &u) in vert.iter().enumerate() {
                for (j, &v) in vert.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    out.push((0..cells).map(|c| if axis_of(c, a) < cut { u } else { v }).collect());
                }
            }
        }
    }
    if m >= 3 {
        for lo in 1..n {
            for hi in lo + 1..n {
                for (i, &u) in vert.iter().enumerate() {
                    for (j, &v) in vert.iter().enumerate() {
                        for (l, &w) in vert.iter().enumerate() {
                            if i == j || j == l || i == l {
                                continue;
                            }
                            out.push(
                                (0..cells)
                                    .map(|c| {
                                        let x = axis_of(c, 0);
                                        if x < lo {
                                            u
                                        } else if x < hi {
                                            v
                                        } else {
                                            w
                                        }
                                    })
                                    .collect(),
                            );
                        }
                    }
                }
            }
        }
    }
    out
}

struct Candidate {
    digits: Vec<usize>,
    function: CellFunction,
}

/// Decides whether `target` is within `ε` (total variation) of `C_ρ(f, g)` for cell functions
/// `f, g` on the configured grid with values in the configured net.
pub fn decide_gaussian(target: &DistributionMatrix, rho: Correlation, config: &SearchConfig) -> Result<GaussianDecision> {
    config.validate(rho)?;
    let m = target.m();
    if m < 2 {
        return Err(Error::InvalidDistribution("target must be at least 2×2".into()));
    }
    let k = config.domain_dimension.unwrap_or(m * m - 1);
    let grid = CellGrid::new(k, config.radius, config.cells_per_axis)?;
    let net_eps = config.net_epsilon.unwrap_or(config.epsilon);
    let mut net = simplex_net(m, net_eps)?;
    let base_len = net.len();
    if config.structured_seeds {
        // the target's marginals as values make product targets exactly reachable
        let marginals = [target.row_sums(), target.col_sums()].map(|v| {
            let s: f64 = v.iter().sum();
            SimplexPoint::new(v.iter().map(|x| x / s).collect())
        });
        let extra: Vec<SimplexPoint> = marginals.into_iter().filter_map(Result::ok).collect();
        net = net.augmented(&extra);
    }
    let cap = config.degree_cap.unwrap_or_else(|| default_degree_cap(config.epsilon, rho));
    let separation = config.separation.unwrap_or(config.epsilon);

    // candidate stream: structured seeds, then lexicographic enumeration, capped by the budget
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut truncated = false;
    if config.structured_seeds {
        for d in structured_digits(&grid, &net, base_len) {
            if candidates.len() >= config.budget {
                truncated = true;
                break;
            }
            let function = function_from_digits(grid, &net, &d);
            candidates.push(Candidate { digits: d, function });
        }
    }
    let mut stream = enumerate_cell_functions(grid, &net, config.budget - candidates.len());
    if !truncated {
        while let Some(d) = stream.next_digits() {
            let function = function_from_digits(grid, &net, &d);
            candidates.push(Candidate { digits: d, function });
        }
        // the stream may reach its budget exactly at the end of the space
        truncated = stream.truncated() || stream.next_digits().is_some();
    }
    let drawn = candidates.len();

    let kept = separated_set(candidates.iter().map(|c| c.function.clone()), cap, separation)?;
    // separated_set keeps candidates in stream order; recover their digit vectors
    let mut kept_digits = Vec::with_capacity(kept.len());
    {
        let mut it = candidates.iter();
        for (f, _) in &kept {
            let c = it.by_ref().find(|c| &c.function == f).expect("kept candidates come from the stream");
            kept_digits.push(c.digits.clone());
        }
    }
    drop(candidates);
    let kept: Vec<CellFunction> = kept.into_iter().map(|(f, _)| f).collect();
    debug!("decide_gaussian: drew {drawn} candidates, kept {} after separation", kept.len());

    let table = RectangleTable::new(&grid, &grid, rho)?;
    let t = target.entries();
    let n_kept = kept.len();

    // best g for every f, evaluated in parallel; reduction in index order
    let per_f: Vec<(f64, usize)> = kept
        .par_iter()
        .map(|f| {
            let a = table.left_image(f).expect("same grid");
            let mut best = (f64::INFINITY, 0usize);
            for (gi, g) in kept.iter().enumerate() {
                let c = pair_raw(&a, g.values(), m);
                let d = tv_raw(&c, t);
                if d < best.0 {
                    best = (d, gi);
                }
            }
            best
        })
        .collect();
    let mut examined = (n_kept as u64) * (n_kept as u64);

    let mut order: Vec<usize> = (0..n_kept).collect();
    order.sort_by(|&a, &b| per_f[a].0.total_cmp(&per_f[b].0).then(a.cmp(&b)));
    let mut best = order.first().map(|&fi| (per_f[fi].0, kept_digits[fi].clone(), kept_digits[per_f[fi].1].clone()));

    if config.polish && config.polish_starts > 0 && n_kept > 0 {
        let starts: Vec<usize> = order.iter().copied().take(config.polish_starts).collect();
        let polished: Vec<(f64, Vec<usize>, Vec<usize>, u64)> = starts
            .par_iter()
            .map(|&fi| polish(&table, &net, t, kept_digits[fi].clone(), kept_digits[per_f[fi].1].clone()))
            .collect();
        for (d, fd, gd, trials) in polished {
            examined += trials;
            if best.as_ref().is_none_or(|b| d < b.0) {
                best = Some((d, fd, gd));
            }
        }
    }

    let echo = GaussianEcho {
        rho: rho.value(),
        m,
        epsilon: config.epsilon,
        separation,
        net_epsilon: net_eps,
        net_resolution: net.resolution(),
        net_size: net.len(),
        domain_dimension: k,
        radius: config.radius,
        cells_per_axis: config.cells_per_axis,
        degree_cap: cap,
        budget: config.budget,
        seed: config.seed,
        polish: config.polish,
        metric: "total_variation".into(),
    };

    let Some((_, fd, gd)) = best else {
        return Ok(Decision {
            verdict: Verdict::Indeterminate,
            best_distance: f64::INFINITY,
            witness: None,
            candidates_examined: examined,
            truncated,
            verification: "none".into(),
            config: echo,
        });
    };
    let f = function_from_digits(grid, &net, &fd);
    let g = function_from_digits(grid, &net, &gd);
    let verified = crho_quadrature(&f, &g, rho, VERIFY_ORDER)?;
    let best_distance = tv_distance(&verified, target)?;
    let verdict = Verdict::classify(best_distance, config.epsilon, truncated);
    Ok(Decision {
        verdict,
        best_distance,
        witness: Some((f, g)),
        candidates_examined: examined,
        truncated,
        verification: format!("gauss-legendre order {VERIFY_ORDER}"),
        config: echo,
    })
}

/// Alternating single-cell coordinate descent over net values. Returns the final distance,
/// the two digit vectors and the number of trial moves.
fn polish(
    table: &RectangleTable,
    net: &SimplexNet,
    target: &[f64],
    mut fd: Vec<usize>,
    mut gd: Vec<usize>,
) -> (f64, Vec<usize>, Vec<usize>, u64) {
    const MAX_ROUNDS: usize = 200;
    const MIN_GAIN: f64 = 1e-13;
    let grid = *table.grid_x();
    let m = net.m();
    let pts: Vec<&[f64]> = net.points().iter().map(|p| p.coords()).collect();
    let mut trials = 0u64;
    let mut delta = vec![0.0; m * m];
    let mut current = f64::INFINITY;
    for _ in 0..MAX_ROUNDS {
        let mut improved = false;

        // g sweep: C = Σ_c A(c) ⊗ g(c)
        let f = function_from_digits(grid, net, &fd);
        let a = table.left_image(&f).expect("same grid");
        let gf = function_from_digits(grid, net, &gd);
        let mut c = pair_raw(&a, gf.values(), m);
        current = tv_raw(&c, target);
        for cell in 0..gd.len() {
            let ac = &a[cell * m..(cell + 1) * m];
            let old = pts[gd[cell]];
            let mut best = (current, gd[cell]);
            for (p, v) in pts.iter().enumerate() {
                if p == gd[cell] {
                    continue;
                }
                trials += 1;
                for i in 0..m {
                    for j in 0..m {
                        delta[i * m + j] = c[i * m + j] + ac[i] * (v[j] - old[j]);
                    }
                }
                let d = tv_raw(&delta, target);
                if d < best.0 - MIN_GAIN {
                    best = (d, p);
                }
            }
            if best.1 != gd[cell] {
                let v = pts[best.1];
                for i in 0..m {
                    for j in 0..m {
                        c[i * m + j] += ac[i] * (v[j] - old[j]);
                    }
                }
                gd[cell] = best.1;
                current = tv_raw(&c, target);
                improved = true;
            }
        }

        // f sweep: C = Σ_c f(c) ⊗ B(c)
        let g = function_from_digits(grid, net, &gd);
        let b = table.right_image(&g).expect("same grid");
        let ff = function_from_digits(grid, net, &fd);
        let mut c = pair_raw(ff.values(), &b, m);
        current = tv_raw(&c, target);
        for cell in 0..fd.len() {
            let bc = &b[cell * m..(cell + 1) * m];
            let old = pts[fd[cell]];
            let mut best = (current, fd[cell]);
            for (p, v) in pts.iter().enumerate() {
                if p == fd[cell] {
                    continue;
                }
                trials += 1;
                for i in 0..m {
                    for j in 0..m {
                        delta[i * m + j] = c[i * m + j] + (v[i] - old[i]) * bc[j];
                    }
                }
                let d = tv_raw(&delta, target);
                if d < best.0 - MIN_GAIN {
                    best = (d, p);
                }
            }
            if best.1 != fd[cell] {
                let v = pts[best.1];
                for i in 0..m {
                    for j in 0..m {
                        c[i * m + j] += (v[i] - old[i]) * bc[j];
                    }
                }
                fd[cell] = best.1;
                current = tv_raw(&c, target);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    (current, fd, gd, trials)
}
