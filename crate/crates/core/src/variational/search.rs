use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::first::check_parts;
use super::objective::QuadraticObjective;
use super::partition::{PartitionGrid, Side};
use crate::error::{Error, Result};
use crate::gauss::Correlation;
use crate::stability::{CellFunction, RectangleTable};

const MAX_SWEEPS: usize = 10_000;
const MIN_GAIN: f64 = 1e-14;

/// A partition pair from which no single-cell relabeling lowers the objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalMinimum {
    pub partition: PartitionGrid,
    pub objective: f64,
    /// Index of the start that produced it; start `0` is the skeleton itself.
    pub restart: usize,
    pub sweeps: usize,
}

/// `Σ d_ij (s_ij − z_ij)²` with `s = C_ρ(1_Ω, 1_Ω′)`.
pub fn eval_objective(parts: &PartitionGrid, rho: Correlation, obj: &QuadraticObjective) -> Result<f64> {
    check_parts(parts, obj)?;
    let (f, g) = parts.to_cell_functions();
    let s = RectangleTable::new(parts.grid(), parts.grid(), rho)?.crho(&f, &g)?;
    obj.value(&s)
}

/// Single-cell coordinate descent from `restarts` starts. Start `0` is `skeleton`; the others
/// are independent uniform labelings drawn from stream `r` of `seed`.
pub fn grid_local_search(
    rho: Correlation,
    obj: &QuadraticObjective,
    skeleton: &PartitionGrid,
    seed: u64,
    restarts: usize,
) -> Result<LocalMinimum> {
    check_parts(skeleton, obj)?;
    if restarts == 0 {
        return Err(Error::param("restarts", "must be at least 1"));
    }
    let table = RectangleTable::new(skeleton.grid(), skeleton.grid(), rho)?;
    let runs: Vec<Result<LocalMinimum>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                skeleton.clone()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(r as u64);
                let n = skeleton.grid().cell_count();
                let m = skeleton.m();
                let omega = (0..n).map(|_| rng.random_range(0..m)).collect();
                let omega_prime = (0..n).map(|_| rng.random_range(0..m)).collect();
                PartitionGrid::new(*skeleton.grid(), m, omega, omega_prime)?
            };
            descend(&table, obj, start, r)
        })
        .collect();
    let mut best: Option<LocalMinimum> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.objective < b.objective) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// True when no single-cell relabeling of either partition lowers the objective by more than
/// rounding.
pub fn is_local_minimum(parts: &PartitionGrid, rho: Correlation, obj: &QuadraticObjective) -> Result<bool> {
    check_parts(parts, obj)?;
    let table = RectangleTable::new(parts.grid(), parts.grid(), rho)?;
    let (a, b, c) = images(&table, parts)?;
    let m = parts.m();
    let current = obj.value_raw(&c);
    let mut trial = vec![0.0; m * m];
    for side in [Side::Omega, Side::OmegaPrime] {
        let image = if side == Side::Omega { &b } else { &a };
        for (cell, &from) in parts.labels(side).iter().enumerate() {
            let row = &image[cell * m..(cell + 1) * m];
            for to in (0..m).filter(|&t| t != from) {
                trial.copy_from_slice(&c);
                shift(&mut trial, side, row, from, to, m);
                if obj.value_raw(&trial) < current - MIN_GAIN {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

// moves one cell's contribution `row` from label `from` to `to` in `c`
fn shift(c: &mut [f64], side: Side, row: &[f64], from: usize, to: usize, m: usize) {
    for (l, &x) in row.iter().enumerate() {
        let (src, dst) = match side {
            Side::Omega => (from * m + l, to * m + l),
            Side::OmegaPrime => (l * m + from, l * m + to),
        };
        c[src] -= x;
        c[dst] += x;
    }
}

struct Kernel<'a> {
    table: &'a RectangleTable,
    n: usize,
    k: usize,
}

impl Kernel<'_> {
    // M^{⊗k}[x][y]
    fn entry(&self, mut x: usize, mut y: usize) -> f64 {
        let mut p = 1.0;
        for _ in 0..self.k {
            p *= self.table.axis_mass(x % self.n, y % self.n);
            x /= self.n;
            y /= self.n;
        }
        p
    }
}

fn images(table: &RectangleTable, parts: &PartitionGrid) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let (f, g): (CellFunction, CellFunction) = parts.to_cell_functions();
    let b = table.right_image(&g)?;
    let a = table.left_image(&f)?;
    let m = parts.m();
    let mut c = vec![0.0; m * m];
    for (cell, &i) in parts.omega().iter().enumerate() {
        for j in 0..m {
            c[i * m + j] += b[cell * m + j];
        }
    }
    Ok((a, b, c))
}

fn descend(table: &RectangleTable, obj: &QuadraticObjective, mut parts: PartitionGrid, restart: usize) -> Result<LocalMinimum> {
    let m = parts.m();
    let cells = parts.grid().cell_count();
    let kernel = Kernel { table, n: parts.grid().axis_len(), k: parts.grid().dimension() };
    let mut sweeps = 0;
    let mut trial = vec![0.0; m * m];
    loop {
        sweeps += 1;
        // refresh from scratch each sweep so incremental updates cannot drift
        let (mut a, mut b, mut c) = images(table, &parts)?;
        let mut current = obj.value_raw(&c);
        let mut moved = false;
        for side in [Side::Omega, Side::OmegaPrime] {
            for cell in 0..cells {
                let from = parts.labels(side)[cell];
                let row = match side {
                    Side::Omega => &b[cell * m..(cell + 1) * m],
                    Side::OmegaPrime => &a[cell * m..(cell + 1) * m],
                };
                let mut best = (current, from);
                for to in (0..m).filter(|&t| t != from) {
                    trial.copy_from_slice(&c);
                    shift(&mut trial, side, row, from, to, m);
                    let val = obj.value_raw(&trial);
                    if val < best.0 - MIN_GAIN {
                        best = (val, to);
                    }
                }
                let (val, to) = best;
                if to == from {
                    continue;
                }
                let row: Vec<f64> = row.to_vec();
                shift(&mut c, side, &row, from, to, m);
                // the other side's image depends on this cell's label
                match side {
                    Side::Omega => {
                        for y in 0..cells {
                            let w = kernel.entry(cell, y);
                            a[y * m + from] -= w;
                            a[y * m + to] += w;
                        }
                    }
                    Side::OmegaPrime => {
                        for x in 0..cells {
                            let w = kernel.entry(x, cell);
                            b[x * m + from] -= w;
                            b[x * m + to] += w;
                        }
                    }
                }
                parts.set_label(side, cell, to);
                current = val;
                moved = true;
            }
        }
        if !moved || sweeps >= MAX_SWEEPS {
            let (_, _, c) = images(table, &parts)?;
            let objective = obj.value_raw(&c);
            return Ok(LocalMinimum { partition: parts, objective, restart, sweeps });
        }
    }
}
