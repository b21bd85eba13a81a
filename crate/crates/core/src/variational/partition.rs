use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stability::{CellFunction, CellGrid};

/// Two partitions `Ω_1..Ω_m` and `Ω′_1..Ω′_m` of `R^k`, each cell carrying one label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PartitionJson", into = "PartitionJson")]
pub struct PartitionGrid {
    grid: CellGrid,
    m: usize,
    omega: Vec<usize>,
    omega_prime: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionJson {
    dimension: usize,
    radius: f64,
    cells_per_axis: usize,
    m: usize,
    omega: Vec<usize>,
    omega_prime: Vec<usize>,
}

/// Which of the two partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Omega,
    OmegaPrime,
}

/// A face between two differently labeled neighbouring cells, with `lo` on the side of
/// smaller coordinate along `axis`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Face {
    pub point: Vec<f64>,
    pub lo: usize,
    pub hi: usize,
}

impl Face {
    /// The pair `(a, b)` with `a < b` and the sign of `⟨e_axis, N_ab⟩`.
    pub fn pair(&self) -> (usize, usize, f64) {
        if self.lo < self.hi {
            (self.lo, self.hi, 1.0)
        } else {
            (self.hi, self.lo, -1.0)
        }
    }
}

impl PartitionGrid {
    pub fn new(grid: CellGrid, m: usize, omega: Vec<usize>, omega_prime: Vec<usize>) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 labels, got {m}")));
        }
        for (name, labels) in [("omega", &omega), ("omega_prime", &omega_prime)] {
            if labels.len() != grid.cell_count() {
                return Err(Error::InvalidGrid(format!(
                    "{name} has {} labels for {} cells",
                    labels.len(),
                    grid.cell_count()
                )));
            }
            if let Some(bad) = labels.iter().find(|&&l| l >= m) {
                return Err(Error::InvalidGrid(format!("{name} label {bad} is not below m = {m}")));
            }
        }
        Ok(PartitionGrid { grid, m, omega, omega_prime })
    }

    /// Every cell of `Ω` labeled `i` and every cell of `Ω′` labeled `j`.
    pub fn constant(grid: CellGrid, m: usize, i: usize, j: usize) -> Result<Self> {
        let n = grid.cell_count();
        Self::new(grid, m, vec![i; n], vec![j; n])
    }

    /// Labels from a rule on cell centers.
    pub fn from_fn(grid: CellGrid, m: usize, mut f: impl FnMut(&[f64]) -> (usize, usize)) -> Result<Self> {
        let mut omega = Vec::with_capacity(grid.cell_count());
        let mut omega_prime = Vec::with_capacity(grid.cell_count());
        for c in 0..grid.cell_count() {
            let x: Vec<f64> = grid.unflatten(c).iter().map(|&i| grid.axis_center(i)).collect();
            let (a, b) = f(&x);
            omega.push(a);
            omega_prime.push(b);
        }
        Self::new(grid, m, omega, omega_prime)
    }

    pub fn grid(&self) -> &CellGrid {
        &self.grid
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn omega(&self) -> &[usize] {
        &self.omega
    }

    pub fn omega_prime(&self) -> &[usize] {
        &self.omega_prime
    }

    pub fn labels(&self, side: Side) -> &[usize] {
        match side {
            Side::Omega => &self.omega,
            Side::OmegaPrime => &self.omega_prime,
        }
    }

    /// The vertex-valued functions `(1_{Ω_i})_i` and `(1_{Ω′_j})_j`.
    pub fn to_cell_functions(&self) -> (CellFunction, CellFunction) {
        let f = CellFunction::from_labels(self.grid, self.m, &self.omega).expect("labels validated");
        let g = CellFunction::from_labels(self.grid, self.m, &self.omega_prime).expect("labels validated");
        (f, g)
    }

    pub(crate) fn set_label(&mut self, side: Side, cell: usize, label: usize) {
        match side {
            Side::Omega => self.omega[cell] = label,
            Side::OmegaPrime => self.omega_prime[cell] = label,
        }
    }

    /// Midpoints of faces separating differently labeled cells.
    pub(crate) fn faces(&self, side: Side) -> Vec<Face> {
        let labels = self.labels(side);
        let g = &self.grid;
        let (n, k) = (g.axis_len(), g.dimension());
        let edges = g.axis_edges();
        let mut out = Vec::new();
        for cell in 0..g.cell_count() {
            let idx = g.unflatten(cell);
            for d in 0..k {
                if idx[d] + 1 >= n {
                    continue;
                }
                let nb = cell + n.pow((k - 1 - d) as u32);
                if labels[cell] == labels[nb] {
                    continue;
                }
                let point = (0..k).map(|a| if a == d { edges[idx[d] + 1] } else { g.axis_center(idx[a]) }).collect();
                out.push(Face { point, lo: labels[cell], hi: labels[nb] });
            }
        }
        out
    }
}

impl TryFrom<PartitionJson> for PartitionGrid {
    type Error = Error;

    fn try_from(j: PartitionJson) -> Result<Self> {
        let grid = CellGrid::new(j.dimension, j.radius, j.cells_per_axis)?;
        PartitionGrid::new(grid, j.m, j.omega, j.omega_prime)
    }
}

impl From<PartitionGrid> for PartitionJson {
    fn from(p: PartitionGrid) -> Self {
        PartitionJson {
            dimension: p.grid.dimension(),
            radius: p.grid.radius(),
            cells_per_axis: p.grid.cells_per_axis(),
            m: p.m,
            omega: p.omega,
            omega_prime: p.omega_prime,
        }
    }
}
