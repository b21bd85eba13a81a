//! Simplex points and piecewise-constant functions on boxed grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SIMPLEX_TOL: f64 = 1e-12;

/// Hard cap on `(c + 2)^k`.
pub const MAX_CELLS: usize = 1 << 20;

/// A point of the probability simplex `Δ_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        validate_simplex(&coords)?;
        Ok(SimplexPoint(coords))
    }

    /// The vertex `e_i` (zero-based).
    pub fn vertex(m: usize, i: usize) -> Self {
        let mut v = vec![0.0; m];
        v[i] = 1.0;
        SimplexPoint(v)
    }

    pub fn uniform(m: usize) -> Self {
        SimplexPoint(vec![1.0 / m as f64; m])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

pub(crate) fn validate_simplex(coords: &[f64]) -> Result<()> {
    if coords.is_empty() {
        return Err(Error::InvalidSimplexPoint("empty".into()));
    }
    if coords.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::InvalidSimplexPoint(format!("{coords:?} has a negative or non-finite coordinate")));
    }
    let s: f64 = coords.iter().sum();
    if (s - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::InvalidSimplexPoint(format!("coordinates sum to {s}")));
    }
    Ok(())
}

impl TryFrom<Vec<f64>> for SimplexPoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        SimplexPoint::new(v)
    }
}

impl From<SimplexPoint> for Vec<f64> {
    fn from(p: SimplexPoint) -> Vec<f64> {
        p.0
    }
}

/// Axis-aligned grid on `R^k`: each axis has `c` equal cells on `[-R, R)` plus two tail cells.
///
/// Cell `0` on an axis is `(-∞, -R)`, cells `1..=c` are the interior, cell `c + 1` is `[R, ∞)`.
/// Cells are half-open on the right so boundary points belong to the cell with larger
/// coordinates. Flat indices are row-major with the last axis varying fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellGrid {
    dimension: usize,
    radius: f64,
    cells_per_axis: usize,
}

impl CellGrid {
    pub const DEFAULT_RADIUS: f64 = 4.0;

    pub fn new(dimension: usize, radius: f64, cells_per_axis: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidGrid(format!("radius {radius} must be positive and finite")));
        }
        if cells_per_axis == 0 {
            return Err(Error::InvalidGrid("cells_per_axis must be at least 1".into()));
        }
        let n = (cells_per_axis + 2) as u128;
        let total = n.checked_pow(dimension as u32).unwrap_or(u128::MAX);
        if total > MAX_CELLS as u128 {
            return Err(Error::BudgetExceeded { what: "grid cells", required: total, budget: MAX_CELLS as u128 });
        }
        Ok(CellGrid { dimension, radius, cells_per_axis })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    /// Cells per axis including both tails.
    pub fn axis_len(&self) -> usize {
        self.cells_per_axis + 2
    }

    pub fn cell_count(&self) -> usize {
        self.axis_len().pow(self.dimension as u32)
    }

    /// The `c + 3` axis edges `-∞, -R, …, R, ∞`.
    pub fn axis_edges(&self) -> Vec<f64> {
        let c = self.cells_per_axis;
        let h = 2.0 * self.radius / c as f64;
        let mut e = Vec::with_capacity(c + 3);
        e.push(f64::NEG_INFINITY);
        for i in 0..=c {
            e.push(if i == c { self.radius } else { -self.radius + h * i as f64 });
        }
        e.push(f64::INFINITY);
        e
    }

    /// Axis cell containing `x`.
    pub fn axis_cell(&self, x: f64) -> usize {
        let c = self.cells_per_axis;
        if x < -self.radius {
            return 0;
        }
        if x >= self.radius {
            return c + 1;
        }
        let h = 2.0 * self.radius / c as f64;
        let mut i = ((x + self.radius) / h).floor() as usize;
        i = i.min(c - 1);
        // guard against rounding at interior edges
        let edges = |j: usize| -self.radius + h * j as f64;
        if x < edges(i) && i > 0 {
            i -= 1;
        } else if i + 1 < c && x >= edges(i + 1) {
            i += 1;
        }
        i + 1
    }

    /// Flat index of the cell containing `x`.
    pub fn locate(&self, x: &[f64]) -> usize {
        let n = self.axis_len();
        x.iter().fold(0, |acc, &xa| acc * n + self.axis_cell(xa))
    }

    /// Per-axis cell indices of a flat index.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let n = self.axis_len();
        let mut out = vec![0; self.dimension];
        for a in (0..self.dimension).rev() {
            out[a] = flat % n;
            flat /= n;
        }
        out
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        let n = self.axis_len();
        idx.iter().fold(0, |acc, &i| acc * n + i)
    }

    /// A representative coordinate of an axis cell (midpoint; tail cells use `±(R + h/2)`).
    pub fn axis_center(&self, i: usize) -> f64 {
        let c = self.cells_per_axis;
        let h = 2.0 * self.radius / c as f64;
        if i == 0 {
            -self.radius - 0.5 * h
        } else if i == c + 1 {
            self.radius + 0.5 * h
        } else {
            -self.radius + h * (i as f64 - 0.5)
        }
    }
}

/// A function `R^k → Δ_m` constant on the cells of a [`CellGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CellFunctionJson", into = "CellFunctionJson")]
pub struct CellFunction {
    grid: CellGrid,
    m: usize,
    /// `cell_count × m`, row-major.
    values: Vec<f64>,
}

impl CellFunction {
    pub fn new(grid: CellGrid, values: Vec<SimplexPoint>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::DimensionMismatch { expected: grid.cell_count(), found: values.len() });
        }
        let m = values[0].m();
        if m < 1 || values.iter().any(|v| v.m() != m) {
            return Err(Error::InvalidSimplexPoint("cell values have different lengths".into()));
        }
        let values = values.into_iter().flat_map(SimplexPoint::into_inner).collect();
        Ok(CellFunction { grid, m, values })
    }

    /// Builds from a flat `cell_count × m` table, validating each row.
    pub fn from_flat(grid: CellGrid, m: usize, values: Vec<f64>) -> Result<Self> {
        if m == 0 || values.len() != grid.cell_count() * m {
            return Err(Error::DimensionMismatch { expected: grid.cell_count() * m, found: values.len() });
        }
        for row in values.chunks_exact(m) {
            validate_simplex(row)?;
        }
        Ok(CellFunction { grid, m, values })
    }

    pub(crate) fn from_flat_unchecked(grid: CellGrid, m: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.cell_count() * m);
        CellFunction { grid, m, values }
    }

    pub fn constant(grid: CellGrid, value: &SimplexPoint) -> Self {
        let values = value.coords().repeat(grid.cell_count());
        CellFunction { grid, m: value.m(), values }
    }

    /// Vertex-valued function from per-cell labels in `0..m`.
    pub fn from_labels(grid: CellGrid, m: usize, labels: &[usize]) -> Result<Self> {
        if labels.len() != grid.cell_count() {
            return Err(Error::DimensionMismatch { expected: grid.cell_count(), found: labels.len() });
        }
        let mut values = vec![0.0; labels.len() * m];
        for (c, &l) in labels.iter().enumerate() {
            if l >= m {
                return Err(Error::param("label", format!("{l} is not below m = {m}")));
            }
            values[c * m + l] = 1.0;
        }
        Ok(CellFunction { grid, m, values })
    }

    pub fn grid(&self) -> &CellGrid {
        &self.grid
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dimension(&self) -> usize {
        self.grid.dimension
    }

    /// Value on a flat cell index.
    pub fn cell_value(&self, cell: usize) -> &[f64] {
        &self.values[cell * self.m..(cell + 1) * self.m]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at a point.
    pub fn eval(&self, x: &[f64]) -> Result<&[f64]> {
        if x.len() != self.grid.dimension {
            return Err(Error::DimensionMismatch { expected: self.grid.dimension, found: x.len() });
        }
        Ok(self.cell_value(self.grid.locate(x)))
    }

    /// Gaussian mass of each component, `∫ f_i dγ`.
    pub fn component_masses(&self) -> Vec<f64> {
        let probs = super::crho::axis_probabilities(&self.grid);
        let mut out = vec![0.0; self.m];
        for cell in 0..self.grid.cell_count() {
            let idx = self.grid.unflatten(cell);
            let w: f64 = idx.iter().map(|&i| probs[i]).product();
            for (o, v) in out.iter_mut().zip(self.cell_value(cell)) {
                *o += w * v;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellFunctionJson {
    dimension: usize,
    radius: f64,
    cells_per_axis: usize,
    values: Vec<Vec<f64>>,
}

impl TryFrom<CellFunctionJson> for CellFunction {
    type Error = Error;
    fn try_from(j: CellFunctionJson) -> Result<Self> {
        let grid = CellGrid::new(j.dimension, j.radius, j.cells_per_axis)?;
        if j.values.len() != grid.cell_count() {
            return Err(Error::DimensionMismatch { expected: grid.cell_count(), found: j.values.len() });
        }
        let points = j.values.into_iter().map(SimplexPoint::new).collect::<Result<Vec<_>>>()?;
        CellFunction::new(grid, points)
    }
}

impl From<CellFunction> for CellFunctionJson {
    fn from(f: CellFunction) -> Self {
        CellFunctionJson {
            dimension: f.grid.dimension,
            radius: f.grid.radius,
            cells_per_axis: f.grid.cells_per_axis,
            values: f.values.chunks_exact(f.m).map(<[f64]>::to_vec).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_validation() {
        assert!(SimplexPoint::new(vec![0.5, 0.5]).is_ok());
        assert!(SimplexPoint::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexPoint::new(vec![1.5, -0.5]).is_err());
        assert!(SimplexPoint::new(vec![]).is_err());
    }

    #[test]
    fn ties_go_up() {
        let g = CellGrid::new(1, 4.0, 8).unwrap();
        assert_eq!(g.axis_cell(-4.0), 1);
        assert_eq!(g.axis_cell(-4.000001), 0);
        assert_eq!(g.axis_cell(0.0), 5);
        assert_eq!(g.axis_cell(-1e-300), 4);
        assert_eq!(g.axis_cell(4.0), 9);
        assert_eq!(g.axis_cell(3.0), 8);
        assert_eq!(g.axis_cell(2.999999), 7);
    }

    #[test]
    fn locate_round_trip() {
        let g = CellGrid::new(2, 4.0, 3).unwrap();
        for flat in 0..g.cell_count() {
            let idx = g.unflatten(flat);
            assert_eq!(g.flatten(&idx), flat);
            let x: Vec<f64> = idx.iter().map(|&i| g.axis_center(i)).collect();
            assert_eq!(g.locate(&x), flat);
        }
    }

    #[test]
    fn grid_budget() {
        assert!(CellGrid::new(8, 4.0, 8).is_err());
        assert!(CellGrid::new(1, 0.0, 8).is_err());
        assert!(CellGrid::new(1, 4.0, 0).is_err());
    }
}
