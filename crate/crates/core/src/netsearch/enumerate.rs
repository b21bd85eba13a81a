use crate::stability::{CellFunction, CellGrid};

use super::net::SimplexNet;

/// Lexicographic stream of every cell function on a grid with values in a net, capped by a budget.
///
/// The first cell is the most significant digit; digits index the net's point list.
#[derive(Debug, Clone)]
pub struct CellFunctionStream<'a> {
    grid: CellGrid,
    net: &'a SimplexNet,
    digits: Vec<usize>,
    emitted: usize,
    budget: usize,
    exhausted: bool,
    truncated: bool,
}

/// Starts the enumeration of all functions `grid → net`.
pub fn enumerate_cell_functions(grid: CellGrid, net: &SimplexNet, budget: usize) -> CellFunctionStream<'_> {
    CellFunctionStream {
        grid,
        net,
        digits: vec![0; grid.cell_count()],
        emitted: 0,
        budget,
        exhausted: net.is_empty(),
        truncated: false,
    }
}

impl CellFunctionStream<'_> {
    /// True once the budget stopped the stream before the space was exhausted.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn emitted(&self) -> usize {
        self.emitted
    }

    /// Size of the full space `|net|^cells`, if it fits in a `u128`.
    pub fn total(&self) -> Option<u128> {
        (self.net.len() as u128).checked_pow(self.grid.cell_count() as u32)
    }

    /// Net indices of the next function, without materializing it.
    pub fn next_digits(&mut self) -> Option<Vec<usize>> {
        if self.exhausted {
            return None;
        }
        if self.emitted >= self.budget {
            self.truncated = true;
            return None;
        }
        let out = self.digits.clone();
        self.emitted += 1;
        let base = self.net.len();
        let mut pos = self.digits.len();
        loop {
            if pos == 0 {
                self.exhausted = true;
                break;
            }
            pos -= 1;
            self.digits[pos] += 1;
            if self.digits[pos] < base {
                break;
            }
            self.digits[pos] = 0;
        }
        Some(out)
    }
}

impl Iterator for CellFunctionStream<'_> {
    type Item = CellFunction;

    fn next(&mut self) -> Option<CellFunction> {
        let digits = self.next_digits()?;
        Some(function_from_digits(self.grid, self.net, &digits))
    }
}

pub(crate) fn function_from_digits(grid: CellGrid, net: &SimplexNet, digits: &[usize]) -> CellFunction {
    let m = net.m();
    let mut values = Vec::with_capacity(digits.len() * m);
    for &d in digits {
        values.extend_from_slice(net.points()[d].coords());
    }
    CellFunction::from_flat_unchecked(grid, m, values)
}
