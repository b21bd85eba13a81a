//! Simplex-valued cell functions and the noise-stability matrix `C_ρ(f, g)`.

mod borell;
mod cell;
mod coeffs;
mod crho;
mod matrix;

pub use borell::{borell_bounds, BorellBounds};
pub use cell::{CellFunction, CellGrid, SimplexPoint, MAX_CELLS};
pub use coeffs::{
    coeff_distance, crho_contract_raw, crho_from_coeffs, drho_metric, hermite_coeffs, HermiteCoefficients,
    COEFF_WORK_BUDGET,
};
pub(crate) use crho::pair_raw;
pub use crho::{
    axis_probabilities, crho, crho_montecarlo, crho_quadrature, MonteCarloEstimate, RectangleTable,
    DEFAULT_PANEL_ORDER, MIN_MC_SAMPLES,
};
pub(crate) use matrix::tv_raw;
pub use matrix::{l2_distance, tv_distance, DistributionMatrix};
