//! Quadratic objectives over partition pairs and numerical checks of their first and second
//! variations.

mod field;
mod first;
mod objective;
mod partition;
mod search;
mod second;

pub use first::{first_variation_residual, FirstVariationReport, InterfaceResidual, NotApplicable, PairResidual};
pub use objective::{u_coefficients, QuadraticObjective, UCoefficients};
pub use partition::{PartitionGrid, Side};
pub use search::{eval_objective, grid_local_search, is_local_minimum, LocalMinimum};
pub use second::{
    translation_eigen_identity_check, translation_eigen_identity_check_with_tolerance,
    translation_second_variation, TranslationSecondVariation,
};
