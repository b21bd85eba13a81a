//! Finite sources: maximal correlation, reduction parameters and an exhaustive decider.

mod decide;
mod pmf;
mod reduction;

pub use decide::{decide_discrete, induced_distribution, product_source, DiscreteDecision, DiscreteEcho, DiscreteWitness, MAX_SEQUENCES};
pub use pmf::{alpha_min, maximal_correlation, JointPmf};
pub use reduction::{reduction_params, FormulaMetadata, ReductionParams};
