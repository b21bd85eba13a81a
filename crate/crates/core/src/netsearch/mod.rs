//! Net-based search for simulatable distributions from correlated Gaussian sources.

mod decide;
mod decision;
mod enumerate;
mod net;
mod separated;

pub use decide::{decide_gaussian, default_degree_cap, GaussianDecision, GaussianEcho, SearchConfig, VERIFY_ORDER};
pub use decision::{Decision, Verdict};
pub use enumerate::{enumerate_cell_functions, CellFunctionStream};
pub use net::{simplex_net, simplex_net_with_budget, SimplexNet, DEFAULT_NET_BUDGET};
pub use separated::separated_set;
