//! Transport costs: the monotone coupling on the line, an exact discrete
//! solver, and density perturbations with their entropy.

pub mod cost;
pub mod discrete;
pub mod perturbation;
pub mod quantile;

pub use cost::CostFn;
pub use discrete::{discrete_ot, solve_transport, TransportPlan, SIZE_LIMIT};
pub use perturbation::{DensityPerturbation, ScalarFn};
pub use quantile::{w_grid_1d, w_pullback, w_quantile_1d, LogQuantile, MappedLaw, QuantileCost, SLIVER};
