//! Explicit Gaussian transport maps for measures `e^V dx`, the weight
//! profiles they induce in weighted log-Sobolev inequalities, and numerical
//! checks of the chain super Poincaré, weighted log-Sobolev, transport-cost,
//! HWI and deviation bounds.
//!
//! The crate is organised bottom-up:
//!
//! - [`measure`]: potentials, normalization, CDF/quantile/tail functionals,
//!   exponential moments, grids.
//! - [`transport`]: Gaussian reference functions, transport maps, weight
//!   profiles, distances.
//! - [`ot`]: transport costs, quantile coupling, an exact discrete solver,
//!   density perturbations and entropy.
//! - [`funcineq`]: test-function families and inequality checkers.

pub mod error;
pub mod funcineq;
pub mod measure;
pub mod ot;
pub mod quadrature;
pub mod roots;
pub mod special;
pub mod transport;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/measures.md")]
    pub struct Measures;
    #[doc = include_str!("../../../book/src/transport.md")]
    pub struct Transport;
    #[doc = include_str!("../../../book/src/weights.md")]
    pub struct Weights;
    #[doc = include_str!("../../../book/src/costs.md")]
    pub struct Costs;
    #[doc = include_str!("../../../book/src/inequalities.md")]
    pub struct Inequalities;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
