//! Reference measures `e^V dx`: potentials, normalization, distribution
//! functions, exponential moments and discretization.

pub mod density;
pub mod grid;
pub mod normalized;
pub mod parse;
pub mod potential;

pub use density::{Density1D, DensityOptions, LogDensity};
pub use grid::{discretize, GridMeasure, Scheme};
pub use normalized::{ln_sphere_area, normalize, ExpMoment, MomentMode, PotentialMeasure};
pub use parse::{parse_expr, Expr};
pub use potential::{parse_potential, AngularPerturbation, AngularShape, MeasureKind, Potential, PotentialSpec};
