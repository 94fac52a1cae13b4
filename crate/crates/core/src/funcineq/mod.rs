//! Test-function families and checkers for the super Poincaré, weighted
//! log-Sobolev, transport-cost, HWI and deviation inequalities, with rate
//! estimation from grids and from moments.

pub mod beta;
pub mod checks;
pub mod deviation;
pub mod estimate;
pub mod family;
pub mod moments;
pub mod report;

pub use beta::BetaProfile;
pub use checks::{check_chain, check_envelope, check_hwi, check_super_poincare, check_talagrand, check_wlsi, HwiForm, TransportCost};
pub use deviation::{deviation_bound, deviation_check, log_enlargement_mass, DeviationSpec, HalfLine, RateFunction};
pub use estimate::{estimate_beta, estimate_beta_table, estimate_beta_witness, GridDirichlet, RateWitness, GRID_LIMIT};
pub use family::{hermite_poly, FamilySpec, Member, ParamRange, TestFunctionFamily};
pub use moments::{beta_from_moments, fit_exp_power, MomentGrid};
pub use report::{InequalityKind, InequalityReport, MemberRecord, DEGENERATE, TOL_BAND};
