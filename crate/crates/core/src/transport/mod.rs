//! Gaussian reference functions, transport maps, weight profiles and the
//! distances they induce.

pub mod distance;
pub mod gauss;
pub mod map;
pub mod weight;

pub use distance::DistanceEvaluator;
pub use gauss::{gauss_functions, GaussFunctions, RadialGaussian, ReferenceLaw, TruncatedGaussian};
pub use map::{build_map, build_map_1d, build_map_radial, Target, TransportMap, ANGULAR_LIMIT};
pub use weight::{
    radial_inf, weight_1d, weight_envelope, weight_from_beta, weight_radial, WeightProfile, WeightSource, R_MIN,
};
