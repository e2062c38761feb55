//! Integer degree of maps `S^m -> S^m`.
//!
//! The primary count is piecewise linear: the signed number of image
//! simplices whose radial cone contains a random regular value. A smooth
//! quadrature of the Jacobian is kept as an independent cross-check.

mod certified;
mod integral;
mod pl;

pub use certified::{certified_degree, lipschitz_level};
pub use integral::{degree_estimate_integral, integral_triangulation};
pub use pl::{adaptive_pl_degree, pl_degree, PlOutcome};

use serde::{Deserialize, Serialize};

use crate::sphere::UnitVector;

/// Tolerance below which a barycentric coordinate marks a non-regular value.
pub const BARYCENTRIC_TOLERANCE: f64 = 1e-9;
/// Tolerance below which an image simplex is treated as degenerate.
pub const DETERMINANT_TOLERANCE: f64 = 1e-12;
/// Regular values tried per refinement level before moving on.
pub const MAX_RETRIES_PER_LEVEL: u32 = 20;
/// Allowed gap between the integral estimate and a certified degree.
pub const INTEGRAL_AGREEMENT: f64 = 0.25;

/// Resource limits shared by every pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    /// Deepest refinement level the degree engine may use.
    pub max_level: u32,
    /// Upper bound on simplices visited by one adaptive count.
    pub max_simplices: usize,
    /// Upper bound on simplices used by the integral cross-check.
    pub integral_simplices: usize,
    /// Domain samples for missed-point searches.
    pub missed_point_samples: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_level: 12,
            max_simplices: 40_000_000,
            integral_simplices: 1 << 18,
            missed_point_samples: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeResult {
    pub degree: i64,
    pub level_used: u32,
    pub regular_value: UnitVector,
    /// Regular values rejected as non-regular, over all levels.
    pub retries: u32,
    pub integral_estimate: f64,
    pub integral_level: u32,
    pub certified: bool,
}
