//! Higher Maslov indices and homogeneous indices of families of contact and
//! symplectic transformations, computed as certified degrees of sphere maps.

pub mod degree;
pub mod error;
pub mod homogeneous;
pub mod pipelines;
pub mod scenario;
pub mod sphere;
pub mod unitary;

pub use degree::{Budget, DegreeResult};
pub use error::{Error, Result};
