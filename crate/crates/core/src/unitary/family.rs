use std::sync::Arc;

use num_complex::Complex64;

use super::{realify, unitarity_defect, CMatrix};
use crate::error::{Error, Result};
use crate::sphere::{SphereMap, UnitVector};

pub const DEFAULT_UNITARITY_TOLERANCE: f64 = 1e-8;

/// A map `S^(2k-1) -> U(n)`.
///
/// Implementors provide [`UnitaryFamily::matrix`]; callers use
/// [`UnitaryFamily::eval`], which checks the parameter dimension and the
/// unitarity tolerance on every evaluation.
pub trait UnitaryFamily: Send + Sync {
    /// Dimension `2k-1` of the parameter sphere.
    fn param_dim(&self) -> usize;
    /// Matrix size `n`.
    fn size(&self) -> usize;
    fn matrix(&self, x: &UnitVector) -> Result<CMatrix>;

    fn tolerance(&self) -> f64 {
        DEFAULT_UNITARITY_TOLERANCE
    }

    /// Lipschitz constant from the great-circle metric to the operator norm.
    fn lipschitz(&self) -> Option<f64> {
        None
    }

    fn eval(&self, x: &UnitVector) -> Result<CMatrix> {
        if x.dim() != self.param_dim() {
            return Err(Error::DimensionMismatch { expected: self.param_dim(), found: x.dim() });
        }
        let m = self.matrix(x)?;
        let defect = unitarity_defect(&m);
        if !(defect <= self.tolerance()) {
            return Err(Error::UnitarityDrift { defect, tolerance: self.tolerance() });
        }
        Ok(m)
    }
}

pub type FamilyRef = Arc<dyn UnitaryFamily>;

impl<T: UnitaryFamily + ?Sized> UnitaryFamily for Arc<T> {
    fn param_dim(&self) -> usize {
        (**self).param_dim()
    }
    fn size(&self) -> usize {
        (**self).size()
    }
    fn matrix(&self, x: &UnitVector) -> Result<CMatrix> {
        (**self).matrix(x)
    }
    fn tolerance(&self) -> f64 {
        (**self).tolerance()
    }
    fn lipschitz(&self) -> Option<f64> {
        (**self).lipschitz()
    }
    fn eval(&self, x: &UnitVector) -> Result<CMatrix> {
        (**self).eval(x)
    }
}

/// `sigma -> column j of F(sigma)` as a point of `S^(2n-1)` (zero-based `j`).
pub struct ColumnMap {
    family: FamilyRef,
    column: usize,
}

/// Column map with a one-based column index.
pub fn column_map(family: FamilyRef, j: usize) -> Result<ColumnMap> {
    if j == 0 || j > family.size() {
        return Err(Error::InvalidArgument(format!("column {j} outside 1..={}", family.size())));
    }
    Ok(ColumnMap { family, column: j - 1 })
}

impl SphereMap for ColumnMap {
    fn domain_dim(&self) -> usize {
        self.family.param_dim()
    }
    fn codomain_dim(&self) -> usize {
        2 * self.family.size() - 1
    }
    fn eval(&self, x: &UnitVector) -> Result<UnitVector> {
        let m = self.family.eval(x)?;
        let col: Vec<Complex64> = m.column(self.column).iter().copied().collect();
        UnitVector::new(realify(&col))
    }
    fn lipschitz(&self) -> Option<f64> {
        self.family.lipschitz()
    }
}
