use std::sync::Arc;

use nalgebra::DMatrix;

use super::UnitVector;
use crate::error::{Error, Result};

/// A pure map `S^a -> S^b`.
///
/// Implementations must be deterministic: equal inputs give bitwise-equal
/// outputs. Evaluation may fail when an upstream family leaves its domain
/// of validity (unitarity drift, clearance violations).
pub trait SphereMap: Send + Sync {
    fn domain_dim(&self) -> usize;
    fn codomain_dim(&self) -> usize;
    fn eval(&self, x: &UnitVector) -> Result<UnitVector>;

    /// Optional Lipschitz constant for the great-circle metric.
    fn lipschitz(&self) -> Option<f64> {
        None
    }
}

impl<T: SphereMap + ?Sized> SphereMap for Arc<T> {
    fn domain_dim(&self) -> usize {
        (**self).domain_dim()
    }
    fn codomain_dim(&self) -> usize {
        (**self).codomain_dim()
    }
    fn eval(&self, x: &UnitVector) -> Result<UnitVector> {
        (**self).eval(x)
    }
    fn lipschitz(&self) -> Option<f64> {
        (**self).lipschitz()
    }
}

impl<T: SphereMap + ?Sized> SphereMap for &T {
    fn domain_dim(&self) -> usize {
        (**self).domain_dim()
    }
    fn codomain_dim(&self) -> usize {
        (**self).codomain_dim()
    }
    fn eval(&self, x: &UnitVector) -> Result<UnitVector> {
        (**self).eval(x)
    }
    fn lipschitz(&self) -> Option<f64> {
        (**self).lipschitz()
    }
}

pub(crate) fn check_domain(f: &dyn SphereMap, x: &UnitVector) -> Result<()> {
    if x.dim() != f.domain_dim() {
        return Err(Error::DimensionMismatch { expected: f.domain_dim(), found: x.dim() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityMap(pub usize);

impl SphereMap for IdentityMap {
    fn domain_dim(&self) -> usize {
        self.0
    }
    fn codomain_dim(&self) -> usize {
        self.0
    }
    fn eval(&self, x: &UnitVector) -> Result<UnitVector> {
        Ok(x.clone())
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AntipodalMap(pub usize);

impl SphereMap for AntipodalMap {
    fn domain_dim(&self) -> usize {
        self.0
    }
    fn codomain_dim(&self) -> usize {
        self.0
    }
    fn eval(&self, x: &UnitVector) -> Result<UnitVector> {
        Ok(x.antipode())
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
}

#[derive(Debug, Clone)]
pub struct ConstantMap {
    pub domain: usize,
    pub value: UnitVector,
}

impl SphereMap for ConstantMap {
    fn domain_dim(&self) -> usize {
        self.domain
    }
    fn codomain_dim(&self) -> usize {
        self.value.dim()
    }
    fn eval(&self, _x: &UnitVector) -> Result<UnitVector> {
        Ok(self.value.clone())
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// `(z, t) -> (z^d / |z|^(d-1), t)` with `z = x_0 + i x_1`; the `(m-1)`-fold
/// suspension of the degree-`d` circle map. Negative `d` conjugates.
#[derive(Debug, Clone, Copy)]
pub struct SuspendedPowerMap {
    pub dim: usize,
    pub power: i32,
}

impl SphereMap for SuspendedPowerMap {
    fn domain_dim(&self) -> usize {
        self.dim
    }
    fn codomain_dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &UnitVector) -> Result<UnitVector> {
        check_domain(self, x)?;
        let c = x.coords();
        let r = c[0].hypot(c[1]);
        let phi = c[1].atan2(c[0]);
        let mut out = c.to_vec();
        let a = phi * self.power as f64;
        out[0] = r * a.cos();
        out[1] = r * a.sin();
        UnitVector::new(out)
    }
    fn lipschitz(&self) -> Option<f64> {
        Some((self.power.unsigned_abs() as f64).max(1.0))
    }
}

/// `f(O x)` for a fixed orthogonal matrix `O` acting on the domain.
pub struct ComposedWithOrthogonal<F> {
    pub inner: F,
    pub orthogonal: DMatrix<f64>,
}

impl<F: SphereMap> SphereMap for ComposedWithOrthogonal<F> {
    fn domain_dim(&self) -> usize {
        self.inner.domain_dim()
    }
    fn codomain_dim(&self) -> usize {
        self.inner.codomain_dim()
    }
    fn eval(&self, x: &UnitVector) -> Result<UnitVector> {
        check_domain(self, x)?;
        let v = nalgebra::DVector::from_column_slice(x.coords());
        let y = &self.orthogonal * v;
        self.inner.eval(&UnitVector::new(y.as_slice().to_vec())?)
    }
    fn lipschitz(&self) -> Option<f64> {
        self.inner.lipschitz()
    }
}

type MapFn = dyn Fn(&UnitVector) -> Result<UnitVector> + Send + Sync;

/// Closure-backed map, mostly for tests and user-supplied rules.
pub struct FnMap {
    domain: usize,
    codomain: usize,
    lipschitz: Option<f64>,
    rule: Box<MapFn>,
}

impl FnMap {
    pub fn new(
        domain: usize,
        codomain: usize,
        rule: impl Fn(&UnitVector) -> Result<UnitVector> + Send + Sync + 'static,
    ) -> Self {
        FnMap { domain, codomain, lipschitz: None, rule: Box::new(rule) }
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }
}

impl SphereMap for FnMap {
    fn domain_dim(&self) -> usize {
        self.domain
    }
    fn codomain_dim(&self) -> usize {
        self.codomain
    }
    fn eval(&self, x: &UnitVector) -> Result<UnitVector> {
        check_domain(self, x)?;
        (self.rule)(x)
    }
    fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }
}
