use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::missed::CLEARANCE_TOLERANCE;
use super::{dot, norm, SphereMap, UnitVector};
use crate::error::{Error, Result};

/// A family of sphere maps `H(., t)`, `t in [0, 1]`.
pub trait Homotopy: Send + Sync {
    fn domain_dim(&self) -> usize;
    fn codomain_dim(&self) -> usize;
    fn eval(&self, x: &UnitVector, t: f64) -> Result<UnitVector>;
}

/// Largest pointwise distance between `H(., 0)` and `start`, and between
/// `H(., 1)` and `end`, over `samples` seeded random points.
pub fn check_endpoints(
    h: &dyn Homotopy,
    start: &dyn SphereMap,
    end: &dyn SphereMap,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = UnitVector::random(h.domain_dim() + 1, &mut rng);
        worst = worst.max(h.eval(&x, 0.0)?.angle(&start.eval(&x)?));
        worst = worst.max(h.eval(&x, 1.0)?.angle(&end.eval(&x)?));
    }
    Ok(worst)
}

/// Contraction of a map that misses a point: each image point first flows
/// along the great circle away from `missed` to its antipode, then the
/// antipode rotates to `target` along one fixed arc avoiding `missed`.
#[derive(Clone)]
pub struct GeodesicContraction {
    map: Arc<dyn SphereMap>,
    missed: UnitVector,
    target: UnitVector,
}

pub fn geodesic_contraction(
    map: Arc<dyn SphereMap>,
    missed: UnitVector,
    target: UnitVector,
) -> Result<GeodesicContraction> {
    let b = map.codomain_dim();
    if missed.dim() != b || target.dim() != b {
        return Err(Error::DimensionMismatch { expected: b, found: missed.dim().max(target.dim()) });
    }
    if target.angle(&missed) < CLEARANCE_TOLERANCE {
        return Err(Error::InvalidArgument("contraction target equals the missed point".into()));
    }
    Ok(GeodesicContraction { map, missed, target })
}

impl GeodesicContraction {
    pub fn missed(&self) -> &UnitVector {
        &self.missed
    }

    pub fn target(&self) -> &UnitVector {
        &self.target
    }

    pub fn map(&self) -> &Arc<dyn SphereMap> {
        &self.map
    }

    fn escape(&self, y: &UnitVector, s: f64) -> Result<UnitVector> {
        let m = self.missed.coords();
        let theta0 = y.angle(&self.missed);
        if theta0 < CLEARANCE_TOLERANCE {
            return Err(Error::ClearanceViolated { distance: theta0 });
        }
        let c = dot(y.coords(), m);
        let perp: Vec<f64> = y.coords().iter().zip(m).map(|(yi, mi)| yi - c * mi).collect();
        let np = norm(&perp);
        if np < 1e-300 {
            return Ok(self.missed.antipode());
        }
        let theta = theta0 + s * (PI - theta0);
        let (sn, cs) = theta.sin_cos();
        UnitVector::new(m.iter().zip(&perp).map(|(mi, pi)| cs * mi + sn * pi / np).collect())
    }

    fn rotate(&self, s: f64) -> Result<UnitVector> {
        Ok(slerp(&self.missed.antipode(), &self.target, s))
    }

    /// Points of the path `t -> H(x, t)` with consecutive angular steps at
    /// most `max_step`.
    pub fn path(&self, x: &UnitVector, max_step: f64) -> Result<Vec<UnitVector>> {
        let y = self.map.eval(x)?;
        let escape_len = PI - y.angle(&self.missed);
        let n1 = ((escape_len / max_step).ceil() as usize).max(1);
        let mut out = Vec::with_capacity(n1 + 2);
        out.push(y.clone());
        for i in 1..=n1 {
            out.push(self.escape(&y, i as f64 / n1 as f64)?);
        }
        let rot_len = self.missed.antipode().angle(&self.target);
        let n2 = (rot_len / max_step).ceil() as usize;
        for i in 1..=n2 {
            out.push(self.rotate(i as f64 / n2 as f64)?);
        }
        Ok(out)
    }
}

impl Homotopy for GeodesicContraction {
    fn domain_dim(&self) -> usize {
        self.map.domain_dim()
    }

    fn codomain_dim(&self) -> usize {
        self.map.codomain_dim()
    }

    fn eval(&self, x: &UnitVector, t: f64) -> Result<UnitVector> {
        let y = self.map.eval(x)?;
        if t <= 0.5 {
            self.escape(&y, 2.0 * t)
        } else {
            // clearance is still a precondition of the whole homotopy
            let theta0 = y.angle(&self.missed);
            if theta0 < CLEARANCE_TOLERANCE {
                return Err(Error::ClearanceViolated { distance: theta0 });
            }
            self.rotate(2.0 * t - 1.0)
        }
    }
}

pub(crate) fn slerp(a: &UnitVector, b: &UnitVector, s: f64) -> UnitVector {
    let omega = a.angle(b);
    if omega < 1e-12 {
        return a.clone();
    }
    if s >= 1.0 {
        return b.clone();
    }
    let wa = ((1.0 - s) * omega).sin() / omega.sin();
    let wb = (s * omega).sin() / omega.sin();
    UnitVector::new(a.coords().iter().zip(b.coords()).map(|(x, y)| wa * x + wb * y).collect())
        .unwrap_or_else(|_| a.clone())
}
