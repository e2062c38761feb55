//! Unit-sphere primitives shared by every index pipeline.
//!
//! Points of `S^m` are stored in ambient coordinates of `R^(m+1)`. The sphere
//! is oriented as the boundary of the unit ball: a tangent frame `(v_1..v_m)`
//! at `x` is positive iff `det[x, v_1, .., v_m] > 0`.

mod homotopy;
mod map;
mod missed;
mod triangulation;

pub use homotopy::{check_endpoints, geodesic_contraction, GeodesicContraction, Homotopy};
pub use map::{
    AntipodalMap, ComposedWithOrthogonal, ConstantMap, FnMap, IdentityMap, SphereMap,
    SuspendedPowerMap,
};
pub use missed::{find_missed_point, find_missed_point_with, MissedPoint, CLEARANCE_TOLERANCE};
pub use triangulation::{base_triangulation, freudenthal_children, refine, SphereTriangulation};
pub(crate) use triangulation::det_small;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_SPHERE_DIM: usize = 6;

/// A point on a unit sphere, normalized at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(UnitVector(coords.into_iter().map(|c| c / norm).collect()))
    }

    /// Standard basis vector `e_i` (zero-based) in `R^len`.
    pub fn basis(len: usize, i: usize) -> Self {
        let mut v = vec![0.0; len];
        v[i] = 1.0;
        UnitVector(v)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        loop {
            let v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(u) = UnitVector::new(v) {
                return u;
            }
        }
    }

    /// Sphere dimension `m` (one less than the ambient length).
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        dot(&self.0, &other.0)
    }

    /// Great-circle distance, robust near 0 and pi.
    pub fn angle(&self, other: &UnitVector) -> f64 {
        angle_between(&self.0, &other.0)
    }

    pub fn antipode(&self) -> Self {
        UnitVector(self.0.iter().map(|c| -c).collect())
    }
}

impl TryFrom<Vec<f64>> for UnitVector {
    type Error = Error;
    /// Already-normalized input is kept bit for bit.
    fn try_from(v: Vec<f64>) -> Result<Self> {
        let n2 = v.iter().map(|c| c * c).sum::<f64>();
        if (n2 - 1.0).abs() < 1e-14 {
            return Ok(UnitVector(v));
        }
        UnitVector::new(v)
    }
}

impl From<UnitVector> for Vec<f64> {
    fn from(u: UnitVector) -> Self {
        u.0
    }
}

impl AsRef<[f64]> for UnitVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Angle between two nonzero vectors via `atan2(|a x b|, a.b)`.
pub(crate) fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    let d = dot(a, b) / (na * nb);
    // |a^b|^2 = |a|^2|b|^2 - (a.b)^2, computed on the normalized difference for stability
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let diff = x / na - y / nb * d.signum();
        s += diff * diff;
    }
    // chord between a/|a| and +-b/|b|
    let chord = s.sqrt();
    let half = (chord / 2.0).min(1.0).asin() * 2.0;
    if d >= 0.0 {
        half
    } else {
        std::f64::consts::PI - half
    }
}

/// Determinant of the square matrix whose columns are `cols`.
pub(crate) fn det_columns(cols: &[&[f64]]) -> f64 {
    let n = cols.len();
    let m = DMatrix::from_fn(n, n, |i, j| cols[j][i]);
    m.determinant()
}

/// Orthonormal basis of the tangent space at `x`, positively oriented.
pub(crate) fn tangent_frame(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut basis: Vec<Vec<f64>> = vec![x.to_vec()];
    let mut order: Vec<usize> = (0..n).collect();
    // prefer axes least aligned with x
    order.sort_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()));
    for &i in &order {
        if basis.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for b in &basis {
            let c = dot(&v, b);
            for (vk, bk) in v.iter_mut().zip(b) {
                *vk -= c * bk;
            }
        }
        let nv = norm(&v);
        if nv > 1e-6 {
            v.iter_mut().for_each(|c| *c /= nv);
            basis.push(v);
        }
    }
    let cols: Vec<&[f64]> = basis.iter().map(|v| v.as_slice()).collect();
    if det_columns(&cols) < 0.0 {
        basis[1].iter_mut().for_each(|c| *c = -*c);
    }
    basis.remove(0);
    basis
}

pub(crate) fn check_sphere_dim(m: usize) -> Result<()> {
    if (1..=MAX_SPHERE_DIM).contains(&m) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn constructor_normalizes_and_rejects_zero() {
        let u = UnitVector::new(vec![3.0, 4.0]).unwrap();
        assert!((u.coords()[0] - 0.6).abs() < 1e-15);
        assert!((norm(u.coords()) - 1.0).abs() < 1e-12);
        assert_eq!(UnitVector::new(vec![0.0, 0.0, 0.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn angles_are_accurate_at_extremes() {
        let a = UnitVector::basis(3, 0);
        assert!(a.angle(&a).abs() < 1e-15);
        assert!((a.angle(&a.antipode()) - PI).abs() < 1e-15);
        let b = UnitVector::new(vec![1.0, 1e-9, 0.0]).unwrap();
        assert!((a.angle(&b) - 1e-9).abs() < 1e-20);
        let c = UnitVector::basis(3, 1);
        assert!((a.angle(&c) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn tangent_frames_are_orthonormal_and_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for len in 2..=7 {
            for _ in 0..20 {
                let x = UnitVector::random(len, &mut rng);
                let frame = tangent_frame(x.coords());
                assert_eq!(frame.len(), len - 1);
                for (i, v) in frame.iter().enumerate() {
                    assert!(dot(v, x.coords()).abs() < 1e-12);
                    for (j, w) in frame.iter().enumerate() {
                        let expect = if i == j { 1.0 } else { 0.0 };
                        assert!((dot(v, w) - expect).abs() < 1e-12);
                    }
                }
                let mut cols: Vec<&[f64]> = vec![x.coords()];
                cols.extend(frame.iter().map(|v| v.as_slice()));
                assert!((det_columns(&cols) - 1.0).abs() < 1e-10);
            }
        }
    }
}
