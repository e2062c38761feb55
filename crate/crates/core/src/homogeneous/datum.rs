use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::forms::Point;
use super::rotation::axis_angle_rotation;
use crate::error::{Error, Result};
use crate::sphere::{tangent_frame, UnitVector};

/// A point of `S^1 x S^2` with a positively oriented orthonormal frame of
/// its tangent space, vectors in ambient coordinates `(theta; x, y, z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDatum", into = "RawDatum")]
pub struct EvaluationDatum {
    point: Point,
    frame: [Vector4<f64>; 3],
}

#[derive(Serialize, Deserialize)]
struct RawDatum {
    point: Point,
    frame: [[f64; 4]; 3],
}

impl TryFrom<RawDatum> for EvaluationDatum {
    type Error = Error;
    fn try_from(r: RawDatum) -> Result<Self> {
        EvaluationDatum::new(r.point, r.frame.map(Vector4::from))
    }
}

impl From<EvaluationDatum> for RawDatum {
    fn from(d: EvaluationDatum) -> Self {
        RawDatum { point: d.point, frame: d.frame.map(Into::into) }
    }
}

const FRAME_TOLERANCE: f64 = 1e-9;

impl EvaluationDatum {
    pub fn new(point: Point, frame: [Vector4<f64>; 3]) -> Result<Self> {
        let v = Vector3::new(point[1], point[2], point[3]);
        if (v.norm() - 1.0).abs() > FRAME_TOLERANCE {
            return Err(Error::InvalidArgument(format!("{point:?} is not a point of S^1 x S^2")));
        }
        let normal = Vector4::new(0.0, v[0], v[1], v[2]);
        for (i, a) in frame.iter().enumerate() {
            if a.dot(&normal).abs() > FRAME_TOLERANCE {
                return Err(Error::InvalidArgument(format!("frame vector {i} is not tangent")));
            }
            for (j, b) in frame.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                if (a.dot(b) - want).abs() > FRAME_TOLERANCE {
                    return Err(Error::InvalidArgument("frame is not orthonormal".into()));
                }
            }
        }
        if Matrix4::from_columns(&[frame[0], frame[1], frame[2], normal]).determinant() < 0.0 {
            return Err(Error::InvalidArgument("frame is negatively oriented".into()));
        }
        Ok(EvaluationDatum { point, frame })
    }

    /// `p = (0; 0, 0, 1)` with the frame `(d/dtheta, d/dx, d/dy)`.
    pub fn standard() -> Self {
        let e = |i| Vector4::ith(i, 1.0);
        EvaluationDatum::new([0.0, 0.0, 0.0, 1.0], [e(0), e(1), e(2)]).expect("standard datum")
    }

    /// Uniformly random point with a randomly rotated positive frame.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = rng.random_range(0.0..2.0 * PI);
        let v = UnitVector::random(3, &mut rng).into_coords();
        let t = tangent_frame(&v);
        let base = [
            Vector4::new(1.0, 0.0, 0.0, 0.0),
            Vector4::new(0.0, t[0][0], t[0][1], t[0][2]),
            Vector4::new(0.0, t[1][0], t[1][1], t[1][2]),
        ];
        let axis = UnitVector::random(3, &mut rng);
        let angle = rng.random_range(0.0..2.0 * PI);
        let r = axis_angle_rotation(axis.coords(), angle).expect("unit axis");
        let frame = std::array::from_fn(|j| (0..3).map(|i| base[i] * r[(i, j)]).sum());
        EvaluationDatum::new([theta, v[0], v[1], v[2]], frame).expect("rotated frame stays positive")
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    pub fn frame(&self) -> &[Vector4<f64>; 3] {
        &self.frame
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_data_are_valid() {
        for seed in 0..50 {
            let d = EvaluationDatum::random(seed);
            assert!(EvaluationDatum::new(d.point, d.frame).is_ok());
        }
    }

    #[test]
    fn orientation_is_checked() {
        let e = |i| Vector4::ith(i, 1.0);
        assert!(EvaluationDatum::new([0.0, 0.0, 0.0, 1.0], [e(0), e(2), e(1)]).is_err());
        assert!(EvaluationDatum::new([0.0, 0.0, 0.0, 1.0], [e(0), e(1), e(3)]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let d = EvaluationDatum::random(3);
        let back: EvaluationDatum = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }
}
