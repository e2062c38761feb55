use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::sphere::norm;

/// Proper rotation of `R^3` by `angle` about `axis` (right-hand rule),
/// by the Rodrigues formula.
pub fn axis_angle_rotation(axis: &[f64], angle: f64) -> Result<Matrix3<f64>> {
    if axis.len() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: axis.len() });
    }
    let n = norm(axis);
    if !(n > 1e-300) {
        return Err(Error::ZeroVector);
    }
    let (x, y, z) = (axis[0] / n, axis[1] / n, axis[2] / n);
    let k = Matrix3::new(0.0, -z, y, z, 0.0, -x, -y, x, 0.0);
    let (s, c) = angle.sin_cos();
    Ok(Matrix3::identity() + k * s + k * k * (1.0 - c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_angle_is_identity() {
        let r = axis_angle_rotation(&[0.3, -2.0, 1.0], 0.0).unwrap();
        assert_eq!(r, Matrix3::identity());
    }

    #[test]
    fn quarter_turn_about_z() {
        let r = axis_angle_rotation(&[0.0, 0.0, 1.0], std::f64::consts::FRAC_PI_2).unwrap();
        let v = r * Vector3::new(1.0, 2.0, 3.0);
        assert!((v - Vector3::new(-2.0, 1.0, 3.0)).norm() < 1e-15);
    }

    #[test]
    fn one_parameter_group_law_and_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let axis = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let (a, b): (f64, f64) = (rng.random_range(-7.0..7.0), rng.random_range(-7.0..7.0));
            let ra = axis_angle_rotation(&axis, a).unwrap();
            let rb = axis_angle_rotation(&axis, b).unwrap();
            let rab = axis_angle_rotation(&axis, a + b).unwrap();
            assert!((ra * rb - rab).norm() < 1e-12);
            assert!((ra.determinant() - 1.0).abs() < 1e-12);
            let ax = Vector3::new(axis[0], axis[1], axis[2]);
            assert!((ra * ax - ax).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_axis_is_rejected() {
        assert!(axis_angle_rotation(&[0.0, 0.0, 0.0], 1.0).is_err());
    }
}
