use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use super::rotation::axis_angle_rotation;
use crate::error::{Error, Result};
use crate::sphere::UnitVector;

/// Step of the central differences used for non-polynomial families.
pub const FORM_DIFF_STEP: f64 = 1e-5;

/// A point `(theta; x, y, z)` of `S^1 x S^2`.
pub type Point = [f64; 4];

/// A family of 1-forms on `S^1 x S^2` parametrized by `S^2`, given by its
/// coefficients `(c_theta, c_x, c_y, c_z)` in ambient coordinates.
pub trait ContactFormFamily: Send + Sync {
    fn name(&self) -> String;

    fn param_dim(&self) -> usize {
        2
    }

    fn form(&self, e: &UnitVector, q: &Point) -> Result<Vector4<f64>>;

    /// `d alpha` as the antisymmetric matrix `(d alpha)_ij = d_i c_j - d_j c_i`.
    fn exterior_derivative(&self, e: &UnitVector, q: &Point) -> Result<Matrix4<f64>> {
        let mut jac = Matrix4::zeros();
        for j in 0..4 {
            let (mut a, mut b) = (*q, *q);
            a[j] += FORM_DIFF_STEP;
            b[j] -= FORM_DIFF_STEP;
            let col = (self.form(e, &a)? - self.form(e, &b)?) / (2.0 * FORM_DIFF_STEP);
            jac.set_column(j, &col);
        }
        // jac[(i, j)] = d_j c_i
        Ok(jac.transpose() - jac)
    }
}

pub type ContactFormRef = Arc<dyn ContactFormFamily>;

impl<T: ContactFormFamily + ?Sized> ContactFormFamily for Arc<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn param_dim(&self) -> usize {
        (**self).param_dim()
    }
    fn form(&self, e: &UnitVector, q: &Point) -> Result<Vector4<f64>> {
        (**self).form(e, q)
    }
    fn exterior_derivative(&self, e: &UnitVector, q: &Point) -> Result<Matrix4<f64>> {
        (**self).exterior_derivative(e, q)
    }
}

/// A 1-form whose coefficients are affine in `(x, y, z)`:
/// `c = offset + linear * (x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineForm {
    pub offset: [f64; 4],
    /// Row `i` holds the coefficients of `c_i`.
    pub linear: [[f64; 3]; 4],
}

impl AffineForm {
    /// `z dtheta + x dy - y dx`
    pub fn alpha0() -> Self {
        AffineForm { offset: [0.0; 4], linear: [[0., 0., 1.], [0., -1., 0.], [1., 0., 0.], [0., 0., 0.]] }
    }

    /// `x dtheta + y dz - z dy`
    pub fn alpha1() -> Self {
        AffineForm { offset: [0.0; 4], linear: [[1., 0., 0.], [0., 0., 0.], [0., 0., -1.], [0., 1., 0.]] }
    }

    /// `y dtheta + z dx - x dz`
    pub fn alpha2() -> Self {
        AffineForm { offset: [0.0; 4], linear: [[0., 1., 0.], [0., 0., 1.], [0., 0., 0.], [-1., 0., 0.]] }
    }

    /// The closed form `dtheta`.
    pub fn dtheta() -> Self {
        AffineForm { offset: [1.0, 0.0, 0.0, 0.0], linear: [[0.0; 3]; 4] }
    }

    fn linear_matrix(&self) -> nalgebra::Matrix4x3<f64> {
        nalgebra::Matrix4x3::from_fn(|i, j| self.linear[i][j])
    }

    pub fn eval(&self, q: &Point) -> Vector4<f64> {
        Vector4::from(self.offset) + self.linear_matrix() * Vector3::new(q[1], q[2], q[3])
    }

    pub fn exterior_derivative(&self) -> Matrix4<f64> {
        let mut jac = Matrix4::zeros();
        jac.fixed_view_mut::<4, 3>(0, 1).copy_from(&self.linear_matrix());
        jac.transpose() - jac
    }

    fn scaled_sum(terms: &[(f64, &AffineForm)]) -> (Vector4<f64>, nalgebra::Matrix4x3<f64>) {
        terms.iter().fold((Vector4::zeros(), nalgebra::Matrix4x3::zeros()), |(o, l), (w, f)| {
            (o + Vector4::from(f.offset) * *w, l + f.linear_matrix() * *w)
        })
    }
}

/// The linear contact sphere `e -> e_0 alpha_0 + e_1 alpha_1 + e_2 alpha_2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearSphereFamily;

impl LinearSphereFamily {
    fn combined(e: &UnitVector) -> AffineForm {
        let basis = [AffineForm::alpha0(), AffineForm::alpha1(), AffineForm::alpha2()];
        let c = e.coords();
        let (o, l) = AffineForm::scaled_sum(&[(c[0], &basis[0]), (c[1], &basis[1]), (c[2], &basis[2])]);
        AffineForm { offset: o.into(), linear: std::array::from_fn(|i| std::array::from_fn(|j| l[(i, j)])) }
    }
}

fn check_param(e: &UnitVector) -> Result<()> {
    if e.len() != 3 {
        return Err(Error::DimensionMismatch { expected: 2, found: e.dim() });
    }
    Ok(())
}

impl ContactFormFamily for LinearSphereFamily {
    fn name(&self) -> String {
        "linear_sphere".into()
    }
    fn form(&self, e: &UnitVector, q: &Point) -> Result<Vector4<f64>> {
        check_param(e)?;
        Ok(Self::combined(e).eval(q))
    }
    fn exterior_derivative(&self, e: &UnitVector, _q: &Point) -> Result<Matrix4<f64>> {
        check_param(e)?;
        Ok(Self::combined(e).exterior_derivative())
    }
}

/// A family constant in the parameter.
#[derive(Debug, Clone, Copy)]
pub struct ConstantForm(pub AffineForm);

impl ContactFormFamily for ConstantForm {
    fn name(&self) -> String {
        "constant".into()
    }
    fn form(&self, e: &UnitVector, q: &Point) -> Result<Vector4<f64>> {
        check_param(e)?;
        Ok(self.0.eval(q))
    }
    fn exterior_derivative(&self, e: &UnitVector, _q: &Point) -> Result<Matrix4<f64>> {
        check_param(e)?;
        Ok(self.0.exterior_derivative())
    }
}

/// Push-forward of `ker alpha_0` by `(theta; v) -> (theta; R(e, theta) v)`,
/// `R(e, theta)` the rotation of angle `theta` about the axis `e`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RotationPushforward;

impl ContactFormFamily for RotationPushforward {
    fn name(&self) -> String {
        "rotation_pushforward".into()
    }
    fn form(&self, e: &UnitVector, q: &Point) -> Result<Vector4<f64>> {
        check_param(e)?;
        let axis = Vector3::from_column_slice(e.coords());
        let back: Matrix3<f64> = axis_angle_rotation(e.coords(), -q[0])?;
        let u = back * Vector3::new(q[1], q[2], q[3]);
        let a = AffineForm::alpha0().eval(&[q[0], u[0], u[1], u[2]]);
        let cu = Vector3::new(a[1], a[2], a[3]);
        // the inverse diffeomorphism sends d/dtheta to d/dtheta - e x u
        let c_theta = a[0] - cu.dot(&axis.cross(&u));
        let cv = back.transpose() * cu;
        Ok(Vector4::new(c_theta, cv[0], cv[1], cv[2]))
    }
}

/// `e -> inner(O e)` for an orthogonal `O`.
pub struct ReparametrizedForm {
    inner: ContactFormRef,
    orthogonal: DMatrix<f64>,
}

impl ReparametrizedForm {
    pub fn new(inner: ContactFormRef, orthogonal: DMatrix<f64>) -> Result<Self> {
        if orthogonal.shape() != (3, 3) {
            return Err(Error::DimensionMismatch { expected: 3, found: orthogonal.nrows() });
        }
        if (orthogonal.transpose() * &orthogonal - DMatrix::identity(3, 3)).norm() > 1e-10 {
            return Err(Error::InvalidArgument("reparametrization is not orthogonal".into()));
        }
        Ok(ReparametrizedForm { inner, orthogonal })
    }

    fn map(&self, e: &UnitVector) -> Result<UnitVector> {
        check_param(e)?;
        UnitVector::new((&self.orthogonal * nalgebra::DVector::from_column_slice(e.coords())).as_slice().to_vec())
    }
}

impl ContactFormFamily for ReparametrizedForm {
    fn name(&self) -> String {
        format!("reparametrized({})", self.inner.name())
    }
    fn form(&self, e: &UnitVector, q: &Point) -> Result<Vector4<f64>> {
        self.inner.form(&self.map(e)?, q)
    }
    fn exterior_derivative(&self, e: &UnitVector, q: &Point) -> Result<Matrix4<f64>> {
        self.inner.exterior_derivative(&self.map(e)?, q)
    }
}
