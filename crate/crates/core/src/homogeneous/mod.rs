//! Homogeneous indices of spheres of contact structures on `S^1 x S^2`, and
//! the stable homotopy groups of the space of linear complex structures.
mod datum;
mod forms;
mod groups;
mod rotation;

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use datum::EvaluationDatum;
pub use forms::{
    AffineForm, ConstantForm, ContactFormFamily, ContactFormRef, LinearSphereFamily, Point, ReparametrizedForm,
    RotationPushforward, FORM_DIFF_STEP,
};
pub use groups::{stable_group, GroupDescriptor, HomotopyGroup};
pub use rotation::axis_angle_rotation;

use crate::degree::{certified_degree, Budget, DegreeResult};
use crate::error::{Error, Result};
use crate::sphere::{tangent_frame, SphereMap, UnitVector};

/// Smallest accepted norm of a restricted covector.
pub const TRANSVERSALITY_TOLERANCE: f64 = 1e-9;
/// Smallest accepted `|alpha ^ d alpha|` on an orthonormal frame.
pub const CONTACT_MARGIN: f64 = 1e-9;

/// `e -> ` unit normal of the cooriented plane `ker alpha_e` at the datum,
/// in the datum's frame.
pub struct GaussMap<F> {
    family: F,
    datum: EvaluationDatum,
}

pub fn gauss_evaluation<F: ContactFormFamily>(family: F, datum: EvaluationDatum) -> Result<GaussMap<F>> {
    if family.param_dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: family.param_dim() });
    }
    Ok(GaussMap { family, datum })
}

impl<F: ContactFormFamily> SphereMap for GaussMap<F> {
    fn domain_dim(&self) -> usize {
        2
    }
    fn codomain_dim(&self) -> usize {
        2
    }
    fn eval(&self, e: &UnitVector) -> Result<UnitVector> {
        let c = self.family.form(e, self.datum.point())?;
        let v: Vec<f64> = self.datum.frame().iter().map(|t| c.dot(t)).collect();
        if v.iter().map(|x| x * x).sum::<f64>().sqrt() < TRANSVERSALITY_TOLERANCE {
            return Err(Error::NotTransverse { parameter: e.coords().to_vec() });
        }
        UnitVector::new(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonReport {
    pub value: i64,
    pub family: String,
    pub datum: EvaluationDatum,
    pub degree: DegreeResult,
}

/// The homogeneous index: the degree of the Gauss evaluation.
pub fn epsilon_index<F: ContactFormFamily>(
    family: F,
    datum: EvaluationDatum,
    budget: &Budget,
    seed: u64,
) -> Result<EpsilonReport> {
    let name = family.name();
    let g = gauss_evaluation(family, datum.clone())?;
    let degree = certified_degree(&g, 2, budget, seed)?;
    Ok(EpsilonReport { value: degree.degree, family: name, datum, degree })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactCheck {
    pub contact: bool,
    /// Smallest `|alpha ^ d alpha|` on positive orthonormal frames, negated
    /// when the sign changes somewhere.
    pub worst_margin: f64,
    /// Sign of `alpha ^ d alpha` at the first sample.
    pub sign: i8,
    pub samples: usize,
}

/// `(alpha ^ d alpha)(a, b, c)`.
fn volume(alpha: &Vector4<f64>, d: &Matrix4<f64>, f: &[Vector4<f64>; 3]) -> f64 {
    let da = |x: &Vector4<f64>, y: &Vector4<f64>| x.dot(&(d * y));
    let [a, b, c] = f;
    alpha.dot(a) * da(b, c) - alpha.dot(b) * da(a, c) + alpha.dot(c) * da(a, b)
}

/// Samples `alpha_e ^ d alpha_e` over seeded random points of `S^1 x S^2`.
pub fn contact_check(family: &dyn ContactFormFamily, e: &UnitVector, samples: usize, seed: u64) -> Result<ContactCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sign = 0i8;
    let mut worst = f64::INFINITY;
    for _ in 0..samples.max(1) {
        let theta = rng.random_range(0.0..2.0 * PI);
        let v = UnitVector::random(3, &mut rng).into_coords();
        let q = [theta, v[0], v[1], v[2]];
        let t = tangent_frame(&v);
        let frame = [
            Vector4::new(1.0, 0.0, 0.0, 0.0),
            Vector4::new(0.0, t[0][0], t[0][1], t[0][2]),
            Vector4::new(0.0, t[1][0], t[1][1], t[1][2]),
        ];
        let w = volume(&family.form(e, &q)?, &family.exterior_derivative(e, &q)?, &frame);
        if sign == 0 {
            sign = if w < 0.0 { -1 } else { 1 };
        }
        worst = worst.min(w * sign as f64);
    }
    Ok(ContactCheck { contact: worst > CONTACT_MARGIN, worst_margin: worst, sign, samples: samples.max(1) })
}
