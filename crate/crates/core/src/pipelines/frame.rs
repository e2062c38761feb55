use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::family::TransformationRef;
use super::model::{ModelKind, ModelManifold};
use crate::error::{Error, Result};
use crate::sphere::{dot, norm, GeodesicContraction, UnitVector};
use crate::unitary::{unitarize, CMatrix, UnitaryFamily, DEFAULT_UNITARITY_TOLERANCE};

/// Step of the discrete frame transport along contraction paths.
pub const TRANSPORT_STEP: f64 = 1e-2;

/// How the reference frame is chosen over the relevant locus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FramePolicy {
    /// Standard complex basis of `C^n` (linear contact sphere).
    Ambient,
    /// `d/dx_j` on the torus.
    Coordinate,
    /// Coordinate frame with the first vector multiplied by
    /// `exp(-2 pi i x_d)`, `d` one-based over the `2n` coordinates.
    Twisted { direction: usize },
    /// Image of `d/du` under the inverse stereographic chart from the south
    /// pole (`CP^1`).
    Stereographic,
}

impl FramePolicy {
    pub fn default_for(model: &ModelManifold) -> Self {
        match model.kind {
            ModelKind::LinearContactSphere { .. } => FramePolicy::Ambient,
            ModelKind::Torus { .. } => FramePolicy::Coordinate,
            ModelKind::Cp1 | ModelKind::S1xS2 => FramePolicy::Stereographic,
        }
    }
}

/// A complex frame: real ambient vectors `f_1..f_r`; `f_j` and `J f_j`
/// together form an orthonormal real basis of the fiber.
pub type Frame = Vec<Vec<f64>>;

pub fn policy_frame(model: &ModelManifold, policy: FramePolicy, q: &[f64]) -> Result<Frame> {
    let n = model.ambient_dim();
    let e = |i: usize| {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    };
    match (model.kind, policy) {
        (ModelKind::LinearContactSphere { .. }, FramePolicy::Ambient)
        | (ModelKind::Torus { .. }, FramePolicy::Coordinate) => Ok((0..n / 2).map(|j| e(2 * j)).collect()),
        (ModelKind::Torus { dim }, FramePolicy::Twisted { direction }) => {
            if direction == 0 || direction > dim {
                return Err(Error::InvalidArgument(format!("twist direction {direction} outside 1..={dim}")));
            }
            let phase = -2.0 * PI * q[direction - 1];
            let mut frame: Frame = (0..n / 2).map(|j| e(2 * j)).collect();
            frame[0] = vec![0.0; n];
            frame[0][0] = phase.cos();
            frame[0][1] = phase.sin();
            Ok(frame)
        }
        (ModelKind::Cp1, FramePolicy::Stereographic) => {
            if q[2] < -1.0 + 1e-9 {
                return Err(Error::FrameDegenerate("stereographic frame at the south pole".into()));
            }
            let (u, v) = (q[0] / (1.0 + q[2]), q[1] / (1.0 + q[2]));
            let s = 1.0 + u * u + v * v;
            let d = [2.0 * (s - 2.0 * u * u), -4.0 * u * v, -4.0 * u];
            let nd = norm(&d);
            Ok(vec![d.iter().map(|x| x / nd).collect()])
        }
        _ => Err(Error::InvalidArgument(format!("frame policy {policy:?} does not apply to {}", model.name()))),
    }
}

/// Complex coordinates `<w, f_i> + i <w, J f_i>` of `w` in `frame`.
fn coordinates(model: &ModelManifold, q: &[f64], frame: &Frame, w: &[f64]) -> Vec<Complex64> {
    frame
        .iter()
        .map(|f| Complex64::new(dot(w, f), dot(w, &model.complex_structure(q, f))))
        .collect()
}

/// Unitarized matrix of the complex-linear part of `d`, from the frame at
/// `p` to the frame at `q`.
pub fn frame_transition(
    model: &ModelManifold,
    p: &[f64],
    frame_p: &Frame,
    q: &[f64],
    frame_q: &Frame,
    d: &nalgebra::DMatrix<f64>,
) -> Result<CMatrix> {
    let r = frame_p.len();
    let mut m = CMatrix::zeros(r, r);
    for (j, f) in frame_p.iter().enumerate() {
        let a = d * DVector::from_column_slice(f);
        let b = d * DVector::from_vec(model.complex_structure(p, f));
        let ca = coordinates(model, q, frame_q, a.as_slice());
        let cb = coordinates(model, q, frame_q, b.as_slice());
        for i in 0..r {
            m[(i, j)] = (ca[i] - Complex64::i() * cb[i]) * 0.5;
        }
    }
    unitarize(&m, DEFAULT_UNITARITY_TOLERANCE).map_err(|e| match e {
        Error::RankDeficient { bound } => {
            Error::FrameDegenerate(format!("pushed frame is degenerate (inverse norm {bound:.3e})"))
        }
        e => e,
    })
}

/// Projects `frame` onto the fiber at `q` and re-orthonormalizes it over
/// `C` with the complex structure at `q`.
pub fn reorthonormalize(model: &ModelManifold, q: &[f64], frame: &Frame) -> Result<Frame> {
    let mut out: Frame = Vec::with_capacity(frame.len());
    for f in frame {
        let mut v = model.project(q, f);
        for g in &out {
            let jg = model.complex_structure(q, g);
            let (a, b) = (dot(&v, g), dot(&v, &jg));
            for ((vi, gi), ji) in v.iter_mut().zip(g).zip(&jg) {
                *vi -= a * gi + b * ji;
            }
        }
        let nv = norm(&v);
        if nv < 1e-6 {
            return Err(Error::FrameDegenerate(format!("frame collapsed during transport at {q:?}")));
        }
        out.push(v.into_iter().map(|x| x / nv).collect());
    }
    Ok(out)
}

/// Reference frames over the orbit `sigma -> s(sigma) p`.
#[derive(Clone)]
pub enum FrameField {
    Policy(FramePolicy),
    /// A fixed frame at the contraction target, carried back along each
    /// contraction path (constant when the fiber is flat).
    Transported { contraction: Arc<GeodesicContraction>, target_frame: Frame },
}

impl FrameField {
    fn frame(&self, model: &ModelManifold, s: &UnitVector, q: &[f64]) -> Result<Frame> {
        match self {
            FrameField::Policy(policy) => policy_frame(model, *policy, q),
            FrameField::Transported { contraction, target_frame } => {
                if model.flat_fiber() {
                    return Ok(target_frame.clone());
                }
                let path = contraction.path(s, TRANSPORT_STEP)?;
                let mut frame = target_frame.clone();
                for point in path.iter().rev().skip(1) {
                    frame = reorthonormalize(model, point.coords(), &frame)?;
                }
                let _ = q;
                Ok(frame)
            }
        }
    }
}

/// `sigma -> unitarize(lambda(s(sigma) p)^-1 Ds(sigma)|_p lambda(p))`.
pub struct PushedFrameFamily {
    model: ModelManifold,
    family: TransformationRef,
    p: Vec<f64>,
    frame_p: Frame,
    field: FrameField,
}

impl PushedFrameFamily {
    pub fn new(model: ModelManifold, family: TransformationRef, p: Vec<f64>, frame_p: Frame, field: FrameField) -> Result<Self> {
        model.check_point(&p)?;
        if family.ambient_dim() != model.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: model.ambient_dim(), found: family.ambient_dim() });
        }
        if frame_p.len() != model.frame_rank() {
            return Err(Error::DimensionMismatch { expected: model.frame_rank(), found: frame_p.len() });
        }
        Ok(PushedFrameFamily { model, family, p, frame_p, field })
    }
}

impl UnitaryFamily for PushedFrameFamily {
    fn param_dim(&self) -> usize {
        self.family.param_dim()
    }
    fn size(&self) -> usize {
        self.model.frame_rank()
    }
    fn matrix(&self, s: &UnitVector) -> Result<CMatrix> {
        let q = self.family.act(s, &self.p)?;
        let d = self.family.differential(s, &self.p)?;
        let frame_q = self.field.frame(&self.model, s, &q)?;
        frame_transition(&self.model, &self.p, &self.frame_p, &q, &frame_q, &d)
    }
}

/// The transition family of `family` at `p` for a frame policy.
pub fn pushed_frame_transition(
    model: &ModelManifold,
    family: TransformationRef,
    p: &[f64],
    policy: FramePolicy,
) -> Result<PushedFrameFamily> {
    let frame_p = policy_frame(model, policy, p)?;
    PushedFrameFamily::new(model.clone(), family, p.to_vec(), frame_p, FrameField::Policy(policy))
}

/// Some unitary frame at `q`, used at basepoints and contraction targets.
pub fn basepoint_frame(model: &ModelManifold, q: &[f64]) -> Result<Frame> {
    match model.kind {
        ModelKind::Cp1 => {
            for axis in 0..3 {
                let mut e = vec![0.0; 3];
                e[axis] = 1.0;
                let v = model.project(q, &e);
                if norm(&v) > 0.5 {
                    return reorthonormalize(model, q, &vec![v]);
                }
            }
            Err(Error::FrameDegenerate(format!("no frame at {q:?}")))
        }
        _ => policy_frame(model, FramePolicy::default_for(model), q),
    }
}
