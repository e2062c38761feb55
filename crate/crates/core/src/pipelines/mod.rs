//! A-type and B-type index computations on model manifolds, and the flux of
//! torus loops.
mod family;
mod flux;
mod frame;
mod model;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use family::{
    check_family, random_point, realify_matrix, standard_symplectic, Cp1Rotation, IdentityTransformation,
    ReparametrizedTransformation, TorusConcatenation, TorusIdentity, TorusLoop, TorusLoopFamily, TorusLoopRef,
    TorusShear, TorusTranslation, TransformationFamily, TransformationRef, UnitaryAction,
};
pub use flux::{flux, FluxReport, LinearCycle, FLUX_TOLERANCE};
pub use frame::{
    basepoint_frame, frame_transition, policy_frame, pushed_frame_transition, reorthonormalize, Frame, FrameField,
    FramePolicy, PushedFrameFamily, TRANSPORT_STEP,
};
pub use model::{ModelKind, ModelManifold};

use crate::degree::{Budget, DegreeResult, BARYCENTRIC_TOLERANCE, DETERMINANT_TOLERANCE, INTEGRAL_AGREEMENT};
use crate::error::{Error, Result};
use crate::sphere::{find_missed_point, geodesic_contraction, SphereMap, UnitVector, CLEARANCE_TOLERANCE};
use crate::unitary::{mu_k_unitary, shared, ReductionTrace, DEFAULT_UNITARITY_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexType {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub unitarity: f64,
    pub clearance: f64,
    pub transport_step: f64,
    pub barycentric: f64,
    pub determinant: f64,
    pub integral_agreement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            unitarity: DEFAULT_UNITARITY_TOLERANCE,
            clearance: CLEARANCE_TOLERANCE,
            transport_step: TRANSPORT_STEP,
            barycentric: BARYCENTRIC_TOLERANCE,
            determinant: DETERMINANT_TOLERANCE,
            integral_agreement: INTEGRAL_AGREEMENT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    /// Reduced mod `modulus` when the modulus is positive.
    pub value: i64,
    /// The integer index before reduction.
    pub raw_value: i64,
    pub modulus: u64,
    pub index_type: IndexType,
    pub k: usize,
    pub degree: DegreeResult,
    pub trace: ReductionTrace,
    pub model: String,
    pub family: String,
    pub basepoint: Vec<f64>,
    pub missed_point: Option<UnitVector>,
    pub certified: bool,
    pub tolerances: Tolerances,
}

/// The orbit `sigma -> s(sigma) p` as a sphere map.
pub struct OrbitMap {
    family: TransformationRef,
    p: Vec<f64>,
}

impl OrbitMap {
    pub fn new(model: &ModelManifold, family: TransformationRef, p: Vec<f64>) -> Result<Self> {
        match model.kind {
            ModelKind::LinearContactSphere { .. } | ModelKind::Cp1 => {}
            _ => return Err(Error::InvalidArgument(format!("{} is not a sphere model", model.name()))),
        }
        model.check_point(&p)?;
        Ok(OrbitMap { family, p })
    }
}

impl SphereMap for OrbitMap {
    fn domain_dim(&self) -> usize {
        self.family.param_dim()
    }
    fn codomain_dim(&self) -> usize {
        self.p.len() - 1
    }
    fn eval(&self, x: &UnitVector) -> Result<UnitVector> {
        UnitVector::new(self.family.act(x, &self.p)?)
    }
}

fn check_index_input(model: &ModelManifold, family: &dyn TransformationFamily, k: usize) -> Result<()> {
    if matches!(model.kind, ModelKind::S1xS2) {
        return Err(Error::InvalidArgument("index pipelines do not run on s1xs2; use the homogeneous index".into()));
    }
    if family.ambient_dim() != model.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: model.ambient_dim(), found: family.ambient_dim() });
    }
    if k == 0 || family.param_dim() != 2 * k - 1 {
        return Err(Error::DimensionMismatch { expected: 2 * k.max(1) - 1, found: family.param_dim() });
    }
    if k > model.frame_rank() {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds the frame rank of {}", model.name())));
    }
    Ok(())
}

/// The A-type index: `mu_k` of the pushed-frame transition for a global
/// frame policy, at `basepoint` (the model default when `None`).
#[allow(clippy::too_many_arguments)]
pub fn index_a(
    model: &ModelManifold,
    family: TransformationRef,
    k: usize,
    policy: FramePolicy,
    basepoint: Option<&[f64]>,
    budget: &Budget,
    seed: u64,
) -> Result<IndexReport> {
    check_index_input(model, family.as_ref(), k)?;
    let p = basepoint.map(<[f64]>::to_vec).unwrap_or_else(|| model.basepoint());
    let name = family.name();
    let transition = pushed_frame_transition(model, family, &p, policy)?;
    let mu = mu_k_unitary(shared(transition), k, 1, budget, seed)?;
    Ok(IndexReport {
        value: mu.value,
        raw_value: mu.value,
        modulus: 0,
        index_type: IndexType::A,
        k,
        certified: mu.degree.certified,
        degree: mu.degree,
        trace: mu.trace,
        model: model.name(),
        family: name,
        basepoint: p,
        missed_point: None,
        tolerances: Tolerances::default(),
    })
}

/// The B-type index of a family whose orbit through `p` is contractible,
/// reduced mod the minimal Chern number `N_k`.
pub fn index_b(
    model: &ModelManifold,
    family: TransformationRef,
    k: usize,
    p: &[f64],
    budget: &Budget,
    seed: u64,
) -> Result<IndexReport> {
    check_index_input(model, family.as_ref(), k)?;
    model.check_point(p)?;
    let name = family.name();
    let (transition, missed_point) = match model.kind {
        ModelKind::Torus { .. } => {
            let lp = family
                .torus_loop()
                .ok_or_else(|| Error::InvalidArgument("B-type index on the torus needs a loop family".into()))?;
            let end = lp.flow(1.0, p);
            let shift = end.iter().zip(p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if shift > 1e-9 {
                return Err(Error::NotNullHomotopic(format!(
                    "orbit of {name} through {p:?} winds around the torus (end point {end:?})"
                )));
            }
            (pushed_frame_transition(model, family, p, FramePolicy::Coordinate)?, None)
        }
        _ => {
            let orbit: Arc<dyn SphereMap> = Arc::new(OrbitMap::new(model, family.clone(), p.to_vec())?);
            let missed = find_missed_point(orbit.as_ref(), budget.missed_point_samples, seed).map_err(|e| match e {
                Error::NoMissedPoint { best_clearance } => Error::NotNullHomotopic(format!(
                    "orbit of {name} through {p:?} covers the model (best clearance {best_clearance:.3e})"
                )),
                Error::InvalidArgument(msg) => Error::NotNullHomotopic(msg),
                e => e,
            })?;
            let target = missed.point.antipode();
            let contraction = geodesic_contraction(orbit, missed.point.clone(), target.clone())?;
            let target_frame = basepoint_frame(model, target.coords())?;
            let frame_p = basepoint_frame(model, p)?;
            let field = FrameField::Transported { contraction: Arc::new(contraction), target_frame };
            (PushedFrameFamily::new(model.clone(), family, p.to_vec(), frame_p, field)?, Some(missed.point))
        }
    };
    let mu = mu_k_unitary(shared(transition), k, 1, budget, seed)?;
    let modulus = model.minimal_chern(k)?;
    let value = if modulus > 0 { mu.value.rem_euclid(modulus as i64) } else { mu.value };
    Ok(IndexReport {
        value,
        raw_value: mu.value,
        modulus,
        index_type: IndexType::B,
        k,
        certified: mu.degree.certified,
        degree: mu.degree,
        trace: mu.trace,
        model: model.name(),
        family: name,
        basepoint: p.to_vec(),
        missed_point,
        tolerances: Tolerances::default(),
    })
}

/// `N_k` of the model.
pub fn minimal_chern(model: &ModelManifold, k: usize) -> Result<u64> {
    model.minimal_chern(k)
}
