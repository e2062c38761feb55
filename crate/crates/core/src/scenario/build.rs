use std::sync::Arc;

use nalgebra::DMatrix;

use super::{Certificates, FamilySpec, Request, ResultValue, Scenario};
use crate::degree::certified_degree;
use crate::error::{Error, Result};
use crate::homogeneous::{
    epsilon_index, stable_group, AffineForm, ConstantForm, ContactFormRef, EvaluationDatum, LinearSphereFamily,
    RotationPushforward,
};
use crate::pipelines::{
    flux, index_a, index_b, standard_symplectic, Cp1Rotation, FramePolicy, IdentityTransformation, ModelKind,
    ModelManifold, TorusIdentity, TorusLoopFamily, TorusLoopRef, TorusShear, TorusTranslation, TransformationRef,
    UnitaryAction,
};
use crate::unitary::{
    column_map, CliffordGenerator, ConstantFamily, DiagonalLoop, FamilyRef, SampledFamily, StabilizedFamily,
    Su2Generator, UnitaryFamily,
};

fn family_of(s: &Scenario) -> Result<&FamilySpec> {
    s.family.as_ref().ok_or_else(|| Error::InvalidArgument("this request needs a family".into()))
}

fn model_of(s: &Scenario) -> Result<ModelManifold> {
    ModelManifold::new(s.model.ok_or_else(|| Error::InvalidArgument("this request needs a model".into()))?)
}

fn wrong_kind(fs: &FamilySpec, what: &str) -> Error {
    Error::InvalidArgument(format!("family '{}' is not {what}", fs.name()))
}

/// The unitary family of `fs`, stabilized to size `n` when given.
fn unitary(fs: &FamilySpec, k: usize, n: Option<usize>) -> Result<FamilyRef> {
    let f: FamilyRef = match fs {
        FamilySpec::Identity => {
            let n = n.ok_or_else(|| Error::InvalidArgument("identity needs a matrix size".into()))?;
            Arc::new(ConstantFamily::identity(2 * k - 1, n))
        }
        FamilySpec::Su2Generator => Arc::new(Su2Generator),
        FamilySpec::CliffordGenerator => Arc::new(CliffordGenerator),
        FamilySpec::DiagonalLoop { windings } => {
            if windings.is_empty() {
                return Err(Error::InvalidArgument("diagonal loop needs at least one winding".into()));
            }
            Arc::new(DiagonalLoop { windings: windings.clone() })
        }
        FamilySpec::Sampled { data } => Arc::new(SampledFamily::from_data(data)?),
        other => return Err(wrong_kind(other, "a unitary family")),
    };
    match n {
        Some(n) if n < f.size() => Err(Error::DimensionMismatch { expected: n, found: f.size() }),
        Some(n) if n > f.size() => {
            let extra = n - f.size();
            Ok(Arc::new(StabilizedFamily::new(f, extra)))
        }
        _ => Ok(f),
    }
}

fn torus_loop(fs: &FamilySpec, dim: usize) -> Result<TorusLoopRef> {
    let lp: TorusLoopRef = match fs {
        FamilySpec::Identity => Arc::new(TorusIdentity { dim }),
        FamilySpec::TorusTranslation { vector } => {
            if vector.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: vector.len() });
            }
            Arc::new(TorusTranslation::new(vector.clone())?)
        }
        FamilySpec::TorusShear { amplitude } => Arc::new(TorusShear { dim, amplitude: *amplitude }),
        other => return Err(wrong_kind(other, "a torus loop")),
    };
    Ok(lp)
}

fn transformation(fs: &FamilySpec, model: &ModelManifold, k: usize) -> Result<TransformationRef> {
    match model.kind {
        ModelKind::LinearContactSphere { n } => {
            Ok(Arc::new(UnitaryAction::new(unitary(fs, k, Some(n))?, fs.name())))
        }
        ModelKind::Torus { dim } => Ok(Arc::new(TorusLoopFamily(torus_loop(fs, dim)?))),
        ModelKind::Cp1 => match fs {
            FamilySpec::Cp1Rotation { axis, turns } => Ok(Arc::new(Cp1Rotation { axis: *axis, turns: *turns })),
            FamilySpec::Identity => Ok(Arc::new(IdentityTransformation { param_dim: 2 * k - 1, ambient_dim: 3 })),
            other => Err(wrong_kind(other, "a family on cp1")),
        },
        ModelKind::S1xS2 => Err(Error::InvalidArgument("index requests do not run on s1xs2".into())),
    }
}

fn contact_family(fs: &FamilySpec) -> Result<ContactFormRef> {
    match fs {
        FamilySpec::LinearContactSphereS => Ok(Arc::new(LinearSphereFamily)),
        FamilySpec::DeltaRotations => Ok(Arc::new(RotationPushforward)),
        FamilySpec::Alpha0Constant => Ok(Arc::new(ConstantForm(AffineForm::alpha0()))),
        other => Err(wrong_kind(other, "a contact-form family")),
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    Ok(())
}

pub(super) fn execute(s: &Scenario) -> Result<(ResultValue, Certificates, bool)> {
    match &s.request {
        Request::IndexA { k, policy, basepoint } => {
            check_k(*k)?;
            let model = model_of(s)?;
            let family = transformation(family_of(s)?, &model, *k)?;
            let policy = policy.unwrap_or_else(|| FramePolicy::default_for(&model));
            let r = index_a(&model, family, *k, policy, basepoint.as_deref(), &s.budget, s.seed)?;
            Ok((ResultValue::Integer { value: r.value }, Certificates::Index(Box::new(r.clone())), r.certified))
        }
        Request::IndexB { k, basepoint } => {
            check_k(*k)?;
            let model = model_of(s)?;
            let family = transformation(family_of(s)?, &model, *k)?;
            let p = basepoint.clone().unwrap_or_else(|| model.basepoint());
            let r = index_b(&model, family, *k, &p, &s.budget, s.seed)?;
            let result = if r.modulus > 0 {
                ResultValue::Residue { value: r.value, modulus: r.modulus }
            } else {
                ResultValue::Integer { value: r.value }
            };
            Ok((result, Certificates::Index(Box::new(r.clone())), r.certified))
        }
        Request::Epsilon { datum, datum_seed } => {
            if let Some(kind) = s.model {
                if kind != ModelKind::S1xS2 {
                    return Err(Error::InvalidArgument("homogeneous indices run on s1xs2".into()));
                }
            }
            let family = contact_family(family_of(s)?)?;
            let datum = match (datum, datum_seed) {
                (Some(d), _) => d.clone(),
                (None, Some(seed)) => EvaluationDatum::random(*seed),
                (None, None) => EvaluationDatum::standard(),
            };
            let r = epsilon_index(family, datum, &s.budget, s.seed)?;
            let certified = r.degree.certified;
            Ok((ResultValue::Integer { value: r.value }, Certificates::Epsilon(Box::new(r)), certified))
        }
        Request::Flux { cycle, omega } => {
            let model = model_of(s)?;
            let ModelKind::Torus { dim } = model.kind else {
                return Err(Error::InvalidArgument("flux runs on the torus".into()));
            };
            let lp = torus_loop(family_of(s)?, dim)?;
            let omega = match omega {
                Some(rows) => {
                    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                        return Err(Error::DimensionMismatch { expected: dim, found: rows.len() });
                    }
                    DMatrix::from_fn(dim, dim, |i, j| rows[i][j])
                }
                None => standard_symplectic(dim),
            };
            let r = flux(lp.as_ref(), cycle, &omega)?;
            let result = ResultValue::Real { value: r.value, error_estimate: r.error_estimate };
            Ok((result, Certificates::Flux(r), r.converged))
        }
        Request::Degree { column } => {
            let f = unitary(family_of(s)?, 1, None)?;
            let m = f.param_dim();
            if m != 2 * f.size() - 1 {
                return Err(Error::DimensionMismatch { expected: 2 * f.size() - 1, found: m });
            }
            let col = column_map(f, *column)?;
            let d = certified_degree(&col, m, &s.budget, s.seed)?;
            Ok((ResultValue::Integer { value: d.degree }, Certificates::Degree(d.clone()), d.certified))
        }
        Request::Tables { k, dim } => {
            let g = stable_group(*k, *dim)?;
            Ok((ResultValue::Group { group: g.group, stable: g.stable }, Certificates::Group(g), true))
        }
    }
}
