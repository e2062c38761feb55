use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::model::{ModelKind, ModelManifold};
use crate::error::{Error, Result};
use crate::homogeneous::axis_angle_rotation;
use crate::sphere::UnitVector;
use crate::unitary::{complexify, realify, CMatrix, FamilyRef};

/// A sphere `S^(2k-1)` of transformations of a model, with differentials
/// written as real matrices on ambient vectors.
pub trait TransformationFamily: Send + Sync {
    fn name(&self) -> String;
    fn param_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn act(&self, s: &UnitVector, p: &[f64]) -> Result<Vec<f64>>;
    fn differential(&self, s: &UnitVector, p: &[f64]) -> Result<DMatrix<f64>>;

    /// Linear in `p`; the finite-difference consistency check is skipped.
    fn exactly_linear(&self) -> bool {
        false
    }

    /// The lifted time-one flow, for loops of the torus.
    fn torus_loop(&self) -> Option<&dyn TorusLoop> {
        None
    }
}

pub type TransformationRef = Arc<dyn TransformationFamily>;

/// Realification of a complex matrix in the interleaved convention.
pub fn realify_matrix(a: &CMatrix) -> DMatrix<f64> {
    let (r, c) = a.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = a[(i / 2, j / 2)];
        match (i % 2, j % 2) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    })
}

/// A unitary family acting linearly on `C^n`, hence on `S^(2n-1)`.
pub struct UnitaryAction {
    family: FamilyRef,
    label: String,
}

impl UnitaryAction {
    pub fn new(family: FamilyRef, label: impl Into<String>) -> Self {
        UnitaryAction { family, label: label.into() }
    }

    pub fn family(&self) -> &FamilyRef {
        &self.family
    }
}

impl TransformationFamily for UnitaryAction {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn param_dim(&self) -> usize {
        self.family.param_dim()
    }
    fn ambient_dim(&self) -> usize {
        2 * self.family.size()
    }
    fn act(&self, s: &UnitVector, p: &[f64]) -> Result<Vec<f64>> {
        let a = self.family.eval(s)?;
        let z = DVector::from_vec(complexify(p));
        Ok(realify((a * z).as_slice()))
    }
    fn differential(&self, s: &UnitVector, _p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(realify_matrix(&self.family.eval(s)?))
    }
    fn exactly_linear(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone)]
pub struct IdentityTransformation {
    pub param_dim: usize,
    pub ambient_dim: usize,
}

impl TransformationFamily for IdentityTransformation {
    fn name(&self) -> String {
        "identity".into()
    }
    fn param_dim(&self) -> usize {
        self.param_dim
    }
    fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }
    fn act(&self, _s: &UnitVector, p: &[f64]) -> Result<Vec<f64>> {
        Ok(p.to_vec())
    }
    fn differential(&self, _s: &UnitVector, _p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(DMatrix::identity(self.ambient_dim, self.ambient_dim))
    }
    fn exactly_linear(&self) -> bool {
        true
    }
}

/// Loop of rotations of `CP^1 = S^2`: `turns` full turns about `axis`.
#[derive(Debug, Clone)]
pub struct Cp1Rotation {
    pub axis: [f64; 3],
    pub turns: i32,
}

impl Cp1Rotation {
    fn rotation(&self, s: &UnitVector) -> Result<DMatrix<f64>> {
        let angle = self.turns as f64 * s.coords()[1].atan2(s.coords()[0]);
        let r = axis_angle_rotation(&self.axis, angle)?;
        Ok(DMatrix::from_fn(3, 3, |i, j| r[(i, j)]))
    }
}

impl TransformationFamily for Cp1Rotation {
    fn name(&self) -> String {
        "cp1_rotation".into()
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn act(&self, s: &UnitVector, p: &[f64]) -> Result<Vec<f64>> {
        Ok((self.rotation(s)? * DVector::from_column_slice(p)).as_slice().to_vec())
    }
    fn differential(&self, s: &UnitVector, _p: &[f64]) -> Result<DMatrix<f64>> {
        self.rotation(s)
    }
    fn exactly_linear(&self) -> bool {
        true
    }
}

/// `s -> F(O s)` for a fixed orthogonal `O` of the parameter sphere.
pub struct ReparametrizedTransformation {
    inner: TransformationRef,
    orthogonal: DMatrix<f64>,
}

impl ReparametrizedTransformation {
    pub fn new(inner: TransformationRef, orthogonal: DMatrix<f64>) -> Result<Self> {
        let n = inner.param_dim() + 1;
        if orthogonal.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, found: orthogonal.nrows() });
        }
        if (orthogonal.transpose() * &orthogonal - DMatrix::identity(n, n)).norm() > 1e-10 {
            return Err(Error::InvalidArgument("reparametrization is not orthogonal".into()));
        }
        Ok(ReparametrizedTransformation { inner, orthogonal })
    }

    fn map(&self, s: &UnitVector) -> Result<UnitVector> {
        UnitVector::new((&self.orthogonal * DVector::from_column_slice(s.coords())).as_slice().to_vec())
    }
}

impl TransformationFamily for ReparametrizedTransformation {
    fn name(&self) -> String {
        format!("reparametrized({})", self.inner.name())
    }
    fn param_dim(&self) -> usize {
        self.inner.param_dim()
    }
    fn ambient_dim(&self) -> usize {
        self.inner.ambient_dim()
    }
    fn act(&self, s: &UnitVector, p: &[f64]) -> Result<Vec<f64>> {
        self.inner.act(&self.map(s)?, p)
    }
    fn differential(&self, s: &UnitVector, p: &[f64]) -> Result<DMatrix<f64>> {
        self.inner.differential(&self.map(s)?, p)
    }
    fn exactly_linear(&self) -> bool {
        self.inner.exactly_linear()
    }
}

/// A loop of symplectomorphisms of `T^(2n)`, given by its flow on the
/// universal cover: `flow(0) = id` and `flow(1)` is an integer translation.
pub trait TorusLoop: Send + Sync {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn flow(&self, t: f64, p: &[f64]) -> Vec<f64>;
    fn flow_differential(&self, t: f64, p: &[f64]) -> DMatrix<f64>;
}

pub type TorusLoopRef = Arc<dyn TorusLoop>;

/// `p -> p + t v` for an integer vector `v`.
#[derive(Debug, Clone)]
pub struct TorusTranslation {
    vector: Vec<f64>,
}

impl TorusTranslation {
    pub fn new(vector: Vec<f64>) -> Result<Self> {
        if vector.is_empty() || vector.len() % 2 == 1 {
            return Err(Error::InvalidArgument("translation vector needs even positive length".into()));
        }
        if vector.iter().any(|v| (v - v.round()).abs() > 1e-12) {
            return Err(Error::InvalidArgument("a translation loop needs an integer vector".into()));
        }
        Ok(TorusTranslation { vector })
    }

    /// Full loop along coordinate `i` (zero-based).
    pub fn along(dim: usize, i: usize) -> Result<Self> {
        let mut v = vec![0.0; dim];
        *v.get_mut(i).ok_or(Error::InvalidArgument(format!("coordinate {i} outside 0..{dim}")))? = 1.0;
        Self::new(v)
    }
}

impl TorusLoop for TorusTranslation {
    fn name(&self) -> String {
        format!("torus_translation({:?})", self.vector)
    }
    fn dim(&self) -> usize {
        self.vector.len()
    }
    fn flow(&self, t: f64, p: &[f64]) -> Vec<f64> {
        p.iter().zip(&self.vector).map(|(a, v)| a + t * v).collect()
    }
    fn flow_differential(&self, _t: f64, _p: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.dim(), self.dim())
    }
}

/// `(x_1, y_1) -> (x_1 + t + a sin(2 pi y_1) sin(pi t), y_1)`, other
/// coordinates fixed: a non-isometric loop isotopic to the `x_1` translation.
#[derive(Debug, Clone)]
pub struct TorusShear {
    pub dim: usize,
    pub amplitude: f64,
}

impl TorusLoop for TorusShear {
    fn name(&self) -> String {
        format!("torus_shear(amplitude={})", self.amplitude)
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn flow(&self, t: f64, p: &[f64]) -> Vec<f64> {
        let mut q = p.to_vec();
        q[0] += t + self.amplitude * (2.0 * PI * p[1]).sin() * (PI * t).sin();
        q
    }
    fn flow_differential(&self, t: f64, p: &[f64]) -> DMatrix<f64> {
        let mut d = DMatrix::identity(self.dim, self.dim);
        d[(0, 1)] = 2.0 * PI * self.amplitude * (2.0 * PI * p[1]).cos() * (PI * t).sin();
        d
    }
}

#[derive(Debug, Clone)]
pub struct TorusIdentity {
    pub dim: usize,
}

impl TorusLoop for TorusIdentity {
    fn name(&self) -> String {
        "identity".into()
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn flow(&self, _t: f64, p: &[f64]) -> Vec<f64> {
        p.to_vec()
    }
    fn flow_differential(&self, _t: f64, _p: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.dim, self.dim)
    }
}

/// `first` at double speed, then `second` at double speed.
pub struct TorusConcatenation {
    first: TorusLoopRef,
    second: TorusLoopRef,
}

impl TorusConcatenation {
    pub fn new(first: TorusLoopRef, second: TorusLoopRef) -> Result<Self> {
        if first.dim() != second.dim() {
            return Err(Error::DimensionMismatch { expected: first.dim(), found: second.dim() });
        }
        Ok(TorusConcatenation { first, second })
    }
}

impl TorusLoop for TorusConcatenation {
    fn name(&self) -> String {
        format!("{} * {}", self.first.name(), self.second.name())
    }
    fn dim(&self) -> usize {
        self.first.dim()
    }
    fn flow(&self, t: f64, p: &[f64]) -> Vec<f64> {
        if t <= 0.5 {
            self.first.flow(2.0 * t, p)
        } else {
            self.second.flow(2.0 * t - 1.0, &self.first.flow(1.0, p))
        }
    }
    fn flow_differential(&self, t: f64, p: &[f64]) -> DMatrix<f64> {
        if t <= 0.5 {
            self.first.flow_differential(2.0 * t, p)
        } else {
            let mid = self.first.flow(1.0, p);
            self.second.flow_differential(2.0 * t - 1.0, &mid) * self.first.flow_differential(1.0, p)
        }
    }
}

/// A torus loop seen as a family over `S^1`, `t = arg(s) / 2 pi` in `[0, 1)`.
pub struct TorusLoopFamily(pub TorusLoopRef);

pub(crate) fn loop_time(s: &UnitVector) -> f64 {
    (s.coords()[1].atan2(s.coords()[0]) / (2.0 * PI)).rem_euclid(1.0)
}

impl TransformationFamily for TorusLoopFamily {
    fn name(&self) -> String {
        self.0.name()
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn ambient_dim(&self) -> usize {
        self.0.dim()
    }
    fn act(&self, s: &UnitVector, p: &[f64]) -> Result<Vec<f64>> {
        Ok(self.0.flow(loop_time(s), p))
    }
    fn differential(&self, s: &UnitVector, p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.0.flow_differential(loop_time(s), p))
    }
    fn torus_loop(&self) -> Option<&dyn TorusLoop> {
        Some(self.0.as_ref())
    }
}

/// Random point of the model, for sampled checks.
pub fn random_point(model: &ModelManifold, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match model.kind {
        ModelKind::Torus { dim } => (0..dim).map(|_| rand::Rng::random_range(rng, 0.0..1.0)).collect(),
        ModelKind::S1xS2 => {
            let mut p = vec![rand::Rng::random_range(rng, 0.0..2.0 * PI)];
            p.extend(UnitVector::random(3, rng).into_coords());
            p
        }
        _ => UnitVector::random(model.ambient_dim(), rng).into_coords(),
    }
}

/// Sampled check that `family` acts on `model`, preserves its structure to
/// `1e-8`, and that its differential matches finite differences to `1e-4`.
/// Returns the worst structure defect.
pub fn check_family(model: &ModelManifold, family: &dyn TransformationFamily, samples: usize, seed: u64) -> Result<f64> {
    if family.ambient_dim() != model.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: model.ambient_dim(), found: family.ambient_dim() });
    }
    if matches!(model.kind, ModelKind::S1xS2) {
        return Err(Error::InvalidArgument("no transformation families act on s1xs2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = model.ambient_dim();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let s = UnitVector::random(family.param_dim() + 1, &mut rng);
        let p = random_point(model, &mut rng);
        let q = family.act(&s, &p)?;
        model.check_point(&q)?;
        let d = family.differential(&s, &p)?;
        let defect = match model.kind {
            ModelKind::Torus { .. } => {
                let omega = standard_symplectic(n);
                (d.transpose() * &omega * &d - omega).norm()
            }
            ModelKind::LinearContactSphere { .. } => {
                let j = standard_symplectic(n).transpose();
                (d.transpose() * &d - DMatrix::identity(n, n)).norm() + (&d * &j - &j * &d).norm()
            }
            _ => (d.transpose() * &d - DMatrix::identity(n, n)).norm() + (d.determinant() - 1.0).abs(),
        };
        worst = worst.max(defect);
        if !(defect <= 1e-8) {
            return Err(Error::InvalidArgument(format!(
                "{} does not preserve the structure of {} (defect {defect:.3e})",
                family.name(),
                model.name()
            )));
        }
        if !family.exactly_linear() {
            let h = 1e-6;
            for i in 0..n {
                let mut a = p.clone();
                let mut b = p.clone();
                a[i] += h;
                b[i] -= h;
                let (fa, fb) = (family.act(&s, &a)?, family.act(&s, &b)?);
                for r in 0..n {
                    let fd = (fa[r] - fb[r]) / (2.0 * h);
                    if (fd - d[(r, i)]).abs() > 1e-4 {
                        return Err(Error::InvalidArgument(format!(
                            "{}: differential disagrees with finite differences",
                            family.name()
                        )));
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// `sum dx_j ^ dy_j` as a matrix in interleaved coordinates.
pub fn standard_symplectic(n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(n, n);
    for j in (0..n).step_by(2) {
        w[(j, j + 1)] = 1.0;
        w[(j + 1, j)] = -1.0;
    }
    w
}
