use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{unitarity_defect, unitarize, CMatrix, FamilyRef, MatrixData, UnitaryFamily};
use crate::error::{Error, Result};
use crate::sphere::{base_triangulation, refine, SphereTriangulation, UnitVector};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_unitary(m: &CMatrix, what: &str) -> Result<()> {
    if !m.is_square() || unitarity_defect(m) > 1e-10 {
        return Err(Error::InvalidArgument(format!("{what} is not unitary")));
    }
    Ok(())
}

pub struct ConstantFamily {
    param_dim: usize,
    value: CMatrix,
}

impl ConstantFamily {
    pub fn new(param_dim: usize, value: CMatrix) -> Result<Self> {
        check_unitary(&value, "constant value")?;
        Ok(ConstantFamily { param_dim, value })
    }

    pub fn identity(param_dim: usize, n: usize) -> Self {
        ConstantFamily { param_dim, value: CMatrix::identity(n, n) }
    }
}

impl UnitaryFamily for ConstantFamily {
    fn param_dim(&self) -> usize {
        self.param_dim
    }
    fn size(&self) -> usize {
        self.value.nrows()
    }
    fn matrix(&self, _x: &UnitVector) -> Result<CMatrix> {
        Ok(self.value.clone())
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// Loop `z -> diag(z^w_1, .., z^w_n)` on the unit circle `z = x_0 + i x_1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalLoop {
    pub windings: Vec<i32>,
}

impl UnitaryFamily for DiagonalLoop {
    fn param_dim(&self) -> usize {
        1
    }
    fn size(&self) -> usize {
        self.windings.len()
    }
    fn matrix(&self, x: &UnitVector) -> Result<CMatrix> {
        let z = c(x.coords()[0], x.coords()[1]);
        Ok(CMatrix::from_diagonal(&DVector::from_iterator(
            self.windings.len(),
            self.windings.iter().map(|&w| z.powi(w)),
        )))
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(self.windings.iter().map(|w| w.unsigned_abs()).max().unwrap_or(0).max(1) as f64)
    }
}

/// `S^3 -> SU(2)`, `(z_1, z_2) -> [[z_1, -conj z_2], [z_2, conj z_1]]`.
#[derive(Debug, Clone, Copy)]
pub struct Su2Generator;

impl UnitaryFamily for Su2Generator {
    fn param_dim(&self) -> usize {
        3
    }
    fn size(&self) -> usize {
        2
    }
    fn matrix(&self, x: &UnitVector) -> Result<CMatrix> {
        let v = x.coords();
        let (z1, z2) = (c(v[0], v[1]), c(v[2], v[3]));
        Ok(CMatrix::from_row_slice(2, 2, &[z1, -z2.conj(), z2, z1.conj()]))
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// `S^5 -> U(4)`, `x -> x_0 I + i sum x_j G_j` for five anticommuting
/// Hermitian involutions `G_j`.
#[derive(Debug, Clone, Copy)]
pub struct CliffordGenerator;

impl CliffordGenerator {
    pub fn gammas() -> [CMatrix; 5] {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let id = CMatrix::identity(2, 2);
        let sx = CMatrix::from_row_slice(2, 2, &[zero, one, one, zero]);
        let sy = CMatrix::from_row_slice(2, 2, &[zero, -I, I, zero]);
        let sz = CMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]);
        [sx.kronecker(&sx), sx.kronecker(&sy), sx.kronecker(&sz), sy.kronecker(&id), sz.kronecker(&id)]
    }
}

impl UnitaryFamily for CliffordGenerator {
    fn param_dim(&self) -> usize {
        5
    }
    fn size(&self) -> usize {
        4
    }
    fn matrix(&self, x: &UnitVector) -> Result<CMatrix> {
        let v = x.coords();
        let mut m = CMatrix::identity(4, 4).scale(v[0]);
        for (g, &xj) in Self::gammas().iter().zip(&v[1..]) {
            m += g * (I * xj);
        }
        Ok(m)
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Pointwise product `F(x) G(x)`.
pub struct ProductFamily {
    left: FamilyRef,
    right: FamilyRef,
}

impl ProductFamily {
    pub fn new(left: FamilyRef, right: FamilyRef) -> Result<Self> {
        if left.param_dim() != right.param_dim() || left.size() != right.size() {
            return Err(Error::InvalidArgument("product of families with different shapes".into()));
        }
        Ok(ProductFamily { left, right })
    }
}

impl UnitaryFamily for ProductFamily {
    fn param_dim(&self) -> usize {
        self.left.param_dim()
    }
    fn size(&self) -> usize {
        self.left.size()
    }
    fn matrix(&self, x: &UnitVector) -> Result<CMatrix> {
        Ok(self.left.eval(x)? * self.right.eval(x)?)
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(self.left.lipschitz()? + self.right.lipschitz()?)
    }
}

/// `C F(x) C*` for a fixed unitary `C`.
pub struct ConjugatedFamily {
    inner: FamilyRef,
    by: CMatrix,
}

impl ConjugatedFamily {
    pub fn new(inner: FamilyRef, by: CMatrix) -> Result<Self> {
        check_unitary(&by, "conjugating matrix")?;
        if by.nrows() != inner.size() {
            return Err(Error::DimensionMismatch { expected: inner.size(), found: by.nrows() });
        }
        Ok(ConjugatedFamily { inner, by })
    }
}

impl UnitaryFamily for ConjugatedFamily {
    fn param_dim(&self) -> usize {
        self.inner.param_dim()
    }
    fn size(&self) -> usize {
        self.inner.size()
    }
    fn matrix(&self, x: &UnitVector) -> Result<CMatrix> {
        Ok(&self.by * self.inner.eval(x)? * self.by.adjoint())
    }
    fn lipschitz(&self) -> Option<f64> {
        self.inner.lipschitz()
    }
}

/// `diag(I_extra, F(x))`.
pub struct StabilizedFamily {
    inner: FamilyRef,
    extra: usize,
}

impl StabilizedFamily {
    pub fn new(inner: FamilyRef, extra: usize) -> Self {
        StabilizedFamily { inner, extra }
    }
}

impl UnitaryFamily for StabilizedFamily {
    fn param_dim(&self) -> usize {
        self.inner.param_dim()
    }
    fn size(&self) -> usize {
        self.inner.size() + self.extra
    }
    fn matrix(&self, x: &UnitVector) -> Result<CMatrix> {
        let f = self.inner.eval(x)?;
        let n = self.size();
        let mut m = CMatrix::identity(n, n);
        m.view_mut((self.extra, self.extra), (f.nrows(), f.ncols())).copy_from(&f);
        Ok(m)
    }
    fn lipschitz(&self) -> Option<f64> {
        self.inner.lipschitz()
    }
}

/// `F(O x)` for a fixed orthogonal `O` on the parameter sphere.
pub struct ReparametrizedFamily {
    inner: FamilyRef,
    orthogonal: DMatrix<f64>,
}

impl ReparametrizedFamily {
    pub fn new(inner: FamilyRef, orthogonal: DMatrix<f64>) -> Result<Self> {
        let n = inner.param_dim() + 1;
        if orthogonal.nrows() != n || orthogonal.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: orthogonal.nrows() });
        }
        if (orthogonal.transpose() * &orthogonal - DMatrix::identity(n, n)).norm() > 1e-10 {
            return Err(Error::InvalidArgument("reparametrization is not orthogonal".into()));
        }
        Ok(ReparametrizedFamily { inner, orthogonal })
    }
}

impl UnitaryFamily for ReparametrizedFamily {
    fn param_dim(&self) -> usize {
        self.inner.param_dim()
    }
    fn size(&self) -> usize {
        self.inner.size()
    }
    fn matrix(&self, x: &UnitVector) -> Result<CMatrix> {
        let y = &self.orthogonal * DVector::from_column_slice(x.coords());
        self.inner.eval(&UnitVector::new(y.as_slice().to_vec())?)
    }
    fn lipschitz(&self) -> Option<f64> {
        self.inner.lipschitz()
    }
}

/// `F(x) P` where `P` swaps the first column with column `j` (one-based).
pub struct ColumnSwap {
    inner: FamilyRef,
    column: usize,
}

impl ColumnSwap {
    pub fn new(inner: FamilyRef, j: usize) -> Result<Self> {
        if j == 0 || j > inner.size() {
            return Err(Error::InvalidArgument(format!("column {j} outside 1..={}", inner.size())));
        }
        Ok(ColumnSwap { inner, column: j - 1 })
    }
}

impl UnitaryFamily for ColumnSwap {
    fn param_dim(&self) -> usize {
        self.inner.param_dim()
    }
    fn size(&self) -> usize {
        self.inner.size()
    }
    fn matrix(&self, x: &UnitVector) -> Result<CMatrix> {
        let mut m = self.inner.eval(x)?;
        m.swap_columns(0, self.column);
        Ok(m)
    }
    fn lipschitz(&self) -> Option<f64> {
        self.inner.lipschitz()
    }
}

/// Family given by matrices at the vertices of a sphere triangulation,
/// interpolated barycentrically inside each radial cone and unitarized.
pub struct SampledFamily {
    // every refinement level, so a point is located by descending the tree
    levels: Vec<SphereTriangulation>,
    values: Vec<CMatrix>,
    tolerance: f64,
}

/// Text form of a sampled family; `values` follow the vertex order of the
/// cross-polytope triangulation at `level`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledData {
    pub param_dim: usize,
    pub level: u32,
    pub values: Vec<MatrixData>,
}

impl SampledFamily {
    pub fn new(param_dim: usize, level: u32, values: Vec<CMatrix>) -> Result<Self> {
        let mut levels = vec![base_triangulation(param_dim, 0)?];
        for _ in 0..level {
            let next = refine(levels.last().expect("non-empty"));
            levels.push(next);
        }
        let nv = levels.last().expect("non-empty").vertices().len();
        if values.len() != nv {
            return Err(Error::DimensionMismatch { expected: nv, found: values.len() });
        }
        let n = values[0].nrows();
        for v in &values {
            if v.nrows() != n {
                return Err(Error::InvalidArgument("sampled matrices of different sizes".into()));
            }
            check_unitary(v, "sampled value")?;
        }
        Ok(SampledFamily { levels, values, tolerance: super::DEFAULT_UNITARITY_TOLERANCE })
    }

    pub fn from_data(data: &SampledData) -> Result<Self> {
        let values = data.values.iter().map(CMatrix::try_from).collect::<Result<Vec<_>>>()?;
        Self::new(data.param_dim, data.level, values)
    }

    pub fn to_data(&self) -> SampledData {
        SampledData {
            param_dim: self.levels[0].dim(),
            level: (self.levels.len() - 1) as u32,
            values: self.values.iter().map(MatrixData::from).collect(),
        }
    }

    /// Samples `f` at the vertices of the level-`level` triangulation.
    pub fn from_family(f: &dyn UnitaryFamily, level: u32) -> Result<Self> {
        let tri = base_triangulation(f.param_dim(), level)?;
        let values = tri.vertices().iter().map(|x| f.eval(x)).collect::<Result<Vec<_>>>()?;
        Self::new(f.param_dim(), level, values)
    }

    fn locate(&self, x: &UnitVector) -> Result<(usize, Vec<f64>)> {
        let m = self.levels[0].dim();
        let signs = x.coords().iter().enumerate().fold(0usize, |acc, (i, &c)| acc | (usize::from(c < 0.0) << i));
        let mut idx = signs;
        let mut mu = barycentric(&self.levels[0], idx, x);
        for tri in &self.levels[1..] {
            let first = idx << m;
            let (best, best_mu) = (first..first + (1 << m))
                .map(|i| (i, barycentric(tri, i, x)))
                .max_by(|a, b| min_coord(&a.1).total_cmp(&min_coord(&b.1)))
                .expect("2^m children");
            idx = best;
            mu = best_mu;
        }
        Ok((idx, mu))
    }
}

fn barycentric(tri: &SphereTriangulation, i: usize, x: &UnitVector) -> Vec<f64> {
    let pts = tri.simplex_points(i);
    let n = pts.len();
    let a = DMatrix::from_fn(n, n, |r, c| pts[c].coords()[r]);
    a.lu()
        .solve(&DVector::from_column_slice(x.coords()))
        .map(|v| v.as_slice().to_vec())
        .unwrap_or_else(|| vec![f64::NEG_INFINITY; n])
}

fn min_coord(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

impl UnitaryFamily for SampledFamily {
    fn param_dim(&self) -> usize {
        self.levels[0].dim()
    }
    fn size(&self) -> usize {
        self.values[0].nrows()
    }
    fn matrix(&self, x: &UnitVector) -> Result<CMatrix> {
        let (idx, mu) = self.locate(x)?;
        let tri = self.levels.last().expect("non-empty");
        let total: f64 = mu.iter().sum();
        let n = self.size();
        let mut m = CMatrix::zeros(n, n);
        for (&v, &w) in tri.simplex(idx).iter().zip(&mu) {
            m += self.values[v as usize].scale(w / total);
        }
        unitarize(&m, self.tolerance)
    }
}

pub(crate) fn shared<F: UnitaryFamily + 'static>(f: F) -> FamilyRef {
    Arc::new(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let x3 = UnitVector::random(4, &mut rng);
            let x5 = UnitVector::random(6, &mut rng);
            assert!(Su2Generator.eval(&x3).is_ok());
            let m = CliffordGenerator.eval(&x5).unwrap();
            assert!(unitarity_defect(&m) < 1e-13);
        }
    }

    #[test]
    fn clifford_generators_anticommute() {
        let g = CliffordGenerator::gammas();
        for a in 0..5 {
            for b in 0..5 {
                let ac = &g[a] * &g[b] + &g[b] * &g[a];
                let expect = if a == b { CMatrix::identity(4, 4).scale(2.0) } else { CMatrix::zeros(4, 4) };
                assert!((ac - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn su2_first_column_is_the_parameter() {
        let x = UnitVector::new(vec![0.1, 0.2, -0.3, 0.4]).unwrap();
        let m = Su2Generator.eval(&x).unwrap();
        let col: Vec<f64> = super::super::realify(&m.column(0).iter().copied().collect::<Vec<_>>());
        for (a, b) in col.iter().zip(x.coords()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((m.determinant() - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn diagonal_loop_values() {
        let f = DiagonalLoop { windings: vec![2, -1, 0] };
        let x = UnitVector::new(vec![0.0, 1.0]).unwrap();
        let m = f.eval(&x).unwrap();
        assert!((m[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((m[(1, 1)] - c(0.0, -1.0)).norm() < 1e-15);
        assert!((m[(2, 2)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn stabilized_and_swapped_shapes() {
        let s = StabilizedFamily::new(shared(Su2Generator), 1);
        let x = UnitVector::basis(4, 2);
        let m = s.eval(&x).unwrap();
        assert_eq!(m.nrows(), 3);
        assert_eq!(m[(0, 0)], c(1.0, 0.0));
        let w = ColumnSwap::new(shared(Su2Generator), 2).unwrap().eval(&x).unwrap();
        assert_eq!(w.column(0), Su2Generator.eval(&x).unwrap().column(1));
    }

    #[test]
    fn sampled_family_reproduces_vertices_and_round_trips() {
        let s = SampledFamily::from_family(&Su2Generator, 2).unwrap();
        let tri = base_triangulation(3, 2).unwrap();
        for (i, x) in tri.vertices().iter().enumerate().step_by(7) {
            let m = s.eval(x).unwrap();
            assert!((m - &s.values[i]).norm() < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let x = UnitVector::random(4, &mut rng);
            let err = (s.eval(&x).unwrap() - Su2Generator.eval(&x).unwrap()).norm();
            assert!(err < 0.1, "{err}");
        }
        let back = SampledFamily::from_data(&s.to_data()).unwrap();
        let x = UnitVector::random(4, &mut rng);
        assert_eq!(back.eval(&x).unwrap(), s.eval(&x).unwrap());
    }

    #[test]
    fn non_unitary_inputs_are_rejected() {
        let m = CMatrix::identity(2, 2).scale(2.0);
        assert!(ConstantFamily::new(1, m.clone()).is_err());
        assert!(ConjugatedFamily::new(shared(Su2Generator), m).is_err());
    }
}
