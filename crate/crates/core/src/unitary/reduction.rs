use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::builtin::{shared, ColumnSwap};
use super::{complexify, factorial, unitarity_defect, CMatrix, FamilyRef, MatrixData, UnitaryFamily, MAX_K};
use crate::degree::{certified_degree, Budget, DegreeResult};
use crate::error::{Error, Result};
use crate::sphere::{find_missed_point_with, UnitVector};

/// Audit record of one size reduction `U(n) -> U(n-1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionStage {
    /// Matrix size before the stage.
    pub size: usize,
    /// Point of `S^(2n-1)` avoided by the first-column map.
    pub missed_point: UnitVector,
    /// Constant unitary `Q` with `Q q = -e_1`.
    pub pre_rotation: MatrixData,
    pub clearance: f64,
    pub clearance_certified: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub stages: Vec<ReductionStage>,
}

/// `sigma -> lower (n-1)-block of R(u) Q F(sigma)`, `u` the first column of
/// `Q F(sigma)`.
pub struct ReducedFamily {
    inner: FamilyRef,
    q: CMatrix,
}

impl UnitaryFamily for ReducedFamily {
    fn param_dim(&self) -> usize {
        self.inner.param_dim()
    }
    fn size(&self) -> usize {
        self.inner.size() - 1
    }
    fn matrix(&self, x: &UnitVector) -> Result<CMatrix> {
        let m = &self.q * self.inner.eval(x)?;
        let u: Vec<Complex64> = m.column(0).iter().copied().collect();
        let r = first_column_rotation(&u)?;
        let full = r * m;
        let n = full.nrows();
        Ok(full.view((1, 1), (n - 1, n - 1)).into_owned())
    }
    fn tolerance(&self) -> f64 {
        self.inner.tolerance()
    }
}

/// Unitary `R` with `R u = e_1`, `R = I` at `u = e_1`, continuous on the
/// unit sphere minus `-e_1`.
///
/// With `u = a e_1 + v`, `v` orthogonal to `e_1`, and `l = (1 + conj a)/(1 + a)`:
/// `R = I + (conj a - 1) e_1 e_1* + e_1 v* - l v e_1* - v v* / (1 + a)`.
/// On the plane spanned by `e_1` and `v` it acts by `[[conj a, b], [-l b, l a]]`,
/// `b = |v|`, and it fixes the orthogonal complement; `det R = l`.
pub(crate) fn first_column_rotation(u: &[Complex64]) -> Result<CMatrix> {
    let n = u.len();
    let a = u[0];
    let one_plus_a = Complex64::new(1.0, 0.0) + a;
    if one_plus_a.norm() < 1e-12 {
        return Err(Error::ReductionSingular);
    }
    let lambda = (Complex64::new(1.0, 0.0) + a.conj()) / one_plus_a;
    let mut r = CMatrix::identity(n, n);
    r[(0, 0)] = a.conj();
    for i in 1..n {
        r[(0, i)] = u[i].conj();
        r[(i, 0)] = -lambda * u[i];
        for j in 1..n {
            r[(i, j)] -= u[i] * u[j].conj() / one_plus_a;
        }
    }
    Ok(r)
}

/// Unitary with first column `q`, completed by Gram-Schmidt against
/// `-e_2, .., -e_n, -e_1`; equals `-I` for `q = -e_1`.
fn completion(q: &[Complex64]) -> CMatrix {
    let n = q.len();
    let mut cols: Vec<Vec<Complex64>> = vec![q.to_vec()];
    let candidates = (1..n).chain(std::iter::once(0));
    for k in candidates {
        if cols.len() == n {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[k] = Complex64::new(-1.0, 0.0);
        for _ in 0..2 {
            for c in &cols {
                let proj: Complex64 = c.iter().zip(&v).map(|(ci, vi)| ci.conj() * vi).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= proj * ci;
                }
            }
        }
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nv > 1e-8 {
            cols.push(v.into_iter().map(|z| z / nv).collect());
        }
    }
    CMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// One reduction step `U(n) -> U(n-1)` for a family over `S^(2k-1)`.
pub fn reduce_once(f: FamilyRef, k: usize, budget: &Budget, seed: u64) -> Result<(FamilyRef, ReductionStage)> {
    let n = f.size();
    if f.param_dim() != 2 * k - 1 {
        return Err(Error::DimensionMismatch { expected: 2 * k - 1, found: f.param_dim() });
    }
    if n <= k {
        return Err(Error::InvalidArgument(format!("cannot reduce U({n}) below U({k})")));
    }
    let columns = super::column_map(f.clone(), 1)?;
    let minus_e1 = UnitVector::basis(2 * n, 0).antipode();
    let mp = find_missed_point_with(&columns, budget.missed_point_samples, seed, &[minus_e1])?;
    let q = complexify(mp.point.coords());
    let p = completion(&q);
    let pre = -p.adjoint();
    debug_assert!(unitarity_defect(&pre) < 1e-12);
    let stage = ReductionStage {
        size: n,
        missed_point: mp.point,
        pre_rotation: MatrixData::from(&pre),
        clearance: mp.clearance,
        clearance_certified: mp.certified,
    };
    Ok((shared(ReducedFamily { inner: f, q: pre }), stage))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuResult {
    pub value: i64,
    pub trace: ReductionTrace,
    pub degree: DegreeResult,
}

/// The index `mu_k` of a family `S^(2k-1) -> U(n)`, read through column
/// `column` (one-based).
pub fn mu_k_unitary(f: FamilyRef, k: usize, column: usize, budget: &Budget, seed: u64) -> Result<MuResult> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={MAX_K}")));
    }
    if k > f.size() {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds matrix size {}", f.size())));
    }
    if f.param_dim() != 2 * k - 1 {
        return Err(Error::DimensionMismatch { expected: 2 * k - 1, found: f.param_dim() });
    }
    let mut g = if column == 1 { f } else { shared(ColumnSwap::new(f, column)?) };
    let mut trace = ReductionTrace::default();
    let mut stage_seed = seed;
    while g.size() > k {
        stage_seed = stage_seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let (next, stage) = reduce_once(g, k, budget, stage_seed)?;
        trace.stages.push(stage);
        g = next;
    }
    let columns = super::column_map(g, 1)?;
    let degree = certified_degree(&columns, 2 * k - 1, budget, seed)?;
    let factor = factorial(k - 1);
    if degree.degree % factor != 0 {
        return Err(Error::Divisibility { degree: degree.degree, factor });
    }
    Ok(MuResult { value: degree.degree / factor, trace, degree })
}
