//! Families of unitary matrices over odd spheres and their reduction to a
//! single sphere-map degree.
//!
//! A family `S^(2k-1) -> U(n)` is reduced one size at a time: a constant
//! unitary moves a missed point of the first-column map to `-e_1`, then a
//! continuous correction rotates the first column onto `e_1` and the lower
//! block is kept. For `n = k` the first-column map `S^(2k-1) -> S^(2k-1)`
//! has degree divisible by `(k-1)!`, and the quotient is the index.

mod builtin;
mod family;
mod reduction;

pub(crate) use builtin::shared;
pub use builtin::{
    CliffordGenerator, ColumnSwap, ConjugatedFamily, ConstantFamily, DiagonalLoop, ProductFamily,
    ReparametrizedFamily, SampledData, SampledFamily, StabilizedFamily, Su2Generator,
};
pub use family::{column_map, ColumnMap, FamilyRef, UnitaryFamily, DEFAULT_UNITARITY_TOLERANCE};
pub use reduction::{mu_k_unitary, reduce_once, MuResult, ReducedFamily, ReductionStage, ReductionTrace};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest `k` handled: the degree is then computed on `S^5`.
pub const MAX_K: usize = 3;

/// Frobenius norm of `M* M - I`.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.ncols();
    (m.adjoint() * m - CMatrix::identity(n, n)).norm()
}

/// Nearest unitary matrix (the unitary polar factor), by Newton iteration
/// `X <- (X + X^-*) / 2`.
///
/// Fails when the smallest singular value may be below `1e-6`, or when the
/// iteration does not reach a defect of `tol`.
pub fn unitarize(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::InvalidArgument(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    let n = m.nrows();
    let mut x = m.clone();
    for it in 0..100 {
        let inv = x.clone().try_inverse().ok_or(Error::RankDeficient { bound: f64::INFINITY })?;
        if it == 0 {
            // ||M^-1||_F >= 1 / sigma_min
            let bound = inv.norm();
            if !(bound <= 1e6) {
                return Err(Error::RankDeficient { bound });
            }
        }
        let next = (&x + inv.adjoint()).scale(0.5);
        let step = (&next - &x).norm();
        x = next;
        if step <= 1e-15 * (n as f64).sqrt() {
            break;
        }
    }
    let defect = unitarity_defect(&x);
    if defect > tol {
        return Err(Error::UnitarityDrift { defect, tolerance: tol });
    }
    Ok(x)
}

/// Interleaved real coordinates `(Re z_1, Im z_1, ..)` of a complex vector.
pub fn realify(v: &[Complex64]) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

pub fn complexify(v: &[f64]) -> Vec<Complex64> {
    v.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

/// Row-major `[re, im]` pairs; the text form of a complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixData(pub Vec<Vec<[f64; 2]>>);

impl From<&CMatrix> for MatrixData {
    fn from(m: &CMatrix) -> Self {
        MatrixData((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect())
    }
}

impl TryFrom<&MatrixData> for CMatrix {
    type Error = Error;
    fn try_from(d: &MatrixData) -> Result<CMatrix> {
        let n = d.0.len();
        let cols = d.0.first().map_or(0, |r| r.len());
        if n == 0 || d.0.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("ragged or empty matrix".into()));
        }
        Ok(CMatrix::from_fn(n, cols, |i, j| Complex64::new(d.0[i][j][0], d.0[i][j][1])))
    }
}

pub(crate) fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    // polar factor from the singular value decomposition
    fn svd_polar(m: &CMatrix) -> CMatrix {
        let svd = m.clone().svd(true, true);
        svd.u.unwrap() * svd.v_t.unwrap()
    }

    #[test]
    fn identity_is_fixed() {
        let i = CMatrix::identity(3, 3);
        assert!((unitarize(&i, 1e-12).unwrap() - &i).norm() < 1e-15);
    }

    #[test]
    fn small_perturbation_is_removed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = random_matrix(3, &mut rng);
        let m = CMatrix::identity(3, 3) + e.scale(1e-10 / e.norm());
        let u = unitarize(&m, 1e-12).unwrap();
        assert!((&u - CMatrix::identity(3, 3)).norm() < 1e-9);
        assert!((&u - svd_polar(&m)).norm() < 1e-12);
    }

    #[test]
    fn matches_the_svd_polar_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=4 {
            for _ in 0..20 {
                let m = random_matrix(n, &mut rng);
                let Ok(u) = unitarize(&m, 1e-12) else { continue };
                assert!((&u - svd_polar(&m)).norm() < 1e-10);
                assert!(unitarity_defect(&u) < 1e-12);
            }
        }
    }

    #[test]
    fn distance_is_controlled_by_the_defect() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let u = svd_polar(&random_matrix(3, &mut rng));
            let m = &u + random_matrix(3, &mut rng).scale(1e-3);
            let r = unitarize(&m, 1e-12).unwrap();
            assert!((&r - &m).norm() <= 10.0 * unitarity_defect(&m));
        }
    }

    #[test]
    fn zero_column_is_rank_deficient() {
        let mut m = CMatrix::identity(3, 3);
        m.column_mut(1).fill(Complex64::new(0.0, 0.0));
        assert!(matches!(unitarize(&m, 1e-8), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn realify_interleaves() {
        let v = [Complex64::new(1.0, 2.0), Complex64::new(3.0, 4.0)];
        assert_eq!(realify(&v), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(complexify(&realify(&v)), v.to_vec());
    }
}
