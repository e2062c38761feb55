use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{dot, norm};

/// Supported model manifolds.
///
/// Points are stored in ambient coordinates:
/// - linear contact sphere `S^(2n-1)` in `C^n = R^(2n)` (interleaved);
/// - torus `T^(2n)` by a lift to `R^(2n)`, ordered `(x_1, y_1, .., x_n, y_n)`;
/// - `CP^1` as the unit sphere in `R^3`;
/// - `S^1 x S^2` as `(theta; x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    LinearContactSphere { n: usize },
    Torus { dim: usize },
    Cp1,
    #[serde(rename = "s1xs2")]
    S1xS2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelManifold {
    pub kind: ModelKind,
    /// `N_1, N_2, ..`; zero means integer-valued.
    pub minimal_chern: Vec<u64>,
}

impl ModelManifold {
    pub fn new(kind: ModelKind) -> Result<Self> {
        let minimal_chern = match kind {
            ModelKind::LinearContactSphere { n } => {
                if n < 1 {
                    return Err(Error::InvalidArgument("linear contact sphere needs n >= 1".into()));
                }
                vec![0; n]
            }
            ModelKind::Torus { dim } => {
                if dim == 0 || dim % 2 == 1 {
                    return Err(Error::InvalidArgument(format!("torus dimension {dim} is not even and positive")));
                }
                vec![0; dim / 2]
            }
            // <c_1, [CP^1]> = 2
            ModelKind::Cp1 => vec![2],
            ModelKind::S1xS2 => vec![0],
        };
        Ok(ModelManifold { kind, minimal_chern })
    }

    pub fn linear_contact_sphere(n: usize) -> Result<Self> {
        Self::new(ModelKind::LinearContactSphere { n })
    }

    pub fn torus(dim: usize) -> Result<Self> {
        Self::new(ModelKind::Torus { dim })
    }

    pub fn cp1() -> Self {
        Self::new(ModelKind::Cp1).expect("fixed model")
    }

    pub fn s1xs2() -> Self {
        Self::new(ModelKind::S1xS2).expect("fixed model")
    }

    pub fn name(&self) -> String {
        match self.kind {
            ModelKind::LinearContactSphere { n } => format!("linear_contact_sphere(n={n})"),
            ModelKind::Torus { dim } => format!("torus(dim={dim})"),
            ModelKind::Cp1 => "cp1".into(),
            ModelKind::S1xS2 => "s1xs2".into(),
        }
    }

    /// Manifold dimension.
    pub fn dimension(&self) -> usize {
        match self.kind {
            ModelKind::LinearContactSphere { n } => 2 * n - 1,
            ModelKind::Torus { dim } => dim,
            ModelKind::Cp1 => 2,
            ModelKind::S1xS2 => 3,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            ModelKind::LinearContactSphere { n } => 2 * n,
            ModelKind::Torus { dim } => dim,
            ModelKind::Cp1 => 3,
            ModelKind::S1xS2 => 4,
        }
    }

    /// Complex rank of the bundle whose frames are pushed: the ambient
    /// `C^n` for the contact sphere, the tangent bundle otherwise.
    pub fn frame_rank(&self) -> usize {
        match self.kind {
            ModelKind::LinearContactSphere { n } => n,
            ModelKind::Torus { dim } => dim / 2,
            ModelKind::Cp1 | ModelKind::S1xS2 => 1,
        }
    }

    pub fn minimal_chern(&self, k: usize) -> Result<u64> {
        if k == 0 || k > self.minimal_chern.len() {
            return Err(Error::InvalidArgument(format!(
                "k = {k} outside the Chern table 1..={} of {}",
                self.minimal_chern.len(),
                self.name()
            )));
        }
        Ok(self.minimal_chern[k - 1])
    }

    /// Default basepoint.
    pub fn basepoint(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.ambient_dim()];
        match self.kind {
            ModelKind::LinearContactSphere { .. } => p[0] = 1.0,
            ModelKind::Torus { .. } => {}
            ModelKind::Cp1 => p[2] = 1.0,
            ModelKind::S1xS2 => p[3] = 1.0,
        }
        p
    }

    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), found: p.len() });
        }
        let off = match self.kind {
            ModelKind::LinearContactSphere { .. } | ModelKind::Cp1 => (norm(p) - 1.0).abs(),
            ModelKind::Torus { .. } => 0.0,
            ModelKind::S1xS2 => (norm(&p[1..]) - 1.0).abs(),
        };
        if !(off < 1e-9) || p.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!("point {p:?} is not on {}", self.name())));
        }
        Ok(())
    }

    /// Complex structure on the frame bundle fiber at `q`.
    pub fn complex_structure(&self, q: &[f64], v: &[f64]) -> Vec<f64> {
        match self.kind {
            ModelKind::LinearContactSphere { .. } | ModelKind::Torus { .. } => {
                v.chunks_exact(2).flat_map(|c| [-c[1], c[0]]).collect()
            }
            ModelKind::Cp1 => cross(q, v).to_vec(),
            ModelKind::S1xS2 => {
                // J on the S^2 factor only; no index pipeline runs on this model
                let w = cross(&q[1..], &v[1..]);
                vec![0.0, w[0], w[1], w[2]]
            }
        }
    }

    /// Orthogonal projection onto the fiber at `q`.
    pub fn project(&self, q: &[f64], v: &[f64]) -> Vec<f64> {
        match self.kind {
            ModelKind::Cp1 => {
                let c = dot(q, v);
                v.iter().zip(q).map(|(vi, qi)| vi - c * qi).collect()
            }
            _ => v.to_vec(),
        }
    }

    /// True when the fiber is a fixed vector space with the trivial connection.
    pub fn flat_fiber(&self) -> bool {
        !matches!(self.kind, ModelKind::Cp1)
    }
}

pub(crate) fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chern_tables() {
        assert_eq!(ModelManifold::cp1().minimal_chern(1).unwrap(), 2);
        let s = ModelManifold::linear_contact_sphere(3).unwrap();
        for k in 1..=3 {
            assert_eq!(s.minimal_chern(k).unwrap(), 0);
        }
        assert!(s.minimal_chern(4).is_err());
        let t = ModelManifold::torus(4).unwrap();
        assert_eq!(t.minimal_chern(2).unwrap(), 0);
        assert_eq!(s.dimension(), 5);
        assert!(ModelManifold::torus(3).is_err());
    }

    #[test]
    fn complex_structures_square_to_minus_one() {
        let m = ModelManifold::cp1();
        let q = [0.6, 0.0, 0.8];
        let v = m.project(&q, &[0.3, -1.0, 0.2]);
        let jj = m.complex_structure(&q, &m.complex_structure(&q, &v));
        assert!(jj.iter().zip(&v).all(|(a, b)| (a + b).abs() < 1e-15));
        let s = ModelManifold::linear_contact_sphere(2).unwrap();
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(s.complex_structure(&[1.0, 0.0, 0.0, 0.0], &v), vec![-2.0, 1.0, -4.0, 3.0]);
    }
}
