use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sphere::{base_triangulation, det_columns, norm, tangent_frame, SphereMap, SphereTriangulation, UnitVector};

const FD_STEP: f64 = 1e-5;

/// Normalized integral of the Jacobian of `f`, one quadrature node per
/// simplex (radially projected centroid, weighted by its solid angle).
pub fn degree_estimate_integral(f: &dyn SphereMap, tri: &SphereTriangulation) -> Result<f64> {
    let m = tri.dim();
    if f.domain_dim() != m || f.codomain_dim() != m {
        return Err(Error::DimensionMismatch { expected: m, found: f.domain_dim().max(f.codomain_dim()) });
    }
    let terms: Vec<(f64, f64)> = (0..tri.simplex_count())
        .into_par_iter()
        .map(|i| {
            let pts = tri.simplex_points(i);
            let cols: Vec<&[f64]> = pts.iter().map(|p| p.coords()).collect();
            let g: Vec<f64> = (0..=m).map(|k| cols.iter().map(|c| c[k]).sum()).collect();
            let w = det_columns(&cols).abs() / norm(&g).powi(m as i32 + 1);
            let x = UnitVector::new(g)?;
            Ok((w, jacobian(f, &x)?))
        })
        .collect::<Result<_>>()?;
    let (mut num, mut den) = (0.0, 0.0);
    for (w, j) in terms {
        num += w * j;
        den += w;
    }
    Ok(num / den)
}

/// Oriented tangential Jacobian determinant of `f` at `x`.
pub(crate) fn jacobian(f: &dyn SphereMap, x: &UnitVector) -> Result<f64> {
    let y = f.eval(x)?;
    let mut cols = vec![y.coords().to_vec()];
    for t in tangent_frame(x.coords()) {
        let plus: Vec<f64> = x.coords().iter().zip(&t).map(|(a, b)| a + FD_STEP * b).collect();
        let minus: Vec<f64> = x.coords().iter().zip(&t).map(|(a, b)| a - FD_STEP * b).collect();
        let fp = f.eval(&UnitVector::new(plus)?)?;
        let fm = f.eval(&UnitVector::new(minus)?)?;
        cols.push(fp.coords().iter().zip(fm.coords()).map(|(a, b)| (a - b) / (2.0 * FD_STEP)).collect());
    }
    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    Ok(det_columns(&refs))
}

/// Uniform triangulation for the quadrature: `level`, lowered until it has
/// at most `max_simplices` simplices (never below level 0). Shared cache.
pub fn integral_triangulation(m: usize, level: u32, max_simplices: usize) -> Result<Arc<SphereTriangulation>> {
    let mut l = level;
    while l > 0 && (1usize << (m + 1)).saturating_mul(1usize << (m * l as usize).min(60)) > max_simplices {
        l -= 1;
    }
    cached_triangulation(m, l)
}

pub(crate) fn cached_triangulation(m: usize, level: u32) -> Result<Arc<SphereTriangulation>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<SphereTriangulation>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("triangulation cache").get(&(m, level)) {
        return Ok(t.clone());
    }
    let t = Arc::new(base_triangulation(m, level)?);
    cache.lock().expect("triangulation cache").insert((m, level), t.clone());
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{AntipodalMap, ConstantMap, IdentityMap, SuspendedPowerMap};

    #[test]
    fn identity_on_s2_integrates_to_one() {
        let tri = base_triangulation(2, 3).unwrap();
        let v = degree_estimate_integral(&IdentityMap(2), &tri).unwrap();
        assert!((v - 1.0).abs() < 0.05, "{v}");
    }

    #[test]
    fn tripling_integrates_to_three() {
        let tri = base_triangulation(1, 6).unwrap();
        let v = degree_estimate_integral(&SuspendedPowerMap { dim: 1, power: 3 }, &tri).unwrap();
        assert!((v - 3.0).abs() < 0.05, "{v}");
    }

    #[test]
    fn constant_integrates_to_zero() {
        let tri = base_triangulation(3, 1).unwrap();
        let f = ConstantMap { domain: 3, value: UnitVector::basis(4, 2) };
        assert_eq!(degree_estimate_integral(&f, &tri).unwrap(), 0.0);
    }

    #[test]
    fn antipodal_on_s3_integrates_to_one() {
        let tri = base_triangulation(3, 2).unwrap();
        let v = degree_estimate_integral(&AntipodalMap(3), &tri).unwrap();
        assert!((v - 1.0).abs() < 0.05, "{v}");
    }

    #[test]
    fn quadrature_level_respects_cap() {
        let t = integral_triangulation(5, 9, 1 << 18).unwrap();
        assert!(t.simplex_count() <= 1 << 18);
        assert_eq!(t.level(), 2);
    }
}
