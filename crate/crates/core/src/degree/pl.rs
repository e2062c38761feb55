use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_2;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use rayon::prelude::*;

use super::{BARYCENTRIC_TOLERANCE, DETERMINANT_TOLERANCE};
use crate::error::{Error, Result};
use crate::sphere::{
    angle_between, base_triangulation, check_sphere_dim, det_small, freudenthal_children, norm,
    SphereMap, SphereTriangulation, UnitVector,
};

/// Raw result of one simplicial count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlOutcome {
    pub degree: i64,
    /// Simplices at the target level that were actually examined.
    pub leaves: usize,
    /// Examined simplices whose image spans at least a hemisphere.
    pub wild: usize,
    /// All simplices visited, including pruned ones.
    pub visited: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    degree: i64,
    leaves: usize,
    wild: usize,
}

impl Partial {
    fn add(mut self, o: Partial) -> Partial {
        self.degree += o.degree;
        self.leaves += o.leaves;
        self.wild += o.wild;
        self
    }
}

/// Signed count over every simplex of `tri`.
pub fn pl_degree(f: &dyn SphereMap, tri: &SphereTriangulation, regular_value: &UnitVector) -> Result<i64> {
    let m = tri.dim();
    check_dims(f, m, regular_value)?;
    let images: Vec<UnitVector> = tri.vertices().par_iter().map(|x| f.eval(x)).collect::<Result<_>>()?;
    let r = regular_value.coords();
    let parts: Vec<Result<Partial>> = (0..tri.simplex_count())
        .into_par_iter()
        .map(|i| {
            let s = tri.simplex(i);
            let dom: Vec<&[f64]> = s.iter().map(|&v| tri.vertices()[v as usize].coords()).collect();
            let img: Vec<&[f64]> = s.iter().map(|&v| images[v as usize].coords()).collect();
            let cap = image_cap(&img);
            leaf(&dom, &img, r, &cap)
        })
        .collect();
    let total = combine(parts)?;
    check_wild(&total)?;
    Ok(total.degree)
}

/// Signed count at refinement `level`, subdividing only simplices whose
/// image may still cover `regular_value`.
///
/// With a declared Lipschitz constant `L` a simplex of diameter `h` whose
/// vertex images fit in a cap of radius `rho` is discarded when the value
/// lies farther than `rho + L h` from the cap centre. Without one, the cap
/// is inflated by the deviation of the barycentre image instead.
pub fn adaptive_pl_degree(
    f: &dyn SphereMap,
    m: usize,
    level: u32,
    regular_value: &UnitVector,
    max_simplices: usize,
) -> Result<PlOutcome> {
    check_dims(f, m, regular_value)?;
    let base = base_triangulation(m, 0)?;
    let ctx = Ctx {
        f,
        r: regular_value.coords(),
        lipschitz: f.lipschitz(),
        pattern: freudenthal_children(m),
        visited: AtomicUsize::new(0),
        limit: max_simplices,
    };
    let parts: Vec<Result<Partial>> = (0..base.simplex_count())
        .into_par_iter()
        .map(|i| {
            let dom: Vec<UnitVector> = base.simplex_points(i).into_iter().cloned().collect();
            let img: Vec<UnitVector> = dom.iter().map(|x| f.eval(x)).collect::<Result<_>>()?;
            ctx.visit(dom, img, level)
        })
        .collect();
    let total = combine(parts)?;
    check_wild(&total)?;
    Ok(PlOutcome {
        degree: total.degree,
        leaves: total.leaves,
        wild: total.wild,
        visited: ctx.visited.load(AtomicOrdering::Relaxed),
    })
}

struct Ctx<'a> {
    f: &'a dyn SphereMap,
    r: &'a [f64],
    lipschitz: Option<f64>,
    pattern: &'static [Vec<(u8, u8)>],
    visited: AtomicUsize,
    limit: usize,
}

impl Ctx<'_> {
    fn visit(&self, dom: Vec<UnitVector>, img: Vec<UnitVector>, remaining: u32) -> Result<Partial> {
        if self.visited.fetch_add(1, AtomicOrdering::Relaxed) >= self.limit {
            return Err(Error::BudgetExhausted { limit: self.limit });
        }
        let img_c: Vec<&[f64]> = img.iter().map(|p| p.coords()).collect();
        let cap = image_cap(&img_c);
        if remaining == 0 {
            let dom_c: Vec<&[f64]> = dom.iter().map(|p| p.coords()).collect();
            return leaf(&dom_c, &img_c, self.r, &cap);
        }
        if let Some((c, rho)) = &cap.cap {
            let d = angle_between(c, self.r);
            if d > 2.0 * rho || self.lipschitz.is_some() {
                let reach = match self.lipschitz {
                    Some(l) => rho + l * diameter(&dom),
                    None => {
                        let e = self.barycentre_deviation(&dom, c)?;
                        2.0 * rho + 4.0 * e
                    }
                };
                if reach < FRAC_PI_2 && d > reach {
                    return Ok(Partial::default());
                }
            }
        }
        self.subdivide(dom, img, remaining)
    }

    fn barycentre_deviation(&self, dom: &[UnitVector], c: &[f64]) -> Result<f64> {
        let n = dom[0].len();
        let g: Vec<f64> = (0..n).map(|i| dom.iter().map(|p| p.coords()[i]).sum()).collect();
        let y = self.f.eval(&UnitVector::new(g)?)?;
        Ok(angle_between(y.coords(), c))
    }

    fn subdivide(&self, dom: Vec<UnitVector>, img: Vec<UnitVector>, remaining: u32) -> Result<Partial> {
        // a global vertex order keeps subdivisions of shared faces identical
        let mut order: Vec<usize> = (0..dom.len()).collect();
        order.sort_by(|&a, &b| lex_cmp(dom[a].coords(), dom[b].coords()));
        let k = dom.len();
        let mut pts: Vec<Option<(UnitVector, UnitVector)>> = vec![None; k * k];
        for (slot, &o) in order.iter().enumerate() {
            pts[slot * k + slot] = Some((dom[o].clone(), img[o].clone()));
        }
        for i in 0..k {
            for j in i + 1..k {
                let (a, b) = (&dom[order[i]], &dom[order[j]]);
                let mid: Vec<f64> = a.coords().iter().zip(b.coords()).map(|(x, y)| x + y).collect();
                let x = UnitVector::new(mid)?;
                let y = self.f.eval(&x)?;
                pts[i * k + j] = Some((x, y));
            }
        }
        let children: Vec<(Vec<UnitVector>, Vec<UnitVector>)> = self
            .pattern
            .iter()
            .map(|child| {
                child
                    .iter()
                    .map(|&(i, j)| pts[i as usize * k + j as usize].clone().expect("filled above"))
                    .unzip()
            })
            .collect();
        let parts: Vec<Result<Partial>> = if remaining > 2 {
            children.into_par_iter().map(|(d, i)| self.visit(d, i, remaining - 1)).collect()
        } else {
            children.into_iter().map(|(d, i)| self.visit(d, i, remaining - 1)).collect()
        };
        combine(parts)
    }
}

pub(crate) struct Cap {
    // centre and angular radius, absent when the images span a hemisphere
    cap: Option<(Vec<f64>, f64)>,
}

pub(crate) fn image_cap(img: &[&[f64]]) -> Cap {
    let n = img[0].len();
    let mut c: Vec<f64> = (0..n).map(|i| img.iter().map(|p| p[i]).sum()).collect();
    let nc = norm(&c);
    if nc < 1e-12 {
        return Cap { cap: None };
    }
    c.iter_mut().for_each(|x| *x /= nc);
    let rho = img.iter().map(|p| angle_between(p, &c)).fold(0.0, f64::max);
    if rho >= FRAC_PI_2 - 1e-12 {
        Cap { cap: None }
    } else {
        Cap { cap: Some((c, rho)) }
    }
}

fn leaf(dom: &[&[f64]], img: &[&[f64]], r: &[f64], cap: &Cap) -> Result<Partial> {
    let wild = match &cap.cap {
        Some((c, rho)) => {
            // the cone over the image lies inside the cap
            if angle_between(c, r) > rho + 1e-12 {
                return Ok(Partial { degree: 0, leaves: 1, wild: 0 });
            }
            0
        }
        None => 1,
    };
    let (det_w, mu) = solve(img, r);
    let mu = match mu {
        Some(mu) if det_w.abs() >= DETERMINANT_TOLERANCE => mu,
        // a flat image cone carries no degree but signals under-resolution
        _ => return Ok(Partial { degree: 0, leaves: 1, wild: 1 }),
    };
    if mu.iter().any(|x| x.abs() < BARYCENTRIC_TOLERANCE) {
        return Err(Error::NonRegularValue);
    }
    let degree = if mu.iter().all(|&x| x > 0.0) {
        (det_w.signum() * det_small(dom).signum()) as i64
    } else {
        0
    };
    Ok(Partial { degree, leaves: 1, wild })
}

/// Solves `sum mu_i w_i = r`; returns `det[w_0..w_m]` and `mu`.
fn solve(cols: &[&[f64]], r: &[f64]) -> (f64, Option<Vec<f64>>) {
    let n = cols.len();
    let mut a = [[0.0f64; 9]; 8];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = cols[j][i];
        }
        a[i][n] = r[i];
    }
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs())).unwrap_or(k);
        if a[p][k] == 0.0 {
            return (0.0, None);
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let t = a[i][k] / a[k][k];
            for j in k..=n {
                a[i][j] -= t * a[k][j];
            }
        }
    }
    let mut mu = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * mu[j]).sum();
        mu[i] = (a[i][n] - s) / a[i][i];
    }
    (det, Some(mu))
}

fn diameter(pts: &[UnitVector]) -> f64 {
    let mut h: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            h = h.max(pts[i].angle(&pts[j]));
        }
    }
    h
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

// Budget exhaustion wins, otherwise the first error in simplex order.
fn combine(parts: Vec<Result<Partial>>) -> Result<Partial> {
    let mut total = Partial::default();
    let mut first_err = None;
    for p in parts {
        match p {
            Ok(p) => total = total.add(p),
            Err(e @ Error::BudgetExhausted { .. }) => return Err(e),
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

fn check_wild(total: &Partial) -> Result<()> {
    if total.wild * 100 > total.leaves {
        return Err(Error::InsufficientRefinement { wild: total.wild, total: total.leaves });
    }
    Ok(())
}

fn check_dims(f: &dyn SphereMap, m: usize, r: &UnitVector) -> Result<()> {
    check_sphere_dim(m)?;
    for found in [f.domain_dim(), f.codomain_dim(), r.dim()] {
        if found != m {
            return Err(Error::DimensionMismatch { expected: m, found });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{AntipodalMap, ConstantMap, IdentityMap, SuspendedPowerMap};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn value(m: usize, seed: u64) -> UnitVector {
        UnitVector::random(m + 1, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    #[test]
    fn identity_on_s2_has_degree_one() {
        let tri = base_triangulation(2, 2).unwrap();
        assert_eq!(pl_degree(&IdentityMap(2), &tri, &value(2, 1)).unwrap(), 1);
    }

    #[test]
    fn tripling_on_s1() {
        let tri = base_triangulation(1, 4).unwrap();
        let f = SuspendedPowerMap { dim: 1, power: 3 };
        assert_eq!(pl_degree(&f, &tri, &value(1, 2)).unwrap(), 3);
    }

    #[test]
    fn antipodal_sign_alternates() {
        for m in 1..=4 {
            let tri = base_triangulation(m, 1).unwrap();
            let d = pl_degree(&AntipodalMap(m), &tri, &value(m, 3)).unwrap();
            assert_eq!(d, if m % 2 == 0 { -1 } else { 1 }, "m = {m}");
        }
    }

    #[test]
    fn constant_map_counts_zero() {
        let tri = base_triangulation(3, 1).unwrap();
        let f = ConstantMap { domain: 3, value: UnitVector::basis(4, 0) };
        assert_eq!(pl_degree(&f, &tri, &value(3, 4)).unwrap(), 0);
    }

    #[test]
    fn vertex_image_is_not_regular() {
        let tri = base_triangulation(2, 0).unwrap();
        let r = UnitVector::basis(3, 0);
        assert_eq!(pl_degree(&IdentityMap(2), &tri, &r), Err(Error::NonRegularValue));
    }

    #[test]
    fn coarse_wild_map_asks_for_refinement() {
        let tri = base_triangulation(1, 0).unwrap();
        let f = SuspendedPowerMap { dim: 1, power: 2 };
        assert!(matches!(pl_degree(&f, &tri, &value(1, 5)), Err(Error::InsufficientRefinement { .. })));
    }

    #[test]
    fn adaptive_count_matches_full_count() {
        for (m, d, level) in [(1usize, 3i32, 6u32), (2, -2, 4), (3, 2, 3)] {
            let f = SuspendedPowerMap { dim: m, power: d };
            let r = value(m, 6);
            let full = pl_degree(&f, &base_triangulation(m, level).unwrap(), &r).unwrap();
            let adaptive = adaptive_pl_degree(&f, m, level, &r, usize::MAX).unwrap();
            assert_eq!(full, adaptive.degree);
            assert_eq!(adaptive.degree, d as i64);
            assert!(adaptive.leaves <= base_triangulation(m, level).unwrap().simplex_count());
        }
    }

    #[test]
    fn pruning_skips_most_of_a_fine_level() {
        let f = SuspendedPowerMap { dim: 1, power: 3 };
        let out = adaptive_pl_degree(&f, 1, 12, &value(1, 8), usize::MAX).unwrap();
        assert_eq!(out.degree, 3);
        assert!(out.visited < 2000, "{}", out.visited);
    }

    #[test]
    fn small_budget_is_reported() {
        let f = IdentityMap(3);
        let err = adaptive_pl_degree(&f, 3, 4, &value(3, 7), 10).unwrap_err();
        assert_eq!(err, Error::BudgetExhausted { limit: 10 });
    }

    #[test]
    fn solver_recovers_coefficients() {
        let cols: Vec<Vec<f64>> = vec![vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![1.0, 1.0, 1.0]];
        let c: Vec<&[f64]> = cols.iter().map(|v| v.as_slice()).collect();
        let (det, mu) = solve(&c, &[2.0, 3.0, 1.0]);
        assert!((det - 2.0).abs() < 1e-15);
        let mu = mu.unwrap();
        assert!((mu[0] - 1.0).abs() < 1e-15 && (mu[1] - 1.0).abs() < 1e-15 && (mu[2] - 1.0).abs() < 1e-15);
    }
}
