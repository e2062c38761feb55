use std::collections::HashMap;
use std::sync::OnceLock;

use super::{check_sphere_dim, UnitVector, MAX_SPHERE_DIM};
use crate::error::{Error, Result};

/// Oriented simplicial approximation of `S^m`.
///
/// Every top simplex is stored with positive radial-cone orientation,
/// `det[v_0, .., v_m] > 0`, which is the boundary orientation of the ball.
#[derive(Debug, Clone)]
pub struct SphereTriangulation {
    dim: usize,
    level: u32,
    vertices: Vec<UnitVector>,
    // flattened, stride dim + 1
    simplices: Vec<u32>,
}

impl SphereTriangulation {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn vertices(&self) -> &[UnitVector] {
        &self.vertices
    }

    pub fn simplex_count(&self) -> usize {
        self.simplices.len() / (self.dim + 1)
    }

    pub fn simplex(&self, i: usize) -> &[u32] {
        let s = self.dim + 1;
        &self.simplices[i * s..(i + 1) * s]
    }

    pub fn simplices(&self) -> impl Iterator<Item = &[u32]> {
        self.simplices.chunks_exact(self.dim + 1)
    }

    pub fn simplex_points(&self, i: usize) -> Vec<&UnitVector> {
        self.simplex(i).iter().map(|&v| &self.vertices[v as usize]).collect()
    }

    /// Largest great-circle edge length; every point of the sphere lies
    /// within this distance of some vertex.
    pub fn mesh_size(&self) -> f64 {
        let mut h: f64 = 0.0;
        for s in self.simplices() {
            for a in 0..s.len() {
                for b in a + 1..s.len() {
                    let d = self.vertices[s[a] as usize].angle(&self.vertices[s[b] as usize]);
                    h = h.max(d);
                }
            }
        }
        h
    }

    /// Signed volume (times `(m+1)!`) of the radial cone over simplex `i`.
    pub fn cone_volume(&self, i: usize) -> f64 {
        let pts = self.simplex_points(i);
        let cols: Vec<&[f64]> = pts.iter().map(|p| p.coords()).collect();
        det_small(&cols)
    }

    /// Checks the closed-pseudomanifold and orientation invariants.
    pub fn validate(&self) -> Result<()> {
        let m = self.dim;
        let mut faces: HashMap<Vec<u32>, (u32, i32)> = HashMap::new();
        for (idx, s) in self.simplices().enumerate() {
            let mut sorted = s.to_vec();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != m + 1 {
                return Err(Error::InvalidArgument(format!("simplex {idx} repeats a vertex")));
            }
            if self.cone_volume(idx) <= 0.0 {
                return Err(Error::InvalidArgument(format!("simplex {idx} has non-positive cone volume")));
            }
            for omit in 0..=m {
                let mut face: Vec<u32> = s
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != omit)
                    .map(|(_, &v)| v)
                    .collect();
                let parity = sort_parity(&mut face);
                let sign = if omit % 2 == 0 { parity } else { -parity };
                let entry = faces.entry(face).or_insert((0, 0));
                entry.0 += 1;
                entry.1 += sign;
            }
        }
        for (face, (count, sum)) in &faces {
            if *count != 2 || *sum != 0 {
                return Err(Error::InvalidArgument(format!(
                    "face {face:?} appears {count} times with orientation sum {sum}"
                )));
            }
        }
        Ok(())
    }
}

/// Boundary of the `(m+1)`-dimensional cross-polytope, refined `level` times.
pub fn base_triangulation(m: usize, level: u32) -> Result<SphereTriangulation> {
    check_sphere_dim(m)?;
    let n = m + 1;
    let mut vertices = Vec::with_capacity(2 * n);
    for i in 0..n {
        vertices.push(UnitVector::basis(n, i));
        vertices.push(UnitVector::basis(n, i).antipode());
    }
    let mut simplices = Vec::with_capacity(n << n);
    for signs in 0u32..(1 << n) {
        let mut s: Vec<u32> = (0..n as u32)
            .map(|i| 2 * i + ((signs >> i) & 1))
            .collect();
        // det of diag(+-1) is the product of the signs
        if signs.count_ones() % 2 == 1 {
            s.swap(0, 1);
        }
        simplices.extend(s);
    }
    let mut tri = SphereTriangulation { dim: m, level: 0, vertices, simplices };
    for _ in 0..level {
        tri = refine(&tri);
    }
    Ok(tri)
}

/// One edgewise (Freudenthal) 2-subdivision with vertex renormalization.
pub fn refine(tri: &SphereTriangulation) -> SphereTriangulation {
    let m = tri.dim;
    let pattern = freudenthal_children(m);
    let mut vertices = tri.vertices.clone();
    let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
    let mut simplices = Vec::with_capacity(tri.simplices.len() << m);
    let mut local = vec![0u32; m + 1];
    for s in tri.simplices() {
        let mut sorted = s.to_vec();
        sorted.sort_unstable();
        for child in pattern {
            for (slot, &(i, j)) in child.iter().enumerate() {
                let (a, b) = (sorted[i as usize], sorted[j as usize]);
                local[slot] = if a == b {
                    a
                } else {
                    *midpoints.entry((a, b)).or_insert_with(|| {
                        let pa = vertices[a as usize].coords();
                        let pb = vertices[b as usize].coords();
                        let mid: Vec<f64> = pa.iter().zip(pb).map(|(x, y)| x + y).collect();
                        vertices.push(UnitVector::new(mid).expect("midpoint of distinct sphere points"));
                        (vertices.len() - 1) as u32
                    })
                };
            }
            let cols: Vec<&[f64]> = local.iter().map(|&v| vertices[v as usize].coords()).collect();
            if det_small(&cols) < 0.0 {
                local.swap(0, 1);
            }
            simplices.extend_from_slice(&local);
        }
    }
    SphereTriangulation { dim: m, level: tri.level + 1, vertices, simplices }
}

/// Children of the edgewise 2-subdivision of an ordered `m`-simplex.
///
/// Each child lists `m+1` vertex pairs `(i, j)` with `i <= j`, standing for
/// the midpoint of parent vertices `i` and `j` (or vertex `i` when equal).
pub fn freudenthal_children(m: usize) -> &'static [Vec<(u8, u8)>] {
    static PATTERNS: OnceLock<Vec<Vec<Vec<(u8, u8)>>>> = OnceLock::new();
    let all = PATTERNS.get_or_init(|| (0..=MAX_SPHERE_DIM).map(build_pattern).collect());
    &all[m]
}

fn build_pattern(m: usize) -> Vec<Vec<(u8, u8)>> {
    if m == 0 {
        return vec![vec![(0, 0)]];
    }
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..m).collect();
    let perms = all_permutations(&mut perm);
    for corner in 0u32..(1 << m) {
        for p in &perms {
            let mut y: Vec<i32> = (0..m).map(|i| ((corner >> i) & 1) as i32).collect();
            let mut pts = vec![y.clone()];
            for &axis in p {
                y[axis] += 1;
                pts.push(y.clone());
            }
            let inside = pts.iter().all(|q| {
                q[0] <= 2 && q[m - 1] >= 0 && q.windows(2).all(|w| w[0] >= w[1])
            });
            if inside {
                out.push(pts.iter().map(|q| lattice_to_pair(q)).collect());
            }
        }
    }
    out
}

// Path-simplex lattice point -> pair of parent vertices whose midpoint it is.
fn lattice_to_pair(y: &[i32]) -> (u8, u8) {
    let m = y.len();
    let mut coef = vec![0i32; m + 1];
    coef[0] = 2 - y[0];
    for l in 1..m {
        coef[l] = y[l - 1] - y[l];
    }
    coef[m] = y[m - 1];
    let mut idx = Vec::new();
    for (i, &c) in coef.iter().enumerate() {
        for _ in 0..c {
            idx.push(i as u8);
        }
    }
    debug_assert_eq!(idx.len(), 2);
    (idx[0], idx[1])
}

fn all_permutations(items: &mut Vec<usize>) -> Vec<Vec<usize>> {
    fn rec(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            rec(k + 1, items, out);
            items.swap(k, i);
        }
    }
    let mut out = Vec::new();
    rec(0, items, &mut out);
    out
}

fn sort_parity(v: &mut [u32]) -> i32 {
    let mut parity = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                parity = -parity;
            }
        }
    }
    parity
}

/// Determinant of a small square matrix given by columns, by partial pivoting.
pub(crate) fn det_small(cols: &[&[f64]]) -> f64 {
    let n = cols.len();
    let mut a = [0.0f64; 64];
    debug_assert!(n <= 8);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            a[i * n + j] = c[i];
        }
    }
    let mut det = 1.0;
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if a[i * n + k].abs() > a[p * n + k].abs() {
                p = i;
            }
        }
        if a[p * n + k] == 0.0 {
            return 0.0;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let piv = a[k * n + k];
        det *= piv;
        for i in k + 1..n {
            let f = a[i * n + k] / piv;
            if f != 0.0 {
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn square_and_octahedron() {
        let sq = base_triangulation(1, 0).unwrap();
        assert_eq!(sq.vertices().len(), 4);
        assert_eq!(sq.simplex_count(), 4);
        sq.validate().unwrap();

        let oct = base_triangulation(2, 0).unwrap();
        let v = oct.vertices().len() as i64;
        let f = oct.simplex_count() as i64;
        let mut edges = HashSet::new();
        for s in oct.simplices() {
            for a in 0..3 {
                for b in a + 1..3 {
                    edges.insert((s[a].min(s[b]), s[a].max(s[b])));
                }
            }
        }
        assert_eq!((v, f), (6, 8));
        assert_eq!(v - edges.len() as i64 + f, 2);
        oct.validate().unwrap();
    }

    #[test]
    fn children_counts_match_enumeration() {
        for m in 1..=MAX_SPHERE_DIM {
            let children = freudenthal_children(m);
            assert_eq!(children.len(), 1 << m, "m = {m}");
            // every parent vertex appears as a corner of exactly one child
            for i in 0..=m as u8 {
                let n = children.iter().filter(|c| c.contains(&(i, i))).count();
                assert_eq!(n, 1);
            }
        }
    }

    #[test]
    fn octahedron_refines_to_32_triangles() {
        let oct = base_triangulation(2, 0).unwrap();
        let r = refine(&oct);
        assert_eq!(r.simplex_count(), 32);
        assert_eq!(r.level(), 1);
        assert_eq!(base_triangulation(2, 1).unwrap().simplex_count(), 32);
        r.validate().unwrap();
    }

    #[test]
    fn refine_twice_matches_base_level_two() {
        for m in 1..=4 {
            let twice = refine(&refine(&base_triangulation(m, 0).unwrap()));
            let direct = base_triangulation(m, 2).unwrap();
            assert_eq!(twice.simplex_count(), direct.simplex_count());
            assert_eq!(direct.simplex_count(), (1 << (m + 1)) << (2 * m));
        }
    }

    #[test]
    fn refined_complexes_stay_valid() {
        for (m, level) in [(1, 5), (2, 3), (3, 2), (4, 1), (5, 1), (6, 1)] {
            let t = base_triangulation(m, level).unwrap();
            assert_eq!(t.simplex_count(), (1 << (m + 1)) << (m as u32 * level));
            t.validate().unwrap();
        }
    }

    #[test]
    fn mesh_size_halves_roughly() {
        let h0 = base_triangulation(2, 0).unwrap().mesh_size();
        let h3 = base_triangulation(2, 3).unwrap().mesh_size();
        assert!((h0 - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        // radial projection stretches edges near face centres
        assert!(h3 < h0 / 4.0 && h3 > h0 / 8.0);
    }

    #[test]
    fn rejects_unsupported_dimension() {
        assert!(matches!(base_triangulation(0, 0), Err(Error::UnsupportedDimension(0))));
        assert!(matches!(base_triangulation(7, 0), Err(Error::UnsupportedDimension(7))));
    }
}
