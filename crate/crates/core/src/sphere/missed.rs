use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{base_triangulation, dot, SphereMap, UnitVector};
use crate::error::{Error, Result};

/// Minimum clearance accepted as a miss.
pub const CLEARANCE_TOLERANCE: f64 = 1e-6;

/// A point of the codomain avoided by every sampled image point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissedPoint {
    pub point: UnitVector,
    /// Smallest great-circle distance from `point` to a sampled image point.
    pub clearance: f64,
    /// Covering radius of the domain sample set.
    pub mesh: f64,
    /// True when a declared Lipschitz constant turns the sampled clearance
    /// into a guarantee for the whole image.
    pub certified: bool,
    /// `clearance - lipschitz * mesh` when certified.
    pub certified_radius: Option<f64>,
    pub samples: usize,
}

pub fn find_missed_point(f: &dyn SphereMap, budget: usize, seed: u64) -> Result<MissedPoint> {
    find_missed_point_with(f, budget, seed, &[])
}

/// As [`find_missed_point`], but the first `preferred` candidate whose sampled
/// clearance is at least half the best found clearance wins.
pub fn find_missed_point_with(
    f: &dyn SphereMap,
    budget: usize,
    seed: u64,
    preferred: &[UnitVector],
) -> Result<MissedPoint> {
    let a = f.domain_dim();
    let b = f.codomain_dim();
    if a >= b {
        return Err(Error::InvalidArgument(format!(
            "missed-point search needs domain dimension {a} < codomain dimension {b}"
        )));
    }
    let samples = sample_triangulation(a, budget.max(8))?;
    let mesh = samples.mesh_size();
    let images: Vec<UnitVector> = samples
        .vertices()
        .par_iter()
        .map(|x| f.eval(x))
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_random = budget.clamp(16, 2048);
    let mut candidates: Vec<UnitVector> = Vec::with_capacity(n_random + 1);
    let mean: Vec<f64> = (0..=b)
        .map(|i| images.iter().map(|y| y.coords()[i]).sum::<f64>())
        .collect();
    if let Ok(m) = UnitVector::new(mean) {
        candidates.push(m.antipode());
    }
    for _ in 0..n_random {
        candidates.push(UnitVector::random(b + 1, &mut rng));
    }

    let scored: Vec<(f64, UnitVector)> = candidates
        .into_par_iter()
        .map(|q| (clearance(&q, &images), q))
        .collect();
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&i, &j| scored[j].0.total_cmp(&scored[i].0).then(i.cmp(&j)));
    let polished: Vec<(f64, UnitVector)> = order
        .iter()
        .take(8)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|&i| polish(&scored[i].1, &images))
        .collect();
    let (mut best_r, mut best_q) = polished
        .into_iter()
        .fold((f64::NEG_INFINITY, None), |acc, (r, q)| if r > acc.0 { (r, Some(q)) } else { acc });

    for p in preferred {
        if p.dim() != b {
            continue;
        }
        let r = clearance(p, &images);
        if r >= 0.5 * best_r && r > CLEARANCE_TOLERANCE {
            best_r = r;
            best_q = Some(p.clone());
            break;
        }
    }

    let point = best_q.ok_or(Error::NoMissedPoint { best_clearance: 0.0 })?;
    if best_r <= CLEARANCE_TOLERANCE {
        return Err(Error::NoMissedPoint { best_clearance: best_r });
    }
    let (certified, certified_radius) = match f.lipschitz() {
        Some(l) if best_r > l * mesh => (true, Some(best_r - l * mesh)),
        _ => (false, None),
    };
    Ok(MissedPoint {
        point,
        clearance: best_r,
        mesh,
        certified,
        certified_radius,
        samples: images.len(),
    })
}

/// Densest cross-polytope refinement with at most `budget` vertices.
fn sample_triangulation(a: usize, budget: usize) -> Result<super::SphereTriangulation> {
    let mut tri = base_triangulation(a, 0)?;
    loop {
        // vertex count roughly multiplies by 2^a; stop before overshooting
        if tri.vertices().len() << a > budget * 2 {
            return Ok(tri);
        }
        let next = super::refine(&tri);
        if next.vertices().len() > budget {
            return Ok(tri);
        }
        tri = next;
    }
}

fn clearance(q: &UnitVector, images: &[UnitVector]) -> f64 {
    let closest = images
        .iter()
        .max_by(|x, y| dot(x.coords(), q.coords()).total_cmp(&dot(y.coords(), q.coords())));
    match closest {
        Some(y) => q.angle(y),
        None => std::f64::consts::PI,
    }
}

// Local ascent on the clearance: push q away from its nearest image point.
fn polish(start: &UnitVector, images: &[UnitVector]) -> (f64, UnitVector) {
    let mut q = start.clone();
    let mut r = clearance(&q, images);
    let mut step = 0.25;
    for _ in 0..200 {
        if step < 1e-10 {
            break;
        }
        let nearest = images
            .iter()
            .max_by(|x, y| dot(x.coords(), q.coords()).total_cmp(&dot(y.coords(), q.coords())))
            .expect("non-empty sample");
        let d = dot(nearest.coords(), q.coords());
        let trial: Vec<f64> = q
            .coords()
            .iter()
            .zip(nearest.coords())
            .map(|(qi, yi)| qi - step * (yi - d * qi))
            .collect();
        let Ok(trial) = UnitVector::new(trial) else { break };
        let rt = clearance(&trial, images);
        if rt > r {
            q = trial;
            r = rt;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    (r, q)
}
