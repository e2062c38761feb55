use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::family::TorusLoop;
use crate::error::{Error, Result};

const GAUSS_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];
const TIME_STEP: f64 = 1e-6;
const START_PANELS: usize = 8;
const MAX_PANELS: usize = 1024;
pub const FLUX_TOLERANCE: f64 = 1e-6;

/// Closed straight cycle `u -> base + u * direction`, `u in [0, 1]`, on the
/// torus; `direction` must be an integer vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearCycle {
    pub base: Vec<f64>,
    pub direction: Vec<f64>,
}

impl LinearCycle {
    pub fn new(base: Vec<f64>, direction: Vec<f64>) -> Result<Self> {
        if base.len() != direction.len() {
            return Err(Error::DimensionMismatch { expected: base.len(), found: direction.len() });
        }
        if direction.iter().any(|d| (d - d.round()).abs() > 1e-12) {
            return Err(Error::InvalidArgument(format!("cycle direction {direction:?} is not closed on the torus")));
        }
        Ok(LinearCycle { base, direction })
    }

    /// The `i`-th coordinate circle through `base` (zero-based).
    pub fn coordinate(base: Vec<f64>, i: usize) -> Result<Self> {
        let mut direction = vec![0.0; base.len()];
        *direction
            .get_mut(i)
            .ok_or_else(|| Error::InvalidArgument(format!("coordinate {i} outside the torus")))? = 1.0;
        Self::new(base, direction)
    }

    fn point(&self, u: f64) -> Vec<f64> {
        self.base.iter().zip(&self.direction).map(|(b, d)| b + u * d).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxReport {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
    pub converged: bool,
}

/// Symplectic area of the cylinder `(t, u) -> loop(t)(cycle(u))` for a
/// constant 2-form `omega` (antisymmetric matrix).
pub fn flux(lp: &dyn TorusLoop, cycle: &LinearCycle, omega: &DMatrix<f64>) -> Result<FluxReport> {
    let n = lp.dim();
    if cycle.base.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: cycle.base.len() });
    }
    if omega.nrows() != n || omega.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: omega.nrows() });
    }
    let dir = DVector::from_column_slice(&cycle.direction);
    let integrand = |t: f64, u: f64| {
        let x = cycle.point(u);
        let (lo, hi) = ((t - TIME_STEP).max(0.0), (t + TIME_STEP).min(1.0));
        let a = DVector::from_vec(lp.flow(lo, &x));
        let b = DVector::from_vec(lp.flow(hi, &x));
        let dt = (b - a) / (hi - lo);
        let du = lp.flow_differential(t, &x) * &dir;
        dt.dot(&(omega * du))
    };
    let rule = |panels: usize| {
        let h = 1.0 / panels as f64;
        let mut total = 0.0;
        for i in 0..panels {
            for (xi, wi) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
                let t = h * (i as f64 + 0.5 * (xi + 1.0));
                for j in 0..panels {
                    for (yj, wj) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
                        let u = h * (j as f64 + 0.5 * (yj + 1.0));
                        total += wi * wj * integrand(t, u);
                    }
                }
            }
        }
        total * h * h / 4.0
    };
    let mut panels = START_PANELS;
    let mut coarse = rule(panels);
    loop {
        let fine = rule(2 * panels);
        let error_estimate = (fine - coarse).abs();
        panels *= 2;
        if error_estimate < FLUX_TOLERANCE || panels >= MAX_PANELS {
            return Ok(FluxReport { value: fine, error_estimate, panels, converged: error_estimate < FLUX_TOLERANCE });
        }
        coarse = fine;
    }
}
