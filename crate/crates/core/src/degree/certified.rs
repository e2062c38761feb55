use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::integral::{degree_estimate_integral, integral_triangulation};
use super::pl::adaptive_pl_degree;
use super::{Budget, DegreeResult, INTEGRAL_AGREEMENT, MAX_RETRIES_PER_LEVEL};
use crate::error::{Error, Result};
use crate::sphere::{check_sphere_dim, SphereMap, UnitVector};

/// Smallest level at which `lipschitz` times the mesh is at most 1/2.
pub fn lipschitz_level(lipschitz: f64) -> u32 {
    let ratio = lipschitz * FRAC_PI_2 / 0.5;
    if ratio <= 1.0 {
        0
    } else {
        ratio.log2().ceil().min(60.0) as u32
    }
}

/// Degree of `f: S^m -> S^m`, certified by agreement of two consecutive
/// refinement levels plus the quadrature cross-check.
///
/// A result that could not be certified within `budget` is still returned,
/// with `certified = false`. Deterministic in `(f, budget, seed)`.
pub fn certified_degree(f: &dyn SphereMap, m: usize, budget: &Budget, seed: u64) -> Result<DegreeResult> {
    check_sphere_dim(m)?;
    if f.domain_dim() != m || f.codomain_dim() != m {
        return Err(Error::DimensionMismatch { expected: m, found: f.domain_dim().max(f.codomain_dim()) });
    }
    let wanted = f.lipschitz().map(lipschitz_level).unwrap_or(0).max(2);
    let reachable = wanted <= budget.max_level;
    let start = wanted.min(budget.max_level);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut retries = 0u32;
    let mut previous: Option<i64> = None;
    let mut best: Option<(i64, u32, UnitVector)> = None;
    let mut last_err = None;

    for level in start..=budget.max_level {
        let mut found = None;
        let mut budget_hit = false;
        for _ in 0..MAX_RETRIES_PER_LEVEL {
            let r = UnitVector::random(m + 1, &mut rng);
            match adaptive_pl_degree(f, m, level, &r, budget.max_simplices) {
                Ok(out) => {
                    found = Some((out.degree, r));
                    break;
                }
                Err(Error::NonRegularValue) => retries += 1,
                Err(e @ Error::InsufficientRefinement { .. }) => {
                    last_err = Some(e);
                    break;
                }
                Err(e @ Error::BudgetExhausted { .. }) => {
                    last_err = Some(e);
                    budget_hit = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        match found {
            Some((d, r)) => {
                if reachable && previous == Some(d) {
                    let tri = integral_triangulation(m, level, budget.integral_simplices)?;
                    let integral = degree_estimate_integral(f, &tri)?;
                    if (integral - d as f64).abs() < INTEGRAL_AGREEMENT {
                        return Ok(DegreeResult {
                            degree: d,
                            level_used: level,
                            regular_value: r,
                            retries,
                            integral_estimate: integral,
                            integral_level: tri.level(),
                            certified: true,
                        });
                    }
                }
                previous = Some(d);
                best = Some((d, level, r));
            }
            None => previous = None,
        }
        if budget_hit {
            break;
        }
    }

    let Some((degree, level_used, regular_value)) = best else {
        return Err(last_err.unwrap_or(Error::NonRegularValue));
    };
    let tri = integral_triangulation(m, level_used, budget.integral_simplices)?;
    let integral = degree_estimate_integral(f, &tri)?;
    Ok(DegreeResult {
        degree,
        level_used,
        regular_value,
        retries,
        integral_estimate: integral,
        integral_level: tri.level(),
        certified: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{FnMap, IdentityMap, SuspendedPowerMap};

    #[test]
    fn identity_on_s3_is_certified() {
        let r = certified_degree(&IdentityMap(3), 3, &Budget::default(), 1).unwrap();
        assert_eq!(r.degree, 1);
        assert!(r.certified);
        assert!((r.integral_estimate - 1.0).abs() < INTEGRAL_AGREEMENT);
    }

    #[test]
    fn certified_results_satisfy_the_invariant() {
        for d in -3..=3 {
            let f = SuspendedPowerMap { dim: 2, power: d };
            let r = certified_degree(&f, 2, &Budget::default(), 9).unwrap();
            assert_eq!(r.degree, d as i64);
            assert!(r.certified);
            assert!((r.integral_estimate - r.degree as f64).abs() < INTEGRAL_AGREEMENT);
        }
    }

    #[test]
    fn steep_map_with_small_budget_is_uncertified() {
        let f = FnMap::new(1, 1, |x| SuspendedPowerMap { dim: 1, power: 2 }.eval(x)).with_lipschitz(1e4);
        let budget = Budget { max_level: 4, ..Budget::default() };
        let r = certified_degree(&f, 1, &budget, 3).unwrap();
        assert!(!r.certified);
        assert_eq!(r.level_used, 4);
    }

    #[test]
    fn same_seed_same_result() {
        let f = SuspendedPowerMap { dim: 3, power: -2 };
        let a = certified_degree(&f, 3, &Budget::default(), 5).unwrap();
        let b = certified_degree(&f, 3, &Budget::default(), 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lipschitz_levels() {
        assert_eq!(lipschitz_level(1.0), 2);
        assert_eq!(lipschitz_level(3.0), 4);
        assert_eq!(lipschitz_level(0.0), 0);
    }
}
