use std::f64::consts::PI;
use std::sync::Arc;

use maslov_core::degree::Budget;
use maslov_core::sphere::{SphereMap, UnitVector};
use maslov_core::unitary::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal))
    });
    let svd = m.svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

// Winding of det F around the circle, by summing principal angle increments.
fn determinant_winding(f: &dyn UnitaryFamily, samples: usize) -> i64 {
    let det = |t: f64| f.eval(&UnitVector::new(vec![t.cos(), t.sin()]).unwrap()).unwrap().determinant();
    let mut total = 0.0;
    let mut prev = det(0.0);
    for i in 1..=samples {
        let cur = det(2.0 * PI * i as f64 / samples as f64);
        total += (cur / prev).arg();
        prev = cur;
    }
    (total / (2.0 * PI)).round() as i64
}

fn mu(f: FamilyRef, k: usize) -> i64 {
    let r = mu_k_unitary(f, k, 1, &Budget::default(), 7).unwrap();
    assert!(r.degree.certified);
    r.value
}

fn diag(windings: &[i32]) -> FamilyRef {
    Arc::new(DiagonalLoop { windings: windings.to_vec() })
}

fn reflection(n: usize) -> DMatrix<f64> {
    let mut r = DMatrix::identity(n, n);
    r[(0, 0)] = -1.0;
    r
}

#[test]
fn column_map_examples() {
    let id: FamilyRef = Arc::new(ConstantFamily::identity(1, 2));
    let c = column_map(id, 1).unwrap();
    let x = UnitVector::new(vec![0.6, 0.8]).unwrap();
    assert_eq!(c.eval(&x).unwrap(), UnitVector::basis(4, 0));

    let circle = column_map(diag(&[1, 0]), 1).unwrap();
    let t: f64 = 0.7;
    let y = circle.eval(&UnitVector::new(vec![t.cos(), t.sin()]).unwrap()).unwrap();
    let expect = [t.cos(), t.sin(), 0.0, 0.0];
    assert!(y.coords().iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-15));

    let su2 = column_map(Arc::new(Su2Generator), 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let x = UnitVector::random(4, &mut rng);
        assert!(su2.eval(&x).unwrap().angle(&x) < 1e-14);
    }
}

#[test]
fn winding_oracle_on_loops() {
    assert_eq!(determinant_winding(diag(&[1, 0, 0]).as_ref(), 10_000), 1);
    assert_eq!(mu(diag(&[1, 0, 0]), 1), 1);
    let product: FamilyRef = Arc::new(ProductFamily::new(diag(&[1, 0, 0]), diag(&[0, 2, 0])).unwrap());
    assert_eq!(determinant_winding(product.as_ref(), 10_000), 3);
    assert_eq!(mu(product, 1), 3);
}

#[test]
fn randomized_loops_match_the_winding_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..20 {
        let n = rng.random_range(1..=3);
        let mut f: FamilyRef = Arc::new(ConstantFamily::identity(1, n));
        for _ in 0..rng.random_range(1..=3) {
            let w: Vec<i32> = (0..n).map(|_| rng.random_range(-2..=2)).collect();
            let c = random_unitary(n, &mut rng);
            let g: FamilyRef = Arc::new(ConjugatedFamily::new(diag(&w), c).unwrap());
            f = Arc::new(ProductFamily::new(f, g).unwrap());
        }
        let oracle = determinant_winding(f.as_ref(), 10_000);
        let r = mu_k_unitary(f, 1, 1, &Budget::default(), case).unwrap();
        assert_eq!(r.value, oracle, "case {case}");
    }
}

#[test]
fn generator_in_u2_and_u3() {
    assert_eq!(mu(Arc::new(Su2Generator), 2), 1);
    let embedded: FamilyRef = Arc::new(StabilizedFamily::new(Arc::new(Su2Generator), 1));
    assert_eq!(mu(embedded.clone(), 2), 1);
    // the reduced family carries the same index
    let (reduced, _) = reduce_once(embedded, 2, &Budget::default(), 3).unwrap();
    assert_eq!(mu(reduced, 2), 1);
}

#[test]
fn constant_families_have_index_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (k, n) in [(1, 1), (1, 3), (2, 2), (2, 3)] {
        let c: FamilyRef = Arc::new(ConstantFamily::new(2 * k - 1, random_unitary(n, &mut rng)).unwrap());
        assert_eq!(mu(c, k), 0, "k = {k}, n = {n}");
    }
}

#[test]
fn products_add() {
    let su2: FamilyRef = Arc::new(Su2Generator);
    let square: FamilyRef = Arc::new(ProductFamily::new(su2.clone(), su2.clone()).unwrap());
    assert_eq!(mu(square.clone(), 2), 2);
    let inverse: FamilyRef = Arc::new(ReparametrizedFamily::new(su2.clone(), reflection(4)).unwrap());
    let cancel: FamilyRef = Arc::new(ProductFamily::new(su2.clone(), inverse).unwrap());
    assert_eq!(mu(cancel, 2), 0);
    let s3 = |f: FamilyRef| -> FamilyRef { Arc::new(StabilizedFamily::new(f, 1)) };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mixed: FamilyRef = Arc::new(
        ProductFamily::new(
            s3(su2.clone()),
            Arc::new(ConjugatedFamily::new(s3(su2), random_unitary(3, &mut rng)).unwrap()),
        )
        .unwrap(),
    );
    assert_eq!(mu(mixed, 2), 2);
    for (a, b) in [(vec![1, 0], vec![0, 1]), (vec![2, -1, 0], vec![0, 0, 1])] {
        let p: FamilyRef = Arc::new(ProductFamily::new(diag(&a), diag(&b)).unwrap());
        let sum = a.iter().chain(&b).sum::<i32>() as i64;
        assert_eq!(mu(p, 1), sum);
    }
}

#[test]
fn conjugation_stabilization_and_columns() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let su2: FamilyRef = Arc::new(Su2Generator);
    let conj: FamilyRef = Arc::new(ConjugatedFamily::new(su2.clone(), random_unitary(2, &mut rng)).unwrap());
    assert_eq!(mu(conj, 2), 1);
    let stab: FamilyRef = Arc::new(StabilizedFamily::new(diag(&[2, -1]), 1));
    assert_eq!(mu(stab, 1), 1);
    for j in 1..=2 {
        let r = mu_k_unitary(su2.clone(), 2, j, &Budget::default(), 8).unwrap();
        assert_eq!(r.value, 1, "column {j}");
    }
    let loop3 = diag(&[1, -2, 3]);
    for j in 1..=3 {
        let r = mu_k_unitary(loop3.clone(), 1, j, &Budget::default(), 9).unwrap();
        assert_eq!(r.value, 2, "column {j}");
    }
}

#[test]
fn reflections_negate_and_rotations_preserve() {
    let su2: FamilyRef = Arc::new(Su2Generator);
    let refl: FamilyRef = Arc::new(ReparametrizedFamily::new(su2.clone(), reflection(4)).unwrap());
    assert_eq!(mu(refl, 2), -1);
    let loop1 = diag(&[1, 0]);
    let refl1: FamilyRef = Arc::new(ReparametrizedFamily::new(loop1, reflection(2)).unwrap());
    assert_eq!(mu(refl1, 1), -1);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let q = {
        let m = DMatrix::from_fn(4, 4, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let mut q = m.qr().q();
        if q.determinant() < 0.0 {
            q.column_mut(0).neg_mut();
        }
        q
    };
    let rot: FamilyRef = Arc::new(ReparametrizedFamily::new(su2, q).unwrap());
    assert_eq!(mu(rot, 2), 1);
}

#[test]
fn sampled_generator_keeps_its_index() {
    let s: FamilyRef = Arc::new(SampledFamily::from_family(&Su2Generator, 2).unwrap());
    assert_eq!(mu(s, 2), 1);
}

#[test]
fn clifford_column_degree_is_even() {
    let r = mu_k_unitary(Arc::new(CliffordGenerator), 3, 1, &Budget::default(), 10).unwrap();
    assert_eq!(r.degree.degree % 2, 0);
    assert_eq!(r.degree.degree.abs(), 2);
    assert_eq!(r.value, 1);
    assert_eq!(r.trace.stages.len(), 1);
}
