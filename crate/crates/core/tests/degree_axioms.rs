use maslov_core::degree::{adaptive_pl_degree, certified_degree, pl_degree, Budget};
use maslov_core::sphere::{
    base_triangulation, AntipodalMap, ComposedWithOrthogonal, IdentityMap, SphereMap, SuspendedPowerMap,
    UnitVector,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_rotation(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols: Vec<f64> = (0..n * n).map(|_| rand::Rng::sample(&mut rng, rand_distr::StandardNormal)).collect();
    let q = DMatrix::from_vec(n, n, cols).qr().q();
    if q.determinant() < 0.0 {
        let mut q = q;
        q.column_mut(0).neg_mut();
        q
    } else {
        q
    }
}

fn signed_permutation(perm: &[usize], signs: &[f64]) -> DMatrix<f64> {
    let n = perm.len();
    let mut p = DMatrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        p[(i, j)] = signs[i];
    }
    p
}

#[test]
fn identity_antipodal_and_covers() {
    let budget = Budget::default();
    for m in 1..=3 {
        let id = certified_degree(&IdentityMap(m), m, &budget, 1).unwrap();
        assert_eq!((id.degree, id.certified), (1, true));
        let a = certified_degree(&AntipodalMap(m), m, &budget, 2).unwrap();
        assert_eq!(a.degree, if m % 2 == 1 { 1 } else { -1 });
        assert!(a.certified);
    }
    for d in -3..=3 {
        let f = SuspendedPowerMap { dim: 1, power: d };
        let r = certified_degree(&f, 1, &budget, 3).unwrap();
        assert_eq!((r.degree, r.certified), (d as i64, true), "d = {d}");
    }
}

#[test]
fn regular_value_choice_does_not_matter() {
    let tri = base_triangulation(2, 5).unwrap();
    let maps: Vec<(Box<dyn SphereMap>, i64)> = vec![
        (Box::new(IdentityMap(2)), 1),
        (Box::new(AntipodalMap(2)), -1),
        (Box::new(SuspendedPowerMap { dim: 2, power: 3 }), 3),
        (Box::new(SuspendedPowerMap { dim: 2, power: -2 }), -2),
    ];
    for (f, expected) in &maps {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut seen = 0;
        while seen < 10 {
            let r = UnitVector::random(3, &mut rng);
            if let Ok(d) = pl_degree(f.as_ref(), &tri, &r) {
                assert_eq!(d, *expected);
                seen += 1;
            }
        }
    }
}

#[test]
fn parallel_and_serial_counts_agree() {
    let f = SuspendedPowerMap { dim: 3, power: 2 };
    let r = UnitVector::new(vec![0.3, -0.5, 0.7, 0.2]).unwrap();
    let par = adaptive_pl_degree(&f, 3, 4, &r, usize::MAX).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let ser = pool.install(|| adaptive_pl_degree(&f, 3, 4, &r, usize::MAX)).unwrap();
    assert_eq!(par, ser);
    let full_par = certified_degree(&f, 3, &Budget::default(), 4).unwrap();
    let full_ser = pool.install(|| certified_degree(&f, 3, &Budget::default(), 4)).unwrap();
    assert_eq!(full_par, full_ser);
    assert_eq!(full_par.integral_estimate.to_bits(), full_ser.integral_estimate.to_bits());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn signed_permutations_multiply_degree(
        perm in Just(vec![0usize, 1, 2]).prop_shuffle(),
        signs in prop::collection::vec(prop::bool::ANY, 3),
        d in -2i32..=2,
        seed in 0u64..1000,
    ) {
        let signs: Vec<f64> = signs.iter().map(|&s| if s { -1.0 } else { 1.0 }).collect();
        let p = signed_permutation(&perm, &signs);
        let det_p = p.determinant().round() as i64;
        let f = ComposedWithOrthogonal { inner: SuspendedPowerMap { dim: 2, power: d }, orthogonal: p };
        let r = certified_degree(&f, 2, &Budget::default(), seed).unwrap();
        prop_assert!(r.certified);
        prop_assert_eq!(r.degree, d as i64 * det_p);
    }

    #[test]
    fn rotations_of_the_domain_preserve_degree(d in -2i32..=2, seed in 0u64..1000) {
        let f = ComposedWithOrthogonal {
            inner: SuspendedPowerMap { dim: 3, power: d },
            orthogonal: random_rotation(4, seed),
        };
        let r = certified_degree(&f, 3, &Budget::default(), seed).unwrap();
        prop_assert!(r.certified);
        prop_assert_eq!(r.degree, d as i64);
    }
}
