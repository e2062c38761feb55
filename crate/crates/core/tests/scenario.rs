use maslov_core::pipelines::{FramePolicy, LinearCycle, ModelKind};
use maslov_core::scenario::*;
use maslov_core::{Budget, Error};
use proptest::prelude::*;

fn model() -> impl Strategy<Value = Option<ModelKind>> {
    prop_oneof![
        Just(None),
        (1usize..5).prop_map(|n| Some(ModelKind::LinearContactSphere { n })),
        (1usize..4).prop_map(|d| Some(ModelKind::Torus { dim: 2 * d })),
        Just(Some(ModelKind::Cp1)),
        Just(Some(ModelKind::S1xS2)),
    ]
}

fn family() -> impl Strategy<Value = Option<FamilySpec>> {
    prop_oneof![
        Just(None),
        Just(Some(FamilySpec::Su2Generator)),
        Just(Some(FamilySpec::DeltaRotations)),
        Just(Some(FamilySpec::LinearContactSphereS)),
        prop::collection::vec(-5i32..5, 1..4).prop_map(|windings| Some(FamilySpec::DiagonalLoop { windings })),
        (prop::array::uniform3(-1.0f64..1.0), -3i32..3)
            .prop_map(|(axis, turns)| Some(FamilySpec::Cp1Rotation { axis, turns })),
        (-1.0f64..1.0).prop_map(|amplitude| Some(FamilySpec::TorusShear { amplitude })),
    ]
}

fn request() -> impl Strategy<Value = Request> {
    prop_oneof![
        (1usize..4, prop::option::of(1usize..3)).prop_map(|(k, d)| Request::IndexA {
            k,
            policy: d.map(|direction| FramePolicy::Twisted { direction }),
            basepoint: None
        }),
        (1usize..4, prop::option::of(prop::collection::vec(-1.0f64..1.0, 3)))
            .prop_map(|(k, basepoint)| Request::IndexB { k, basepoint }),
        prop::option::of(any::<u64>()).prop_map(|datum_seed| Request::Epsilon { datum: None, datum_seed }),
        (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| Request::Flux {
            cycle: LinearCycle::new(vec![a, b], vec![0.0, 1.0]).unwrap(),
            omega: None
        }),
        (1usize..4).prop_map(|column| Request::Degree { column }),
        (1usize..20, 1usize..20).prop_map(|(k, dim)| Request::Tables { k, dim }),
    ]
}

proptest! {
    #[test]
    fn scenarios_round_trip(
        model in model(),
        family in family(),
        request in request(),
        seed in any::<u64>(),
        max_level in 1u32..12,
        name in prop::option::of("[a-z ]{0,12}"),
    ) {
        let s = Scenario { name, model, family, request, budget: Budget { max_level, ..Budget::default() }, seed };
        let text = s.to_text();
        let back = Scenario::parse(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_text(), text);
    }
}

#[test]
fn generator_example() {
    let r = run_scenario(
        r#"{"model": {"kind": "linear_contact_sphere", "n": 2},
            "family": {"name": "su2_generator"},
            "request": {"kind": "index_A", "k": 2}}"#,
    )
    .unwrap();
    assert_eq!((r.status, &r.result), (Status::Certified, &Some(ResultValue::Integer { value: 1 })));
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn linear_contact_sphere_example() {
    let r = run_scenario(
        r#"{"model": {"kind": "s1xs2"}, "family": {"name": "linear_contact_sphere_S"}, "request": {"kind": "epsilon"}}"#,
    )
    .unwrap();
    assert_eq!(r.result, Some(ResultValue::Integer { value: 1 }));
}

#[test]
fn bogus_family_example() {
    let e = run_scenario(r#"{"family": {"name": "bogus"}, "request": {"kind": "degree"}}"#).unwrap_err();
    assert!(e.to_string().contains("unknown family"));
    assert!(matches!(e, Error::UnknownFamily(_)));
}

#[test]
fn reruns_reproduce_the_result() {
    let text = r#"{"model": {"kind": "cp1"}, "family": {"name": "cp1_rotation", "axis": [0.0, 0.6, 0.8]},
                   "request": {"kind": "index_B", "k": 1, "basepoint": [1.0, 0.0, 0.0]}, "seed": 4}"#;
    let a = run_scenario(text).unwrap();
    let b = run_scenario(text).unwrap();
    assert_eq!((a.result.clone(), a.certificates.clone()), (b.result, b.certificates));
    assert_eq!(a.result, Some(ResultValue::Residue { value: 1, modulus: 2 }));
}

#[test]
fn mismatched_requests_are_errors() {
    for text in [
        r#"{"model": {"kind": "cp1"}, "family": {"name": "su2_generator"}, "request": {"kind": "index_A", "k": 1}}"#,
        r#"{"model": {"kind": "s1xs2"}, "family": {"name": "su2_generator"}, "request": {"kind": "epsilon"}}"#,
        r#"{"family": {"name": "su2_generator"}, "request": {"kind": "index_A", "k": 2}}"#,
        r#"{"model": {"kind": "torus", "dim": 2}, "family": {"name": "delta_rotations"},
            "request": {"kind": "flux", "cycle": {"base": [0, 0], "direction": [0, 1]}}}"#,
    ] {
        let r = run_scenario(text).unwrap();
        assert_eq!((r.status, r.exit_code()), (Status::Error, 1), "{text}");
        assert!(r.error.is_some());
    }
}

#[test]
fn catalog_names_are_parseable() {
    for entry in list_builtins() {
        assert!(is_builtin(entry.name));
        assert!(!entry.statement.is_empty());
    }
}
