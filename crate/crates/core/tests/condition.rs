mod support;

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use proptest::prelude::*;
use qss_core::condition::{
    enumerate_schemes, eq1_check, homomorphic_dichotomy_check, homomorphic_scheme, lift_and_test,
    scheme_from_msp, ClassicalScheme, ConditionError, HomomorphicSpec, Prob, SearchBounds,
    SearchFamily, SqrtSum,
};
use qss_core::msp::Msp;
use qss_core::quantum::TestFamily;
use qss_core::rng;
use qss_core::structures::{AdversaryStructure, PlayerSet};

use support::*;

fn data_file(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn two_by_two(
    rows: &[(usize, [u16; 2], (i64, i64))],
    secrets: usize,
    spaces: [usize; 2],
) -> ClassicalScheme {
    let mut table = vec![BTreeMap::new(); secrets];
    for &(s, y, (n, d)) in rows {
        table[s].insert(y.to_vec(), Prob::new(n, d));
    }
    ClassicalScheme::new(spaces.to_vec(), table).unwrap()
}

#[test]
fn committed_shamir_table_matches_the_program() {
    let committed = ClassicalScheme::parse(&data_file("shamir.scheme")).unwrap();
    let derived = scheme_from_msp(&Msp::shamir(3, 1, gf(5)).unwrap()).unwrap();
    assert_eq!(committed.to_text(), derived.to_text());
    assert_eq!(
        committed.structure(),
        &AdversaryStructure::threshold(3, 1).unwrap()
    );
}

#[test]
fn derived_structure_follows_secrecy() {
    let sch = scheme_from_msp(&nonsd_msp()).unwrap();
    assert_eq!(sch.structure(), &nonsd_msp().structure());
    for b in PlayerSet::all_subsets(3) {
        assert_eq!(sch.check_secrecy(b), sch.structure().is_member(b), "{b}");
        assert_eq!(
            sch.check_correctness(b),
            !sch.structure().is_member(b),
            "{b}"
        );
    }
}

#[test]
fn linear_schemes_satisfy_the_condition() {
    for msp in [
        Msp::shamir(3, 1, gf(5)).unwrap(),
        Msp::shamir(5, 2, gf(7)).unwrap(),
    ] {
        let sch = scheme_from_msp(&msp).unwrap();
        for u in sch.structure().members() {
            let report = eq1_check(&sch, u).unwrap();
            assert!(report.holds && report.exact, "{u}");
            assert!(homomorphic_dichotomy_check(&sch, u));
        }
    }
}

#[test]
fn committed_counterexample_fails_both_ways() {
    let sch = ClassicalScheme::parse(&data_file("counterexample.scheme")).unwrap();
    let u = set(&[1]);
    let eq1 = eq1_check(&sch, u).unwrap();
    assert!(!eq1.holds);
    let v = eq1.violation.unwrap();
    assert_eq!(v.values, ["0", "1/2"]);
    let lift = lift_and_test(&sch, u, &TestFamily::<f64>::standard(2, 1)).unwrap();
    assert!(!lift.holds);
    assert!((lift.max_distance - 0.5).abs() < 1e-12);
    // not homomorphic: the dichotomy holds here although the condition fails
    assert!(homomorphic_dichotomy_check(&sch, u));
}

#[test]
fn precondition_errors() {
    // the one-time pad over Z2: both singletons are secret, neither alone is correct
    let pad = two_by_two(
        &[
            (0, [0, 0], (1, 2)),
            (0, [1, 1], (1, 2)),
            (1, [0, 1], (1, 2)),
            (1, [1, 0], (1, 2)),
        ],
        2,
        [2, 2],
    );
    assert_eq!(
        eq1_check(&pad, set(&[1])).err(),
        Some(ConditionError::NotCorrect(set(&[2])))
    );
    assert!(eq1_check(&pad, PlayerSet::EMPTY).unwrap().holds);
    assert_eq!(
        eq1_check(&pad, set(&[1, 2])).err(),
        Some(ConditionError::NotSecret(set(&[1, 2])))
    );
    assert!(matches!(
        eq1_check(&pad, set(&[3])),
        Err(ConditionError::PlayerOutOfRange { .. })
    ));

    // share 1 carries the secret
    let clear = two_by_two(&[(0, [0, 0], (1, 1)), (1, [1, 0], (1, 1))], 2, [2, 1]);
    assert_eq!(
        eq1_check(&clear, set(&[1])).err(),
        Some(ConditionError::NotSecret(set(&[1])))
    );

    let sch = scheme_from_msp(&nonsd_msp()).unwrap();
    assert_eq!(
        eq1_check(&sch, set(&[1, 2])).err(),
        Some(ConditionError::NotCorrect(set(&[3])))
    );
    let strict = sch
        .with_structure(AdversaryStructure::new(3, &[set(&[1])]).unwrap())
        .unwrap();
    assert_eq!(
        eq1_check(&strict, set(&[2])).err(),
        Some(ConditionError::NotCorrectable(set(&[2])))
    );
}

#[test]
fn malformed_tables_are_rejected() {
    let head = "scheme n=2 secrets=2\nspace 1 2\nspace 2 2\n";
    let bad = [
        "p 0 0 0 1/2\np 1 0 0 1\n",
        "p 0 0 0 3/2\np 0 1 1 -1/2\np 1 0 0 1\n",
        "p 0 0 2 1\np 1 0 0 1\n",
        "p 0 0 0 1\n",
        "p 2 0 0 1\np 0 0 0 1\np 1 0 0 1\n",
        "p 0 0 0 1\np 0 0 0 1\np 1 0 0 1\n",
    ];
    for body in bad {
        assert!(
            ClassicalScheme::parse(&format!("{head}{body}")).is_err(),
            "{body}"
        );
    }
    assert!(ClassicalScheme::parse("space 1 2\n").is_err());
    assert!(ClassicalScheme::parse(&format!("{head}p 0 0 0 1\np 1 1 1 1\n")).is_ok());
}

#[test]
fn canonical_square_root_sums() {
    let mut s = SqrtSum::zero();
    assert!(s.is_zero());
    s.add_sqrt_product(Prob::new(1, 2), Prob::new(1, 8));
    assert_eq!(s.to_string(), "1/4");
    s.add_sqrt_product(Prob::new(1, 3), Prob::new(1, 1));
    assert!((s.to_f64() - (0.25 + (1.0f64 / 3.0).sqrt())).abs() < 1e-12);
    let mut t = SqrtSum::zero();
    t.add_sqrt_product(Prob::new(1, 12), Prob::new(1, 1));
    t.add_sqrt_product(Prob::new(1, 4), Prob::new(1, 4));
    // sqrt(1/12) + 1/4 = 1/4 + (1/6) sqrt(3), and sqrt(1/3) = (1/3) sqrt(3)
    assert_eq!(t.to_string(), "1/4 + 1/6*sqrt(3)");
}

#[test]
fn homomorphic_fixtures_pass_and_non_injective_maps_fail() {
    let full_only = |n: usize| {
        let sets: Vec<PlayerSet> = (1..=n)
            .map(|i| PlayerSet::singleton(i).complement(n))
            .collect();
        AdversaryStructure::new(n, &sets).unwrap()
    };
    let specs = [
        (
            HomomorphicSpec::new(vec![2], 1, vec![vec![0, 1], vec![1, 1]]).unwrap(),
            full_only(2),
        ),
        (
            HomomorphicSpec::new(
                vec![3],
                2,
                vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 2, 2]],
            )
            .unwrap(),
            full_only(3),
        ),
        (
            HomomorphicSpec::new(vec![5], 1, vec![vec![1, 1], vec![1, 2], vec![1, 3]]).unwrap(),
            AdversaryStructure::threshold(3, 1).unwrap(),
        ),
        (
            HomomorphicSpec::new(vec![2, 2], 1, vec![vec![0, 1], vec![1, 1]]).unwrap(),
            full_only(2),
        ),
    ];
    for (spec, a) in specs {
        assert!(spec.is_injective().unwrap());
        let sch = homomorphic_scheme(&spec, a).unwrap();
        let dual = sch.structure().dual();
        for u in sch
            .structure()
            .members()
            .into_iter()
            .filter(|&u| dual.is_member(u))
        {
            assert!(eq1_check(&sch, u).unwrap().holds);
            assert!(homomorphic_dichotomy_check(&sch, u));
        }
    }
    let collapsing = HomomorphicSpec::new(vec![3], 1, vec![vec![1, 1], vec![1, 1]]).unwrap();
    assert!(!collapsing.is_injective().unwrap());
    assert_eq!(
        homomorphic_scheme(&collapsing, full_only(2)).err(),
        Some(ConditionError::NotInjective)
    );
    assert_eq!(
        HomomorphicSpec::new(vec![1], 1, vec![vec![1, 1]]).err(),
        Some(ConditionError::Group)
    );
}

#[test]
fn function_of_share_two_tables_never_violate() {
    let bounds = SearchBounds {
        max_secrets: 2,
        max_share_size: 3,
        max_denominator: 6,
    };
    let mut seen = 0;
    enumerate_schemes(bounds, SearchFamily::FunctionOfQ, |sch| {
        assert!(
            eq1_check(&sch, set(&[1])).unwrap().holds,
            "{}",
            sch.to_text()
        );
        seen += 1;
        ControlFlow::Continue(())
    });
    assert!(seen > 0);
}

#[test]
fn enumeration_is_deterministic_and_valid() {
    let bounds = SearchBounds {
        max_secrets: 2,
        max_share_size: 2,
        max_denominator: 4,
    };
    let collect = || {
        let mut out = Vec::new();
        enumerate_schemes(bounds, SearchFamily::General, |sch| {
            out.push(sch.to_text());
            ControlFlow::Continue(())
        });
        out
    };
    let first = collect();
    assert_eq!(first, collect());
    for text in &first {
        let sch = ClassicalScheme::parse(text).unwrap();
        assert!(sch.check_secrecy(set(&[1])) && sch.check_correctness(set(&[2])));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn condition_agrees_with_the_oracle(seed in any::<u64>()) {
        let mut rng = rng::seeded(seed);
        let sch = random_two_player_scheme(&mut rng, 3);
        let u = set(&[1]);
        let eq1 = eq1_check(&sch, u).unwrap();
        let lift = lift_and_test(&sch, u, &TestFamily::<f64>::standard(sch.secrets(), seed)).unwrap();
        prop_assert_eq!(eq1.holds, lift.holds, "{}", sch.to_text());
    }

    #[test]
    fn tables_round_trip(seed in any::<u64>()) {
        let mut rng = rng::seeded(seed);
        let sch = random_two_player_scheme(&mut rng, 3);
        let back = ClassicalScheme::parse(&sch.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), sch.to_text());
        prop_assert_eq!(back.structure(), sch.structure());
    }
}
