mod support;

use std::collections::BTreeMap;

use num_complex::Complex;
use proptest::prelude::*;
use qss_core::classical::build_reconstruction_plan;
use qss_core::msp::Msp;
use qss_core::quantum::{
    apply_plan, fidelity, hermitian_eigenvalues, partial_trace, qencode, qss_mixed, qss_pure,
    trace_distance, trace_distance_bound, verify_erasure, CheckKind, DensityMatrix, QuantumError,
    QuantumState, TestFamily, Verdict,
};
use qss_core::structures::PlayerSet;

use support::*;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn amplitudes(dim: usize) -> impl Strategy<Value = Vec<Complex<f64>>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("nonzero", |v| {
            v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
        })
        .prop_map(|v| {
            let norm = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            v.into_iter().map(|(a, b)| c(a / norm, b / norm)).collect()
        })
}

#[test]
fn encoded_basis_state_is_uniform_over_the_code_word_coset() {
    let msp = Msp::shamir(3, 1, gf(5)).unwrap();
    for s in 0..5u16 {
        let enc = qencode(&msp, &QuantumState::<f64>::basis(5, s).unwrap()).unwrap();
        let amps = enc.state().amplitudes();
        assert_eq!(amps.len(), 5);
        for (label, a) in amps {
            assert!((a.re - 1.0 / 5f64.sqrt()).abs() < 1e-12 && a.im.abs() < 1e-12);
            // label is M·(s, a) for some a
            let r = (i64::from(label[0]) - i64::from(s)).rem_euclid(5);
            let want: Vec<u16> = (1..=3)
                .map(|x| ((i64::from(s) + r * x) % 5) as u16)
                .collect();
            assert_eq!(label, &want);
        }
    }
}

#[test]
fn single_shares_of_a_threshold_code_are_maximally_mixed() {
    let msp = Msp::shamir(3, 1, gf(5)).unwrap();
    let family = TestFamily::<f64>::standard(5, 3);
    for (name, input) in family.members() {
        let enc = qencode(&msp, input).unwrap();
        for coord in 0..3 {
            let rho = partial_trace(enc.state(), &[coord]).unwrap();
            for i in 0..5u16 {
                for j in 0..5u16 {
                    let want = if i == j { 0.2 } else { 0.0 };
                    let z = rho.entry(&[i], &[j]);
                    assert!((z.re - want).abs() < 1e-12 && z.im.abs() < 1e-12, "{name}");
                }
            }
        }
    }
}

#[test]
fn trace_distance_of_known_pairs() {
    let zero = QuantumState::<f64>::basis(2, 0).unwrap();
    let one = QuantumState::<f64>::basis(2, 1).unwrap();
    let plus =
        QuantumState::from_amplitudes(&[c(0.5f64.sqrt(), 0.0), c(0.5f64.sqrt(), 0.0)]).unwrap();
    let p = |s: &QuantumState<f64>| DensityMatrix::projector(s);
    assert!((trace_distance(&p(&zero), &p(&one)).unwrap() - 1.0).abs() < 1e-12);
    assert!(trace_distance(&p(&zero), &p(&zero)).unwrap().abs() < 1e-12);
    // pure states: sqrt(1 - |<a|b>|^2)
    assert!((trace_distance(&p(&zero), &p(&plus)).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    assert!(trace_distance_bound(&p(&zero), &p(&plus)).unwrap() >= 0.5f64.sqrt() - 1e-12);
}

#[test]
fn pure_scheme_rejections() {
    assert_eq!(
        qss_pure(&nonsd_msp()).err(),
        Some(QuantumError::NotSelfDual)
    );
    let wide = Msp::shamir(4, 1, gf(5)).unwrap();
    assert_eq!(qss_pure(&wide).err(), Some(QuantumError::NotQ2Star));
    assert_eq!(qss_mixed(&wide).err(), Some(QuantumError::NotQ2Star));
}

#[test]
fn erasures_outside_the_correctable_family_are_not_applicable() {
    let msp = nonsd_msp();
    let family = TestFamily::<f64>::standard(5, 1);
    let report = verify_erasure(&msp, set(&[1, 2]), &family).unwrap();
    assert_eq!(report.verdict(), Verdict::NotApplicable);
    assert!(report
        .to_machine()
        .contains("check=overall result=not-applicable"));
    let report = verify_erasure(&msp, set(&[1]), &family).unwrap();
    assert_eq!(report.verdict(), Verdict::Pass);
}

#[test]
fn plan_from_another_program_is_refused() {
    let msp = Msp::shamir(3, 1, gf(5)).unwrap();
    let other = Msp::shamir(5, 2, gf(7)).unwrap();
    let plan = build_reconstruction_plan(&other, set(&[1])).unwrap();
    let enc = qencode(&msp, &QuantumState::<f64>::basis(5, 1).unwrap()).unwrap();
    assert_eq!(
        apply_plan(&enc, &plan).err(),
        Some(QuantumError::PlanMismatch)
    );
}

#[test]
fn input_dimension_must_match_the_field() {
    let msp = Msp::shamir(3, 1, gf(5)).unwrap();
    let input = QuantumState::<f64>::basis(3, 0).unwrap();
    assert!(qencode(&msp, &input).is_err());
    let family = TestFamily::<f64>::standard(7, 1);
    assert!(qss_pure(&msp).unwrap().verify_all(&family).is_err());
}

#[test]
fn states_are_validated() {
    let bad = BTreeMap::from([(vec![0u16], c(0.5, 0.0))]);
    assert!(matches!(
        QuantumState::new(vec![2], bad),
        Err(QuantumError::Normalization { .. })
    ));
    let out = BTreeMap::from([(vec![2u16], c(1.0, 0.0))]);
    assert_eq!(
        QuantumState::new(vec![2], out).err(),
        Some(QuantumError::LabelOutOfRange)
    );
}

#[test]
fn single_precision_meets_its_tolerance() {
    let msp = Msp::shamir(3, 1, gf(5)).unwrap();
    let report = qss_pure(&msp)
        .unwrap()
        .verify_all(&TestFamily::<f32>::standard(5, 2))
        .unwrap();
    assert!(report.passed(), "{}", report.to_text());
}

#[test]
fn mixed_scheme_hides_tau_and_recovers() {
    let scheme = qss_mixed(&nonsd_msp()).unwrap();
    assert_eq!(scheme.extended().players(), 4);
    let input = QuantumState::from_amplitudes(&[
        c(0.6, 0.0),
        c(0.0, 0.8),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
    ])
    .unwrap();
    let enc = scheme.encode(&input).unwrap();
    for q in [set(&[1, 3]), set(&[2, 3]), set(&[1, 2, 3])] {
        let rho = scheme.recover(&enc, q).unwrap();
        assert!((fidelity(&rho, &input).unwrap() - 1.0).abs() < 1e-9);
    }
    assert!(scheme.recover(&enc, set(&[1, 2])).is_err());
    // τ is dropped from any requested set
    let with_tau = scheme.shares_of(&enc, set(&[1, 4])).unwrap();
    let without = scheme.shares_of(&enc, set(&[1])).unwrap();
    assert!(trace_distance(&with_tau, &without).unwrap() < 1e-12);
}

#[test]
fn reports_cover_every_member() {
    let msp = Msp::shamir(5, 2, gf(7)).unwrap();
    let report = qss_pure(&msp)
        .unwrap()
        .verify_all(&TestFamily::<f64>::standard(7, 4))
        .unwrap();
    let secrecy: Vec<PlayerSet> = report
        .records_of(CheckKind::Secrecy)
        .map(|r| r.set)
        .collect();
    assert_eq!(secrecy.len(), 16);
    let machine = report.to_machine();
    assert!(machine.starts_with("check=family seed=4 inputs=28\n"));
    assert!(machine.ends_with("check=overall result=pass\n"));
    assert_eq!(machine.lines().count(), 2 + 3 * 16);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encoding_preserves_norm_and_recovery(amps in amplitudes(5)) {
        let input = QuantumState::from_amplitudes(&amps).unwrap();
        let scheme = qss_pure(&Msp::shamir(3, 1, gf(5)).unwrap()).unwrap();
        let enc = scheme.encode(&input).unwrap();
        prop_assert!((enc.state().norm_sqr() - 1.0).abs() < 1e-12);
        for b in scheme.structure().members() {
            let rho = scheme.recover(&enc, b).unwrap();
            prop_assert!((fidelity(&rho, &input).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn partial_traces_are_density_matrices(amps in amplitudes(5), keep in 0usize..3) {
        let input = QuantumState::from_amplitudes(&amps).unwrap();
        let enc = qencode(&nonsd_msp(), &input).unwrap();
        let rho = partial_trace(enc.state(), &[keep, 3]).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.is_valid_state(1e-9));
    }

    #[test]
    fn two_by_two_spectrum(a in -2.0f64..2.0, d in -2.0f64..2.0, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let h = [c(a, 0.0), c(re, im), c(re, -im), c(d, 0.0)];
        let mut got = hermitian_eigenvalues(&h, 2);
        got.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mid = (a + d) / 2.0;
        let r = (((a - d) / 2.0).powi(2) + re * re + im * im).sqrt();
        prop_assert!((got[0] - (mid - r)).abs() < 1e-9);
        prop_assert!((got[1] - (mid + r)).abs() < 1e-9);
    }

    #[test]
    fn trace_distance_is_a_metric(x in amplitudes(3), y in amplitudes(3), z in amplitudes(3)) {
        let p = |v: &[Complex<f64>]| DensityMatrix::projector(&QuantumState::from_amplitudes(v).unwrap());
        let (a, b, c) = (p(&x), p(&y), p(&z));
        let ab = trace_distance(&a, &b).unwrap();
        prop_assert!((ab - trace_distance(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(ab <= trace_distance(&a, &c).unwrap() + trace_distance(&c, &b).unwrap() + 1e-9);
        prop_assert!(ab <= trace_distance_bound(&a, &b).unwrap() + 1e-9);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&ab));
    }
}
