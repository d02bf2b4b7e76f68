use std::f64::consts::PI;

use qka_core::qka::{
    candidate_states, correction, honest_branch, key_for_outcome, run_honest, run_malicious_bob,
    KeyBits, ProtocolParams,
};
use qka_core::qmath::r;
use qka_core::qsim::{
    apply_gate, branch, factor_out, make_bell, outcome_probabilities, BellLabel, Povm,
    RandomSource, StateVector,
};

/// Valid θ values spread over (0, π/4); the midpoint grid never lands on π/8.
fn theta_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (k as f64 + 0.5) * (PI / 4.0) / n as f64)
        .collect()
}

#[test]
fn singlet_outcome_leaves_minus_phi_c() {
    let params = ProtocolParams::from_theta(PI / 5.0).unwrap();
    let phi_c = params.prep().state();
    let composite = make_bell(BellLabel::PsiMinus).tensor(&phi_c);
    let (p, post) = branch(
        &composite,
        &Povm::bell(),
        &[1, 2],
        BellLabel::PsiMinus.index(),
    )
    .unwrap();
    assert!((p - 0.25).abs() < 1e-12);
    let alice = factor_out(&post, &[1, 2], &make_bell(BellLabel::PsiMinus)).unwrap();
    let minus_phi: Vec<_> = phi_c.amplitudes().iter().map(|a| -a).collect();
    for (x, y) in alice.amplitudes().iter().zip(&minus_phi) {
        assert!((x - y).norm() < 1e-12);
    }
}

#[test]
fn bell_outcomes_equiprobable_for_every_theta() {
    for theta in theta_grid(50) {
        let params = ProtocolParams::from_theta(theta).unwrap();
        let composite = make_bell(BellLabel::PsiMinus).tensor(&params.prep().state());
        for p in outcome_probabilities(&composite, &Povm::bell(), &[1, 2]).unwrap() {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }
}

#[test]
fn honest_agreement_exhaustive_over_grid() {
    for theta in theta_grid(50) {
        let params = ProtocolParams::from_theta(theta).unwrap();
        for label in BellLabel::ALL {
            let t = honest_branch(&params, label).unwrap();
            assert!(t.keys_agree(), "θ={theta} {label}");
            assert_eq!(t.bob_key, key_for_outcome(label));
            assert!((t.teleportation_fidelity() - 1.0).abs() < 1e-10);
            assert!((t.oracle.value - params.table_value(t.bob_key)).abs() < 1e-10);
        }
    }
}

#[test]
fn oracle_column_for_each_candidate() {
    for theta in theta_grid(50) {
        let params = ProtocolParams::from_theta(theta).unwrap();
        let phi_d = params.prep().state();
        let (a, b) = (params.alpha(), params.beta());
        let expected = [1.0, 2.0 * a * b, a * a - b * b, 0.0];
        for (s, e) in candidate_states(params.prep()).iter().zip(expected) {
            let v = qka_core::qka::oracle_inner_product(s, &phi_d).unwrap();
            assert!((v.value - e).abs() < 1e-10);
        }
    }
}

#[test]
fn corrections_are_the_listed_paulis() {
    // Each correction undoes the Pauli that produced the candidate state.
    let params = ProtocolParams::from_theta(0.3).unwrap();
    let phi_c = params.prep().state();
    for label in BellLabel::ALL {
        let t = honest_branch(&params, label).unwrap();
        let fixed = apply_gate(&t.alice_state, &correction(label), &[0]).unwrap();
        assert!((fixed.fidelity(&phi_c) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn sampled_key_frequencies_are_uniform() {
    let params = ProtocolParams::from_theta(PI / 5.0).unwrap();
    let trials = 100_000u64;
    let mut counts = [0u32; 4];
    for i in 0..trials {
        let t = run_honest(&params, &mut RandomSource::child(42, i)).unwrap();
        assert!(t.keys_agree());
        counts[t.alice_key.bits() as usize] += 1;
    }
    for c in counts {
        assert!((c as f64 / trials as f64 - 0.25).abs() < 0.02);
    }
}

#[test]
fn malicious_bob_hits_every_target() {
    let params = ProtocolParams::from_theta(PI / 5.0).unwrap();
    for target in KeyBits::ALL {
        for i in 0..2_000 {
            let t = run_malicious_bob(&params, target, &mut RandomSource::child(7, i)).unwrap();
            assert_eq!(t.alice_key, target);
            assert!((t.oracle.value - params.table_value(target)).abs() < 1e-12);
        }
    }
}

#[test]
fn transcripts_replay_from_seed() {
    let params = ProtocolParams::from_theta(PI / 5.0).unwrap();
    let a = run_honest(&params, &mut RandomSource::new(99)).unwrap();
    let b = run_honest(&params, &mut RandomSource::new(99)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.seed, Some(99));
}

#[test]
fn phi_d_is_a_copy_of_phi_c_in_honest_runs() {
    let params = ProtocolParams::from_theta(0.3).unwrap();
    let t = run_honest(&params, &mut RandomSource::new(1)).unwrap();
    assert_eq!(t.phi_d, params.prep().state());
    let expected = StateVector::new(vec![r(0.3f64.cos()), r(0.3f64.sin())]).unwrap();
    assert_eq!(t.phi_d, expected);
}
