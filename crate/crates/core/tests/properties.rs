use std::f64::consts::PI;

use proptest::prelude::*;
use qka_core::discrim::{
    helstrom_pair, perfect_discrimination_bound, pgm, povm_optimize, Ensemble, DEFAULT_MAX_ITERS,
    DEFAULT_TOL,
};
use qka_core::qka::{run_honest, run_malicious_bob, KeyBits, ProtocolParams};
use qka_core::qmath::{c, hermitian_eig, ComplexMatrix, C64};
use qka_core::qsim::{apply_gate, reduced_density, RandomSource, StateVector};

fn amps(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
        .prop_filter("non-zero", |v| {
            v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3
        })
        .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
}

fn qubit() -> impl Strategy<Value = StateVector> {
    amps(2).prop_map(|a| StateVector::normalized(a).unwrap())
}

fn valid_params() -> impl Strategy<Value = ProtocolParams> {
    (1e-3f64..PI / 4.0 - 1e-3).prop_filter_map("collision", |t| ProtocolParams::from_theta(t).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_preserve_norm(s in amps(8), h in amps(16), t0 in 0usize..3, t1 in 0usize..3) {
        prop_assume!(t0 != t1);
        let state = StateVector::normalized(s).unwrap();
        let herm = ComplexMatrix::from_vec(4, 4, h).unwrap().hermitian_part();
        let u = hermitian_eig(&herm).unwrap().vectors;
        let out = apply_gate(&state, &u, &[t0, t1]).unwrap();
        let norm: f64 = out.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partial_traces_have_unit_trace(s in amps(8), keep in 0usize..3) {
        let state = StateVector::normalized(s).unwrap();
        let rho = reduced_density(&state, &[keep]).unwrap();
        prop_assert!((rho.operator().trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn helstrom_is_label_symmetric(a in qubit(), b in qubit(), p in 0.0f64..1.0) {
        let x = helstrom_pair(&a, &b, p).unwrap().success_probability;
        let y = helstrom_pair(&b, &a, 1.0 - p).unwrap().success_probability;
        prop_assert!((x - y).abs() < 1e-12);
    }

    #[test]
    fn pgm_never_beats_optimizer(states in prop::collection::vec(qubit(), 2..5)) {
        let n = states.len();
        let e = Ensemble::equal(states).unwrap();
        let opt = povm_optimize(&e, DEFAULT_MAX_ITERS, DEFAULT_TOL).unwrap();
        let sqrt_m = pgm(&e).unwrap();
        prop_assert!(sqrt_m.success_probability <= opt.success_probability + 1e-8);
        prop_assert!(opt.success_probability <= perfect_discrimination_bound(n, 2) + 1e-8);
        prop_assert!(opt.success_probability >= e.max_prior() - 1e-12);
        // the reported measurement re-validates as a POVM
        let povm = opt.povm.unwrap();
        prop_assert!(qka_core::qsim::Povm::new(povm.elements().to_vec()).is_ok());
    }

    #[test]
    fn honest_keys_always_agree(params in valid_params(), seed in any::<u64>()) {
        let t = run_honest(&params, &mut RandomSource::new(seed)).unwrap();
        prop_assert_eq!(t.bob_key, t.alice_key);
    }

    #[test]
    fn malicious_bob_always_wins(params in valid_params(), seed in any::<u64>(), bits in 0u8..4) {
        let target = KeyBits::new(bits).unwrap();
        let t = run_malicious_bob(&params, target, &mut RandomSource::new(seed)).unwrap();
        prop_assert_eq!(t.alice_key, target);
    }
}
