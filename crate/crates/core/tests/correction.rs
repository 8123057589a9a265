use decohere_core::qec::{
    apply_errors, encode, partial_decoherence_fidelity, recovered_fidelity, syndrome_branches, CodeRegister,
    ErrorModel,
};
use decohere_core::quantum::{CVector, StateVector, C64};
use decohere_core::rng;
use proptest::prelude::*;

fn qubit() -> impl Strategy<Value = StateVector> {
    (0.0f64..std::f64::consts::PI, 0.0f64..std::f64::consts::TAU).prop_map(|(th, ph)| {
        let amps = CVector::from_vec(vec![
            C64::new((th / 2.0).cos(), 0.0),
            C64::from_polar((th / 2.0).sin(), ph),
        ]);
        StateVector::new(amps, vec![2]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn single_qubit_entanglement_is_undone(psi in qubit(), theta in 0.0f64..std::f64::consts::PI) {
        let (raw, fixed) = partial_decoherence_fidelity(&psi, 1, theta).unwrap();
        prop_assert!(raw <= 1.0 + 1e-12);
        prop_assert!((fixed - 1.0).abs() < 1e-10);
    }

    #[test]
    fn syndrome_probabilities_sum_to_one(psi in qubit(), theta in 0.0f64..3.0, k in 1usize..=3) {
        let model = ErrorModel::partial(k, theta);
        let (noisy, _) = apply_errors(&encode(&psi).unwrap(), &model, &mut rng::stream(0, 0)).unwrap();
        let reg = CodeRegister::with_ancillas(&noisy, k).unwrap();
        let total: f64 = syndrome_branches(&reg).unwrap().iter().map(|b| b.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let f = recovered_fidelity(&reg, &psi).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn noiseless_round_trip(psi in qubit(), seed in any::<u64>()) {
        let (noisy, record) = apply_errors(&encode(&psi).unwrap(), &ErrorModel::independent(0.0), &mut rng::stream(seed, 0)).unwrap();
        prop_assert!(record.flipped.is_empty());
        let reg = CodeRegister::with_ancillas(&noisy, 0).unwrap();
        prop_assert!((reg.logical_fidelity(&psi).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!((recovered_fidelity(&reg, &psi).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn two_entangled_qubits_defeat_the_code() {
    let plus = StateVector::plus();
    let (_, fixed) = partial_decoherence_fidelity(&plus, 2, std::f64::consts::FRAC_PI_2).unwrap();
    assert!(fixed < 0.99, "fidelity {fixed}");
}
