use approx::assert_abs_diff_eq;
use decohere_core::channels::{apply_channel, kraus_from_unitary, verify_completeness};
use decohere_core::dynamics::{evolve_with, LindbladSpec};
use decohere_core::quantum::linalg::{hermiticity_error, max_abs_diff, propagator, trace, unitarity_error};
use decohere_core::quantum::{
    entropy, partial_trace, purity, subsystem_entropy, tensor, CMatrix, CVector, DensityMatrix, Operator, StateVector, C64,
};
use proptest::prelude::*;

fn square(d: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(-1.0f64..1.0, 2 * d * d)
        .prop_map(move |v| CMatrix::from_fn(d, d, |i, j| C64::new(v[2 * (i * d + j)], v[2 * (i * d + j) + 1])))
}

fn hermitian(d: usize) -> impl Strategy<Value = CMatrix> {
    square(d).prop_map(|a| (&a + a.adjoint()) * C64::new(0.5, 0.0))
}

fn density(d: usize) -> impl Strategy<Value = DensityMatrix> {
    square(d).prop_map(|a| {
        let m = &a * a.adjoint();
        let tr = trace(&m);
        DensityMatrix::from_matrix(m / tr).unwrap()
    })
}

fn pure(d: usize) -> impl Strategy<Value = CVector> {
    prop::collection::vec(-1.0f64..1.0, 2 * d).prop_filter_map("nonzero", move |v| {
        let amps = CVector::from_fn(d, |i, _| C64::new(v[2 * i], v[2 * i + 1]));
        let n = amps.norm();
        (n > 1e-3).then(|| amps / C64::new(n, 0.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lindblad_flow_preserves_trace_and_hermiticity(
        h in hermitian(3),
        l1 in square(3),
        l2 in square(3),
        k1 in 0.0f64..0.5,
        k2 in 0.0f64..0.5,
        rho in density(3),
    ) {
        let spec = LindbladSpec::new(
            Operator::from_matrix(h).unwrap(),
            vec![(Operator::from_matrix(l1).unwrap(), k1), (Operator::from_matrix(l2).unwrap(), k2)],
        ).unwrap();
        let series = evolve_with(&spec, &rho, 2.0, 2e-3, 50).unwrap();
        for s in &series.states {
            prop_assert!((trace(s.matrix()) - C64::new(1.0, 0.0)).norm() < 1e-10);
            prop_assert!(hermiticity_error(s.matrix()) < 1e-12);
            prop_assert!(s.min_eigenvalue() > -1e-9);
        }
    }

    #[test]
    fn channel_matches_its_dilation(h in hermitian(4), rho_s in density(2), rho_e in density(2)) {
        let u = propagator(&h, 1.3);
        prop_assert!(unitarity_error(&u) < 1e-12);
        let u = Operator::new(u, vec![2, 2]).unwrap();
        let ch = kraus_from_unitary(&u, &rho_e).unwrap();
        prop_assert!(verify_completeness(&ch) < 1e-10);
        let via_kraus = apply_channel(&ch, &rho_s).unwrap();
        let joint = tensor(&rho_s, &rho_e).conjugate_by(u.matrix());
        let via_dilation = partial_trace(&joint, &[0]).unwrap();
        prop_assert!(max_abs_diff(via_kraus.matrix(), via_dilation.matrix()) < 1e-10);
    }

    #[test]
    fn partial_trace_of_a_product(a in density(2), b in density(3)) {
        let ab = tensor(&a, &b);
        prop_assert!(max_abs_diff(partial_trace(&ab, &[0]).unwrap().matrix(), a.matrix()) < 1e-12);
        prop_assert!(max_abs_diff(partial_trace(&ab, &[1]).unwrap().matrix(), b.matrix()) < 1e-12);
        let swapped = partial_trace(&ab, &[1, 0]).unwrap();
        prop_assert_eq!(swapped.dims(), &[3, 2][..]);
        prop_assert!(max_abs_diff(swapped.matrix(), tensor(&b, &a).matrix()) < 1e-12);
    }

    #[test]
    fn pure_bipartite_entropies_agree(amps in pure(6)) {
        let psi = StateVector::new(amps, vec![2, 3]).unwrap();
        let sa = subsystem_entropy(&psi, &[0]).unwrap();
        let sb = subsystem_entropy(&psi, &[1]).unwrap();
        prop_assert!((sa - sb).abs() < 1e-9);
        prop_assert!(sa >= -1e-12 && sa <= 1.0 + 1e-9);
        prop_assert!(entropy(&psi.to_density()).unwrap().abs() < 1e-9);
    }

    #[test]
    fn unitary_conjugation_keeps_spectrum(h in hermitian(3), rho in density(3)) {
        let u = propagator(&h, 0.7);
        let out = rho.conjugate_by(&u);
        let a = rho.eigenvalues();
        let b = out.eigenvalues();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        prop_assert!((purity(&rho).unwrap() - purity(&out).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn dephasing_qubit_matches_closed_form() {
    let kappa = 0.4;
    let spec = LindbladSpec::dephasing_qubit(kappa).unwrap();
    let rho0 = StateVector::plus().to_density();
    let series = evolve_with(&spec, &rho0, 3.0, 1e-3, 100).unwrap();
    for (t, s) in series.times.iter().zip(&series.states) {
        assert_abs_diff_eq!(s.matrix()[(0, 1)].re, 0.5 * (-2.0 * kappa * t).exp(), epsilon = 1e-9);
        assert_abs_diff_eq!(s.matrix()[(0, 0)].re, 0.5, epsilon = 1e-12);
    }
}

#[test]
fn maximally_mixed_is_a_fixed_point() {
    let spec = LindbladSpec::dephasing_qubit(1.0).unwrap();
    let rho0 = DensityMatrix::maximally_mixed(vec![2]);
    let series = evolve_with(&spec, &rho0, 1.0, 1e-2, 10).unwrap();
    assert!(max_abs_diff(series.last().matrix(), rho0.matrix()) < 1e-14);
    assert_abs_diff_eq!(entropy(series.last()).unwrap(), 1.0, epsilon = 1e-12);
}
