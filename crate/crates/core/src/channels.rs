//! Operator-sum representation of reduced dynamics and the indirect
//! measurement picture of environmental monitoring.
//!
//! Completeness is checked in the trace-preserving form `Σ_k W_k† W_k = I`.

use crate::error::{Error, Result};
use crate::quantum::linalg::{eigh, identity, max_abs_diff, unitarity_error};
use crate::quantum::{re, CMatrix, DensityMatrix, Operator, C64};

pub const COMPLETENESS_TOL: f64 = 1e-9;
const UNITARY_TOL: f64 = 1e-10;
const PRUNE_NORM: f64 = 1e-12;
const PROJECTOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct KrausChannel {
    operators: Vec<CMatrix>,
    dim: usize,
}

impl KrausChannel {
    /// Builds a channel, rejecting operator sets whose completeness residual
    /// exceeds [`COMPLETENESS_TOL`].
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let ch = Self::new_unchecked(operators)?;
        let r = ch.completeness_residual();
        if r > COMPLETENESS_TOL {
            return Err(Error::Completeness(r));
        }
        Ok(ch)
    }

    /// Builds a channel without checking completeness (useful for
    /// diagnostics on deliberately broken operator sets).
    pub fn new_unchecked(operators: Vec<CMatrix>) -> Result<Self> {
        let dim = operators.first().map(|w| w.nrows()).ok_or_else(|| {
            Error::InvalidArgument("a channel needs at least one operator".into())
        })?;
        if operators.iter().any(|w| w.nrows() != dim || w.ncols() != dim) {
            return Err(Error::DimensionMismatch("Kraus operators differ in shape".into()));
        }
        Ok(Self { operators, dim })
    }

    pub fn identity(dim: usize) -> Self {
        Self { operators: vec![identity(dim)], dim }
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Max entrywise `|Σ_k W_k† W_k − I|`.
    pub fn completeness_residual(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, w| acc + w.adjoint() * w);
        max_abs_diff(&sum, &identity(self.dim))
    }

    /// `ρ ↦ Σ_k W_k ρ W_k†`. Fails with [`Error::Completeness`] if the
    /// operator set is not trace preserving.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "channel on dimension {} applied to state of dimension {}",
                self.dim,
                rho.dim()
            )));
        }
        let r = self.completeness_residual();
        if r > COMPLETENESS_TOL {
            return Err(Error::Completeness(r));
        }
        let out = self.apply_matrix(rho.matrix());
        DensityMatrix::new_unchecked(out, rho.dims().to_vec())?.symmetrized().checked()
    }

    /// Raw operator-sum action on any matrix of matching size.
    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        self.operators
            .iter()
            .fold(CMatrix::zeros(m.nrows(), m.ncols()), |acc, w| acc + w * m * w.adjoint())
    }

    /// `Φ ⊗ id` acting on a system ⊗ ancilla matrix.
    pub fn extend_with_identity(&self, ancilla_dim: usize) -> KrausChannel {
        let id = identity(ancilla_dim);
        KrausChannel {
            operators: self
                .operators
                .iter()
                .map(|w| crate::quantum::linalg::kron(w, &id))
                .collect(),
            dim: self.dim * ancilla_dim,
        }
    }
}

trait Checked: Sized {
    fn checked(self) -> Result<Self>;
}

impl Checked for DensityMatrix {
    fn checked(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }
}

/// `apply_channel` in free-function form.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    ch.apply(rho)
}

pub fn verify_completeness(ch: &KrausChannel) -> f64 {
    ch.completeness_residual()
}

fn split_dims(u: &Operator) -> Result<(usize, usize)> {
    match u.dims() {
        [ds, de] => Ok((*ds, *de)),
        other => Err(Error::InvalidArgument(format!(
            "unitary must act on system ⊗ environment, got factor dims {other:?}"
        ))),
    }
}

/// Block `⟨e_j| U |e_i⟩` of a system ⊗ environment operator for environment
/// vectors given as columns.
fn env_block(u: &CMatrix, ds: usize, de: usize, bra: &[C64], ket: &[C64]) -> CMatrix {
    let mut out = CMatrix::zeros(ds, ds);
    for a in 0..ds {
        for b in 0..ds {
            let mut acc = C64::new(0.0, 0.0);
            for (j, bj) in bra.iter().enumerate() {
                if *bj == C64::new(0.0, 0.0) {
                    continue;
                }
                for (i, ki) in ket.iter().enumerate() {
                    acc += bj.conj() * u[(a * de + j, b * de + i)] * ki;
                }
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Kraus operators `W_k = √p_i ⟨e_j| U |E_i⟩` from the eigen-decomposition
/// `ρ_E = Σ p_i |E_i⟩⟨E_i|` and the computational basis `{|e_j⟩}`.
pub fn kraus_from_unitary(u: &Operator, rho_e: &DensityMatrix) -> Result<KrausChannel> {
    let (ds, de) = split_dims(u)?;
    if rho_e.dim() != de {
        return Err(Error::DimensionMismatch(format!(
            "environment state has dimension {}, unitary expects {de}",
            rho_e.dim()
        )));
    }
    rho_e.validate()?;
    let err = unitarity_error(u.matrix());
    if err > UNITARY_TOL {
        return Err(Error::NotUnitary(err));
    }
    let (probs, vecs) = eigh(rho_e.matrix());
    let mut ops = Vec::new();
    for (i, &p) in probs.iter().enumerate() {
        let p = p.max(0.0);
        if p == 0.0 {
            continue;
        }
        let ket: Vec<C64> = vecs.column(i).iter().copied().collect();
        for j in 0..de {
            let mut bra = vec![C64::new(0.0, 0.0); de];
            bra[j] = re(1.0);
            let w = env_block(u.matrix(), ds, de, &bra, &ket) * re(p.sqrt());
            if crate::quantum::linalg::frobenius(&w) >= PRUNE_NORM {
                ops.push(w);
            }
        }
    }
    KrausChannel::new_unchecked(ops)
}

/// Measurement operators `M_{α,k} = √p_k ⟨α_j| U |E_k⟩` for a projective
/// measurement on the environment.
#[derive(Debug, Clone)]
pub struct IndirectMeasurement {
    /// `(outcome α, environment index k, M_{α,k})`; for projectors of rank
    /// above one, `k` runs over (eigenvector of ρ_E, vector in the range of
    /// `P_α`) pairs.
    pub operators: Vec<(usize, usize, CMatrix)>,
    pub outcomes: usize,
}

impl IndirectMeasurement {
    pub fn completeness_residual(&self) -> f64 {
        let Some((_, _, first)) = self.operators.first() else {
            return f64::INFINITY;
        };
        let d = first.nrows();
        let sum = self
            .operators
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, (_, _, m)| acc + m.adjoint() * m);
        max_abs_diff(&sum, &identity(d))
    }
}

#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub outcome: usize,
    pub probability: f64,
    /// `None` when the outcome has zero probability.
    pub conditional: Option<DensityMatrix>,
}

fn check_projectors(projectors: &[Operator], de: usize) -> Result<()> {
    if projectors.is_empty() {
        return Err(Error::IncompleteProjectors(f64::INFINITY));
    }
    let mut sum = CMatrix::zeros(de, de);
    let mut worst = 0.0f64;
    for (a, p) in projectors.iter().enumerate() {
        if p.dim() != de {
            return Err(Error::DimensionMismatch(format!(
                "projector {a} has dimension {}, environment has {de}",
                p.dim()
            )));
        }
        let pm = p.matrix();
        worst = worst.max(max_abs_diff(pm, &pm.adjoint()));
        for (b, q) in projectors.iter().enumerate() {
            let prod = pm * q.matrix();
            let target = if a == b { pm.clone() } else { CMatrix::zeros(de, de) };
            worst = worst.max(max_abs_diff(&prod, &target));
        }
        sum += pm;
    }
    worst = worst.max(max_abs_diff(&sum, &identity(de)));
    if worst > PROJECTOR_TOL {
        return Err(Error::IncompleteProjectors(worst));
    }
    Ok(())
}

/// Builds the measurement operators for projectors `P_α` on the environment.
pub fn measurement_operators(
    u: &Operator,
    rho_e: &DensityMatrix,
    projectors: &[Operator],
) -> Result<IndirectMeasurement> {
    let (ds, de) = split_dims(u)?;
    if rho_e.dim() != de {
        return Err(Error::DimensionMismatch("environment state dimension".into()));
    }
    check_projectors(projectors, de)?;
    let err = unitarity_error(u.matrix());
    if err > UNITARY_TOL {
        return Err(Error::NotUnitary(err));
    }
    let (probs, vecs) = eigh(rho_e.matrix());
    let mut operators = Vec::new();
    for (alpha, p_alpha) in projectors.iter().enumerate() {
        // Orthonormal basis of the range of P_α.
        let (pv, pvecs) = eigh(p_alpha.matrix());
        let range: Vec<Vec<C64>> = pv
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.5)
            .map(|(j, _)| pvecs.column(j).iter().copied().collect())
            .collect();
        let mut k = 0;
        for (i, &p) in probs.iter().enumerate() {
            let p = p.max(0.0);
            let ket: Vec<C64> = vecs.column(i).iter().copied().collect();
            for bra in &range {
                if p > 0.0 {
                    let m = env_block(u.matrix(), ds, de, bra, &ket) * re(p.sqrt());
                    operators.push((alpha, k, m));
                }
                k += 1;
            }
        }
    }
    Ok(IndirectMeasurement { operators, outcomes: projectors.len() })
}

/// Outcome probabilities and conditional system states of a projective
/// measurement on the environment after the joint evolution `U`.
pub fn indirect_measurement(
    u: &Operator,
    rho_s: &DensityMatrix,
    rho_e: &DensityMatrix,
    projectors: &[Operator],
) -> Result<Vec<MeasurementOutcome>> {
    let (ds, _) = split_dims(u)?;
    if rho_s.dim() != ds {
        return Err(Error::DimensionMismatch("system state dimension".into()));
    }
    let meas = measurement_operators(u, rho_e, projectors)?;
    let mut out = Vec::with_capacity(meas.outcomes);
    for alpha in 0..meas.outcomes {
        let unnorm = meas
            .operators
            .iter()
            .filter(|(a, _, _)| *a == alpha)
            .fold(CMatrix::zeros(ds, ds), |acc, (_, _, m)| acc + m * rho_s.matrix() * m.adjoint());
        let probability = crate::quantum::linalg::trace(&unnorm).re.max(0.0);
        let conditional = if probability > 1e-14 {
            let m = crate::quantum::linalg::symmetrize(&(unnorm * re(1.0 / probability)));
            Some(DensityMatrix::new(m, rho_s.dims().to_vec())?)
        } else {
            None
        };
        out.push(MeasurementOutcome { outcome: alpha, probability, conditional });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::{kron, pauli_x, pauli_z};
    use crate::quantum::{partial_trace, StateVector, TensorProduct};

    fn controlled_phase() -> Operator {
        let p0 = CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(0.0)]);
        let p1 = CMatrix::from_row_slice(2, 2, &[re(0.0), re(0.0), re(0.0), re(1.0)]);
        Operator::new(kron(&p0, &identity(2)) + kron(&p1, &pauli_z()), vec![2, 2]).unwrap()
    }

    fn dilation_oracle(u: &Operator, rho_s: &DensityMatrix, rho_e: &DensityMatrix) -> CMatrix {
        let joint = rho_s.tensor(rho_e).conjugate_by(u.matrix());
        partial_trace(&joint, &[0]).unwrap().into_matrix()
    }

    #[test]
    fn identity_unitary_gives_identity_map() {
        let u = Operator::identity(vec![2, 3]);
        let rho_e = DensityMatrix::maximally_mixed(vec![3]);
        let ch = kraus_from_unitary(&u, &rho_e).unwrap();
        let rho = StateVector::plus().to_density();
        let out = ch.apply(&rho).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-14);
        assert!(ch.completeness_residual() < 1e-14);
    }

    #[test]
    fn controlled_phase_with_plus_environment_fully_dephases() {
        let u = controlled_phase();
        let rho_e = StateVector::plus().to_density();
        let ch = kraus_from_unitary(&u, &rho_e).unwrap();
        // Oracle on all four basis input matrices |a⟩⟨b|.
        for a in 0..2 {
            for b in 0..2 {
                let mut e = CMatrix::zeros(2, 2);
                e[(a, b)] = re(1.0);
                let joint = kron(&e, rho_e.matrix());
                let evolved = u.matrix() * joint * u.matrix().adjoint();
                let rho_joint = DensityMatrix::new_unchecked(evolved, vec![2, 2]).unwrap();
                let expected = partial_trace(&rho_joint, &[0]).unwrap();
                let got = ch.apply_matrix(&e);
                assert!(max_abs_diff(&got, expected.matrix()) < 1e-14);
                if a != b {
                    assert!(got.iter().all(|z| z.norm() < 1e-14));
                }
            }
        }
        let out = ch.apply(&StateVector::plus().to_density()).unwrap();
        assert!(max_abs_diff(out.matrix(), DensityMatrix::maximally_mixed(vec![2]).matrix()) < 1e-14);
    }

    #[test]
    fn partial_entangler_scales_coherence_by_environment_overlap() {
        // |0⟩|e0⟩ → |0⟩|e0⟩, |1⟩|e0⟩ → |1⟩ R(θ)|e0⟩ with ⟨e0|R e0⟩ = cos θ.
        let theta = 0.7f64;
        let r = CMatrix::from_row_slice(
            2,
            2,
            &[re(theta.cos()), re(-theta.sin()), re(theta.sin()), re(theta.cos())],
        );
        let p0 = CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(0.0)]);
        let p1 = CMatrix::from_row_slice(2, 2, &[re(0.0), re(0.0), re(0.0), re(1.0)]);
        let u = Operator::new(kron(&p0, &identity(2)) + kron(&p1, &r), vec![2, 2]).unwrap();
        let rho_e = StateVector::qubits(&[0]).unwrap().to_density();
        let rho_s = StateVector::plus().to_density();
        let out = kraus_from_unitary(&u, &rho_e).unwrap().apply(&rho_s).unwrap();
        let oracle = dilation_oracle(&u, &rho_s, &rho_e);
        assert!(max_abs_diff(out.matrix(), &oracle) < 1e-14);
        assert!((out.matrix()[(0, 1)].re - 0.5 * theta.cos()).abs() < 1e-14);
    }

    #[test]
    fn truncated_channel_reports_residual() {
        let u = controlled_phase();
        let ch = kraus_from_unitary(&u, &StateVector::plus().to_density()).unwrap();
        let mut ops = ch.operators().to_vec();
        ops.pop();
        let broken = KrausChannel::new_unchecked(ops.clone()).unwrap();
        assert!(verify_completeness(&broken) > 0.1);
        assert!(matches!(KrausChannel::new(ops), Err(Error::Completeness(_))));
        assert!(matches!(
            broken.apply(&StateVector::plus().to_density()),
            Err(Error::Completeness(_))
        ));
        assert_eq!(verify_completeness(&KrausChannel::identity(3)), 0.0);
    }

    #[test]
    fn non_unitary_is_rejected() {
        let u = Operator::new(kron(&pauli_x(), &identity(2)) * re(1.1), vec![2, 2]).unwrap();
        let rho_e = DensityMatrix::maximally_mixed(vec![2]);
        assert!(matches!(kraus_from_unitary(&u, &rho_e), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn indirect_measurement_without_interaction() {
        let u = Operator::identity(vec![2, 2]);
        let rho_s = StateVector::plus().to_density();
        let rho_e = DensityMatrix::from_matrix(CMatrix::from_row_slice(
            2,
            2,
            &[re(0.3), re(0.0), re(0.0), re(0.7)],
        ))
        .unwrap();
        let projs = [
            Operator::from_matrix(CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(0.0)])).unwrap(),
            Operator::from_matrix(CMatrix::from_row_slice(2, 2, &[re(0.0), re(0.0), re(0.0), re(1.0)])).unwrap(),
        ];
        let outcomes = indirect_measurement(&u, &rho_s, &rho_e, &projs).unwrap();
        assert!((outcomes[0].probability - 0.3).abs() < 1e-14);
        assert!((outcomes[1].probability - 0.7).abs() < 1e-14);
        for o in &outcomes {
            let cond = o.conditional.as_ref().unwrap();
            assert!(max_abs_diff(cond.matrix(), rho_s.matrix()) < 1e-14);
        }
    }

    #[test]
    fn controlled_phase_measured_in_plus_minus_basis() {
        let u = controlled_phase();
        let rho_s = StateVector::plus().to_density();
        let rho_e = StateVector::plus().to_density();
        let projs = [StateVector::plus().to_density(), StateVector::minus().to_density()]
            .map(|p| Operator::from_matrix(p.into_matrix()).unwrap());
        let outcomes = indirect_measurement(&u, &rho_s, &rho_e, &projs).unwrap();
        // Brute force: CZ|+⟩|+⟩ = (|0+⟩ + |1−⟩)/√2, so outcome + leaves |0⟩ and
        // outcome − leaves |1⟩, each with probability ½.
        let zero = StateVector::qubits(&[0]).unwrap().to_density();
        let one = StateVector::qubits(&[1]).unwrap().to_density();
        assert!((outcomes[0].probability - 0.5).abs() < 1e-14);
        assert!(max_abs_diff(outcomes[0].conditional.as_ref().unwrap().matrix(), zero.matrix()) < 1e-14);
        assert!(max_abs_diff(outcomes[1].conditional.as_ref().unwrap().matrix(), one.matrix()) < 1e-14);
        // With environment |0⟩ the branches stay pure superpositions with the
        // relative phase set by the outcome.
        let rho_e0 = StateVector::qubits(&[0]).unwrap().to_density();
        let outcomes = indirect_measurement(&u, &rho_s, &rho_e0, &projs).unwrap();
        for o in &outcomes {
            let cond = o.conditional.as_ref().unwrap();
            assert!((crate::quantum::purity(cond).unwrap() - 1.0).abs() < 1e-12);
        }
        let mixture = outcomes.iter().fold(CMatrix::zeros(2, 2), |acc, o| {
            acc + o.conditional.as_ref().unwrap().matrix() * re(o.probability)
        });
        assert!(max_abs_diff(&mixture, rho_s.matrix()) < 1e-14);
    }

    #[test]
    fn incomplete_projectors_are_rejected() {
        let u = controlled_phase();
        let rho = StateVector::plus().to_density();
        let projs = [Operator::from_matrix(StateVector::plus().to_density().into_matrix()).unwrap()];
        assert!(matches!(
            indirect_measurement(&u, &rho, &rho, &projs),
            Err(Error::IncompleteProjectors(_))
        ));
    }
}
