//! Three-qubit phase-flip code with ancilla syndrome extraction.
//!
//! Register layout: data qubits `q0..q2`, ancillas `a0, a1`, then one
//! private environment qubit per entangled data qubit. The first factor is
//! the most significant bit of the amplitude index.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::series::format_csv;
use crate::error::{Error, Result};
use crate::quantum::linalg::kron_vec;
use crate::quantum::{c, re, CMatrix, CVector, Operator, StateVector, C64};
use crate::rng;

pub const CODE_QUBITS: usize = 3;
pub const ANCILLAS: usize = 2;
const SHOT_CHUNK: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ErrorKind {
    /// `σ_z` on each qubit with probability `p`.
    IndependentPhaseFlip { p: f64 },
    /// The first `k` qubits each control a rotation `R_y(2θ)` of a private
    /// environment qubit prepared in `|0⟩`.
    PartialDecoherence { k: usize, theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorModel {
    pub kind: ErrorKind,
    pub n: usize,
}

impl ErrorModel {
    pub fn independent(p: f64) -> Self {
        Self { kind: ErrorKind::IndependentPhaseFlip { p }, n: CODE_QUBITS }
    }

    pub fn partial(k: usize, theta: f64) -> Self {
        Self { kind: ErrorKind::PartialDecoherence { k, theta }, n: CODE_QUBITS }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ErrorKind::IndependentPhaseFlip { p } if !(0.0..=1.0).contains(&p) => {
                Err(Error::InvalidArgument(format!("flip probability {p} outside [0, 1]")))
            }
            ErrorKind::PartialDecoherence { k, .. } if k > self.n => {
                Err(Error::InvalidArgument(format!("{k} entangled qubits out of {}", self.n)))
            }
            ErrorKind::PartialDecoherence { theta, .. } if !theta.is_finite() => {
                Err(Error::InvalidArgument("coupling angle must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// Environment qubits appended by [`apply_errors`].
    pub fn env_qubits(&self) -> usize {
        match self.kind {
            ErrorKind::IndependentPhaseFlip { .. } => 0,
            ErrorKind::PartialDecoherence { k, .. } => k,
        }
    }
}

/// Ground truth of what [`apply_errors`] did.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ErrorRecord {
    pub flipped: Vec<usize>,
    pub entangled: Vec<usize>,
}

fn bit(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

fn apply_1q(v: &mut CVector, n: usize, q: usize, u: [[C64; 2]; 2]) {
    let m = bit(n, q);
    for i in 0..v.len() {
        if i & m == 0 {
            let (a, b) = (v[i], v[i | m]);
            v[i] = u[0][0] * a + u[0][1] * b;
            v[i | m] = u[1][0] * a + u[1][1] * b;
        }
    }
}

fn apply_z(v: &mut CVector, n: usize, q: usize) {
    let m = bit(n, q);
    for i in 0..v.len() {
        if i & m != 0 {
            v[i] = -v[i];
        }
    }
}

fn apply_h(v: &mut CVector, n: usize, q: usize) {
    let s = re(std::f64::consts::FRAC_1_SQRT_2);
    apply_1q(v, n, q, [[s, s], [s, -s]]);
}

fn apply_cnot(v: &mut CVector, n: usize, control: usize, target: usize) {
    let (mc, mt) = (bit(n, control), bit(n, target));
    for i in 0..v.len() {
        if i & mc != 0 && i & mt == 0 {
            v.swap_rows(i, i | mt);
        }
    }
}

/// `|1⟩⟨1| ⊗ R_y(2θ)`.
fn apply_cry(v: &mut CVector, n: usize, control: usize, target: usize, theta: f64) {
    let (mc, mt) = (bit(n, control), bit(n, target));
    let (s, co) = theta.sin_cos();
    for i in 0..v.len() {
        if i & mc != 0 && i & mt == 0 {
            let (a, b) = (v[i], v[i | mt]);
            v[i] = a * co - b * s;
            v[i | mt] = a * s + b * co;
        }
    }
}

fn single_qubit(psi: &StateVector) -> Result<(C64, C64)> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch("logical state must be a single qubit".into()));
    }
    Ok((psi.amplitudes()[0], psi.amplitudes()[1]))
}

/// Components `U(ψ ⊗ e₀) = Σ_P (Pψ) ⊗ |e_P⟩` with `P ∈ {I, σx, σy, σz}`.
#[derive(Debug, Clone)]
pub struct PauliExpansion {
    /// Unnormalized environment kets in the order `I, x, y, z`.
    pub components: [CVector; 4],
    pub env_dims: Vec<usize>,
}

impl PauliExpansion {
    pub fn labels() -> [&'static str; 4] {
        ["I", "x", "y", "z"]
    }

    pub fn norms(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|k| self.components[k].norm())
    }

    pub fn reconstruct(&self, psi: &StateVector) -> CVector {
        let paulis = pauli_set();
        let mut out = CVector::zeros(2 * self.components[0].len());
        for (p, e) in paulis.iter().zip(&self.components) {
            out += kron_vec(&(p * psi.amplitudes()), e);
        }
        out
    }
}

fn pauli_set() -> [CMatrix; 4] {
    use crate::quantum::linalg::{identity, pauli_x, pauli_y, pauli_z};
    [identity(2), pauli_x(), pauli_y(), pauli_z()]
}

/// Writes `U = Σ_P P ⊗ B_P` with `B_P = ½Tr_S[(P ⊗ I)U]` and returns
/// `|e_P⟩ = B_P|e₀⟩`, which do not depend on `ψ`.
pub fn expand_in_pauli_errors(u: &Operator, psi: &StateVector, e0: &StateVector) -> Result<PauliExpansion> {
    let de = e0.dim();
    if u.dim() != 2 * de || psi.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "unitary of dimension {} for a qubit and environment of dimension {de}",
            u.dim()
        )));
    }
    let m = u.matrix();
    let components = pauli_set().map(|p| {
        let mut b = CMatrix::zeros(de, de);
        for i in 0..2 {
            for j in 0..2 {
                // (P ⊗ I)U summed over the diagonal system index: P[j][i]·U[i,j] blocks.
                if p[(j, i)] != c(0.0, 0.0) {
                    b += m.view((i * de, j * de), (de, de)) * p[(j, i)];
                }
            }
        }
        (b * re(0.5)) * e0.amplitudes()
    });
    let mut env_dims = e0.dims().to_vec();
    if env_dims.is_empty() {
        env_dims.push(de);
    }
    Ok(PauliExpansion { components, env_dims })
}

/// `α|+⟩ + β|−⟩ ↦ α|+++⟩ + β|−−−⟩`.
pub fn encode(psi: &StateVector) -> Result<StateVector> {
    let (a, b) = single_qubit(psi)?;
    let (alpha, beta) = plus_minus(a, b);
    let s3 = (2.0f64).powf(-1.5);
    let v = CVector::from_fn(8, |i, _| {
        let parity = if i.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        (alpha + beta * parity) * s3
    });
    StateVector::new(v, vec![2; CODE_QUBITS])
}

/// Amplitudes in the `|±⟩` basis.
fn plus_minus(a: C64, b: C64) -> (C64, C64) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ((a + b) * s, (a - b) * s)
}

/// Applies `model` to the data qubits; partial decoherence appends its
/// environment qubits after them.
pub fn apply_errors<R: Rng + ?Sized>(
    state: &StateVector,
    model: &ErrorModel,
    rng: &mut R,
) -> Result<(StateVector, ErrorRecord)> {
    model.validate()?;
    let n = model.n;
    if state.dims() != vec![2; n].as_slice() {
        return Err(Error::DimensionMismatch(format!("error model acts on {n} qubits")));
    }
    let mut record = ErrorRecord::default();
    match model.kind {
        ErrorKind::IndependentPhaseFlip { p } => {
            let mut v = state.amplitudes().clone();
            for q in 0..n {
                if rng.random::<f64>() < p {
                    apply_z(&mut v, n, q);
                    record.flipped.push(q);
                }
            }
            Ok((StateVector::new(v, state.dims().to_vec())?, record))
        }
        ErrorKind::PartialDecoherence { k, theta } => {
            let mut env0 = CVector::zeros(1 << k);
            env0[0] = re(1.0);
            let mut v = kron_vec(state.amplitudes(), &env0);
            let total = n + k;
            for q in 0..k {
                apply_cry(&mut v, total, q, n + q, theta);
                record.entangled.push(q);
            }
            Ok((StateVector::new(v, vec![2; total])?, record))
        }
    }
}

/// Data, ancillas and environment in one state vector.
#[derive(Debug, Clone)]
pub struct CodeRegister {
    pub psi: StateVector,
    pub n_env: usize,
}

impl CodeRegister {
    /// Inserts ancillas in `|00⟩` between the data and the environment.
    pub fn with_ancillas(noisy: &StateVector, n_env: usize) -> Result<Self> {
        let expected = vec![2; CODE_QUBITS + n_env];
        if noisy.dims() != expected.as_slice() {
            return Err(Error::DimensionMismatch(format!(
                "expected {CODE_QUBITS} data and {n_env} environment qubits"
            )));
        }
        let total = CODE_QUBITS + ANCILLAS + n_env;
        let mut v = CVector::zeros(1 << total);
        for (i, a) in noisy.amplitudes().iter().enumerate() {
            let data = i >> n_env;
            let env = i & ((1 << n_env) - 1);
            v[(data << (ANCILLAS + n_env)) | env] = *a;
        }
        Ok(Self { psi: StateVector::new(v, vec![2; total])?, n_env })
    }

    fn n_total(&self) -> usize {
        CODE_QUBITS + ANCILLAS + self.n_env
    }

    /// `⟨ψ_L|ρ_data|ψ_L⟩` with `ψ_L` the encoded logical state.
    pub fn logical_fidelity(&self, logical: &StateVector) -> Result<f64> {
        let target = encode(logical)?;
        let rho = self.psi.reduced(&[0, 1, 2])?;
        Ok(rho.expectation(&(target.amplitudes() * target.amplitudes().adjoint())).re)
    }
}

/// Parity checks `X₀X₁ → a₀` and `X₁X₂ → a₁` realised as CNOTs conjugated by
/// Hadamards on the data.
fn syndrome_circuit(reg: &CodeRegister) -> CVector {
    let n = reg.n_total();
    let mut v = reg.psi.amplitudes().clone();
    for q in 0..CODE_QUBITS {
        apply_h(&mut v, n, q);
    }
    apply_cnot(&mut v, n, 0, 3);
    apply_cnot(&mut v, n, 1, 3);
    apply_cnot(&mut v, n, 1, 4);
    apply_cnot(&mut v, n, 2, 4);
    for q in 0..CODE_QUBITS {
        apply_h(&mut v, n, q);
    }
    v
}

/// Qubit to flip back for each syndrome.
pub fn correction_for(syndrome: (u8, u8)) -> Option<usize> {
    match syndrome {
        (0, 0) => None,
        (1, 0) => Some(0),
        (1, 1) => Some(1),
        (0, 1) => Some(2),
        _ => unreachable!("syndrome bits are 0 or 1"),
    }
}

#[derive(Debug, Clone)]
pub struct SyndromeOutcome {
    pub syndrome: (u8, u8),
    pub probability: f64,
    /// Post-measurement, corrected register.
    pub state: CodeRegister,
}

fn branch(reg: &CodeRegister, v: &CVector, syndrome: (u8, u8)) -> Result<Option<SyndromeOutcome>> {
    let n = reg.n_total();
    let (m0, m1) = (bit(n, 3), bit(n, 4));
    let mut proj = CVector::zeros(v.len());
    for i in 0..v.len() {
        let s = (u8::from(i & m0 != 0), u8::from(i & m1 != 0));
        if s == syndrome {
            proj[i] = v[i];
        }
    }
    let prob = proj.norm_squared();
    if prob < 1e-300 {
        return Ok(None);
    }
    if let Some(q) = correction_for(syndrome) {
        apply_z(&mut proj, n, q);
    }
    let psi = StateVector::normalized(proj, vec![2; n])?;
    Ok(Some(SyndromeOutcome { syndrome, probability: prob, state: CodeRegister { psi, n_env: reg.n_env } }))
}

/// Every syndrome outcome with its exact probability and corrected state.
pub fn syndrome_branches(reg: &CodeRegister) -> Result<Vec<SyndromeOutcome>> {
    let v = syndrome_circuit(reg);
    let mut out = Vec::with_capacity(4);
    for s in [(0, 0), (1, 0), (1, 1), (0, 1)] {
        if let Some(b) = branch(reg, &v, s)? {
            out.push(b);
        }
    }
    Ok(out)
}

/// Samples one syndrome and applies the matching correction.
pub fn syndrome_and_recover<R: Rng + ?Sized>(reg: &CodeRegister, rng: &mut R) -> Result<SyndromeOutcome> {
    let branches = syndrome_branches(reg)?;
    let mut u: f64 = rng.random();
    for b in &branches {
        if u < b.probability {
            return Ok(b.clone());
        }
        u -= b.probability;
    }
    Ok(branches.into_iter().last().expect("probabilities sum to one"))
}

/// Probability-weighted logical fidelity over all syndrome branches.
pub fn recovered_fidelity(reg: &CodeRegister, logical: &StateVector) -> Result<f64> {
    syndrome_branches(reg)?
        .iter()
        .map(|b| Ok(b.probability * b.state.logical_fidelity(logical)?))
        .sum()
}

/// Exhaustive-branch pipeline for a deterministic error model: encode,
/// entangle with the environment, correct. Returns the fidelity without and
/// with recovery.
pub fn partial_decoherence_fidelity(logical: &StateVector, k: usize, theta: f64) -> Result<(f64, f64)> {
    let model = ErrorModel::partial(k, theta);
    let (noisy, _) = apply_errors(&encode(logical)?, &model, &mut rng::stream(0, 0))?;
    let reg = CodeRegister::with_ancillas(&noisy, k)?;
    Ok((reg.logical_fidelity(logical)?, recovered_fidelity(&reg, logical)?))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LogicalErrorRate {
    pub p: f64,
    pub uncorrected: f64,
    pub corrected: f64,
    pub shots: usize,
}

pub fn logical_error_csv(points: &[LogicalErrorRate]) -> String {
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|r| vec![r.p, r.uncorrected, r.corrected, r.shots as f64])
        .collect();
    format_csv(&["p", "logical_error_rate_uncorrected", "logical_error_rate_corrected", "n_shots"], &rows)
}

/// Sampled Monte Carlo of the logical `|+⟩` under independent phase flips.
/// A shot fails when the block's logical fidelity drops below ½. Shots are
/// drawn in fixed chunks with one random stream each, so the result does
/// not depend on the thread count.
pub fn logical_error_rate(p: f64, shots: usize, seed: u64) -> Result<LogicalErrorRate> {
    let model = ErrorModel::independent(p);
    model.validate()?;
    if shots == 0 {
        return Err(Error::InvalidArgument("need at least one shot".into()));
    }
    let logical = StateVector::plus();
    let encoded = encode(&logical)?;
    let chunks = shots.div_ceil(SHOT_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| -> Result<(usize, usize)> {
            let mut rng = rng::stream(seed, chunk as u64);
            let len = SHOT_CHUNK.min(shots - chunk * SHOT_CHUNK);
            let (mut raw, mut fixed) = (0, 0);
            for _ in 0..len {
                let (noisy, _) = apply_errors(&encoded, &model, &mut rng)?;
                let reg = CodeRegister::with_ancillas(&noisy, 0)?;
                if reg.logical_fidelity(&logical)? < 0.5 {
                    raw += 1;
                }
                if syndrome_and_recover(&reg, &mut rng)?.state.logical_fidelity(&logical)? < 0.5 {
                    fixed += 1;
                }
            }
            Ok((raw, fixed))
        })
        .collect::<Result<Vec<_>>>()?;
    let (raw, fixed) = counts.iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(LogicalErrorRate {
        p,
        uncorrected: raw as f64 / shots as f64,
        corrected: fixed as f64 / shots as f64,
        shots,
    })
}

/// `3p²(1−p) + p³`: probability of two or more flips.
pub fn logical_error_oracle(p: f64) -> f64 {
    3.0 * p * p * (1.0 - p) + p.powi(3)
}

/// Power-law fit `rate ≈ a·p^b` of the corrected rates, weighting each
/// point by its failure count. Returns `(b, a)`.
pub fn fit_power_law(points: &[LogicalErrorRate]) -> Result<(f64, f64)> {
    let used: Vec<(f64, f64, f64)> = points
        .iter()
        .filter(|r| r.corrected > 0.0)
        .map(|r| (r.p.ln(), r.corrected.ln(), r.corrected * r.shots as f64))
        .collect();
    if used.len() < 2 {
        return Err(Error::InvalidArgument("need two rates with failures to fit".into()));
    }
    let w: f64 = used.iter().map(|u| u.2).sum();
    let mx = used.iter().map(|u| u.2 * u.0).sum::<f64>() / w;
    let my = used.iter().map(|u| u.2 * u.1).sum::<f64>() / w;
    let sxy: f64 = used.iter().map(|u| u.2 * (u.0 - mx) * (u.1 - my)).sum();
    let sxx: f64 = used.iter().map(|u| u.2 * (u.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("fit needs distinct p values".into()));
    }
    let b = sxy / sxx;
    Ok((b, (my - b * mx).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::{identity, kron, pauli_x, pauli_z, unitarity_error};
    use crate::quantum::overlap;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn logical(theta: f64, phi: f64) -> StateVector {
        StateVector::normalized(CVector::from_vec(vec![re(theta.cos()), c(phi.cos(), phi.sin()) * theta.sin()]), vec![2])
            .unwrap()
    }

    fn random_unitary(d: usize, seed: u64) -> CMatrix {
        let mut rng = rng::stream(seed, 1);
        let m = CMatrix::from_fn(d, d, |_, _| {
            c(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        m.qr().q()
    }

    #[test]
    fn encoding_examples() {
        let plus = encode(&StateVector::plus()).unwrap();
        assert!((plus.amplitudes() - CVector::from_element(8, re(8f64.sqrt().recip()))).norm() < 1e-14);
        let zero = encode(&StateVector::qubits(&[0]).unwrap()).unwrap();
        let mut expected = CVector::zeros(8);
        for i in [0, 3, 5, 6] {
            expected[i] = re(0.5);
        }
        assert!((zero.amplitudes() - expected).norm() < 1e-14);
        let one = encode(&StateVector::qubits(&[1]).unwrap()).unwrap();
        assert!(overlap(&zero, &one).unwrap().norm() < 1e-14);
    }

    #[test]
    fn pauli_expansion_examples() {
        let e0 = StateVector::qubits(&[0]).unwrap();
        let psi = logical(0.4, 1.1);
        let id = Operator::identity(vec![2, 2]);
        let ex = expand_in_pauli_errors(&id, &psi, &e0).unwrap();
        assert!((&ex.components[0] - e0.amplitudes()).norm() < 1e-14);
        assert!(ex.norms()[1..].iter().all(|n| *n < 1e-14));
        // Controlled phase: |0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ σz.
        let half = re(0.5);
        let cz = kron(&((identity(2) + pauli_z()) * half), &identity(2))
            + kron(&((identity(2) - pauli_z()) * half), &pauli_z());
        let plus = StateVector::plus();
        let ex = expand_in_pauli_errors(&Operator::new(cz.clone(), vec![2, 2]).unwrap(), &psi, &plus).unwrap();
        assert!(ex.norms()[1] < 1e-14 && ex.norms()[2] < 1e-14);
        assert!(ex.norms()[0] > 0.1 && ex.norms()[3] > 0.1);
        let direct = cz * kron_vec(psi.amplitudes(), plus.amplitudes());
        assert!((ex.reconstruct(&psi) - direct).norm() < 1e-12);
    }

    #[test]
    fn pauli_expansion_matches_linear_solve() {
        // Oracle: solve vec(U) = Σ_P vec(P ⊗ B_P) for the 16 entries of the B_P.
        let u = random_unitary(4, 3);
        let paulis = pauli_set();
        let mut a = CMatrix::zeros(16, 16);
        for (k, p) in paulis.iter().enumerate() {
            for r in 0..2 {
                for s in 0..2 {
                    let mut e = CMatrix::zeros(2, 2);
                    e[(r, s)] = re(1.0);
                    let col = kron(p, &e);
                    for (idx, val) in col.iter().enumerate() {
                        a[(idx, 4 * k + 2 * r + s)] = *val;
                    }
                }
            }
        }
        let rhs = CVector::from_iterator(16, u.iter().copied());
        let sol = a.lu().solve(&rhs).unwrap();
        let e0 = StateVector::plus();
        let ex = expand_in_pauli_errors(&Operator::new(u, vec![2, 2]).unwrap(), &StateVector::plus(), &e0).unwrap();
        for k in 0..4 {
            let b = CMatrix::from_fn(2, 2, |r, s| sol[4 * k + 2 * r + s]);
            assert!((b * e0.amplitudes() - &ex.components[k]).norm() < 1e-10);
        }
    }

    #[test]
    fn pauli_expansion_reconstructs_random_unitaries() {
        let e0 = StateVector::basis(vec![3], 1).unwrap();
        for seed in 0..100 {
            let u = random_unitary(6, seed);
            assert!(unitarity_error(&u) < 1e-12);
            let psi = logical(0.1 * seed as f64, 0.37 * seed as f64);
            let ex = expand_in_pauli_errors(&Operator::new(u.clone(), vec![2, 3]).unwrap(), &psi, &e0).unwrap();
            let direct = u * kron_vec(psi.amplitudes(), e0.amplitudes());
            assert!((ex.reconstruct(&psi) - direct).norm() < 1e-10);
        }
    }

    #[test]
    fn error_model_limits() {
        let enc = encode(&logical(0.3, 0.2)).unwrap();
        let mut rng = rng::stream(1, 0);
        let (same, rec) = apply_errors(&enc, &ErrorModel::independent(0.0), &mut rng).unwrap();
        assert!(rec.flipped.is_empty());
        assert!((same.amplitudes() - enc.amplitudes()).norm() < 1e-15);
        let (all, rec) = apply_errors(&enc, &ErrorModel::independent(1.0), &mut rng).unwrap();
        assert_eq!(rec.flipped, vec![0, 1, 2]);
        let mut v = enc.amplitudes().clone();
        for q in 0..3 {
            apply_z(&mut v, 3, q);
        }
        assert!((all.amplitudes() - v).norm() < 1e-15);
        assert!(ErrorModel::independent(1.5).validate().is_err());
        assert!(ErrorModel::partial(4, 0.1).validate().is_err());
    }

    #[test]
    fn single_flip_on_plus_is_detected() {
        let enc = encode(&StateVector::plus()).unwrap();
        let mut v = enc.amplitudes().clone();
        apply_z(&mut v, 3, 0);
        // |−++⟩
        let expected = CVector::from_fn(8, |i, _| re(if i & 4 == 0 { 1.0 } else { -1.0 } / 8f64.sqrt()));
        assert!((&v - expected).norm() < 1e-14);
        let reg = CodeRegister::with_ancillas(&StateVector::new(v, vec![2; 3]).unwrap(), 0).unwrap();
        let b = syndrome_branches(&reg).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].syndrome, (1, 0));
        assert!((b[0].state.logical_fidelity(&StateVector::plus()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn every_single_error_is_corrected() {
        for seed in 0..20u64 {
            let psi = logical(0.15 * seed as f64 + 0.05, 0.9 * seed as f64);
            let enc = encode(&psi).unwrap();
            for q in [None, Some(0), Some(1), Some(2)] {
                let mut v = enc.amplitudes().clone();
                if let Some(q) = q {
                    apply_z(&mut v, 3, q);
                }
                let reg = CodeRegister::with_ancillas(&StateVector::new(v, vec![2; 3]).unwrap(), 0).unwrap();
                let b = syndrome_branches(&reg).unwrap();
                assert_eq!(b.len(), 1);
                assert_eq!(correction_for(b[0].syndrome), q);
                assert!((b[0].probability - 1.0).abs() < 1e-10);
                assert!((b[0].state.logical_fidelity(&psi).unwrap() - 1.0).abs() < 1e-10);
                let sampled = syndrome_and_recover(&reg, &mut rng::stream(seed, 2)).unwrap();
                assert_eq!(sampled.syndrome, b[0].syndrome);
            }
        }
    }

    #[test]
    fn double_error_miscorrects() {
        let psi = StateVector::plus();
        let mut v = encode(&psi).unwrap().into_amplitudes();
        apply_z(&mut v, 3, 0);
        apply_z(&mut v, 3, 1);
        let reg = CodeRegister::with_ancillas(&StateVector::new(v, vec![2; 3]).unwrap(), 0).unwrap();
        assert!(recovered_fidelity(&reg, &psi).unwrap() < 1e-10);
    }

    #[test]
    fn partial_decoherence_is_repaired() {
        let psi = logical(0.7, 0.4);
        for k in 1..=20 {
            let theta = std::f64::consts::FRAC_PI_2 * k as f64 / 20.0;
            let (raw, fixed) = partial_decoherence_fidelity(&psi, 1, theta).unwrap();
            assert!((fixed - 1.0).abs() < 1e-10, "{theta} {fixed}");
            assert!(fixed > raw, "{theta}");
        }
        let (raw, fixed) = partial_decoherence_fidelity(&psi, 1, 0.0).unwrap();
        assert!((raw - 1.0).abs() < 1e-12 && (fixed - 1.0).abs() < 1e-12);
        // Two entangled qubits: weight-two errors leak through at order sin⁴(θ/2).
        let (_, fixed2) = partial_decoherence_fidelity(&psi, 2, 0.6).unwrap();
        assert!(fixed2 < 1.0 - 1e-6 && fixed2 > 0.9);
    }

    #[test]
    fn outcome_probabilities_normalized() {
        let psi = logical(0.3, 2.0);
        let (noisy, _) = apply_errors(&encode(&psi).unwrap(), &ErrorModel::partial(3, 0.8), &mut rng::stream(0, 0)).unwrap();
        let reg = CodeRegister::with_ancillas(&noisy, 3).unwrap();
        let total: f64 = syndrome_branches(&reg).unwrap().iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn monte_carlo_follows_double_error_count() {
        let r = logical_error_rate(0.2, 20_000, 7).unwrap();
        let exact = logical_error_oracle(0.2);
        let sigma = (exact * (1.0 - exact) / 20_000.0).sqrt();
        assert!((r.corrected - exact).abs() < 4.0 * sigma, "{r:?}");
        let raw = 1.0 - 0.8f64.powi(3);
        assert!((r.uncorrected - raw).abs() < 4.0 * (raw * (1.0 - raw) / 20_000.0).sqrt(), "{r:?}");
        assert_eq!(logical_error_rate(0.2, 20_000, 7).unwrap().corrected, r.corrected);
        assert!(logical_error_csv(&[r]).starts_with("p,logical_error_rate_uncorrected"));
    }

    #[test]
    fn power_law_fit_recovers_exponent() {
        let pts: Vec<LogicalErrorRate> = [0.01, 0.02, 0.05]
            .iter()
            .map(|&p| LogicalErrorRate { p, uncorrected: 0.0, corrected: 3.0 * p * p, shots: 100_000 })
            .collect();
        let (b, a) = fit_power_law(&pts).unwrap();
        assert!((b - 2.0).abs() < 1e-12 && (a - 3.0).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn syndrome_reveals_nothing_about_the_state(
            t1 in 0.0f64..3.2, p1 in 0.0f64..6.3, t2 in 0.0f64..3.2, p2 in 0.0f64..6.3, theta in 0.0f64..1.6, k in 1usize..4,
        ) {
            let probs = |psi: &StateVector| -> Vec<f64> {
                let (noisy, _) = apply_errors(&encode(psi).unwrap(), &ErrorModel::partial(k, theta), &mut rng::stream(0, 0)).unwrap();
                let reg = CodeRegister::with_ancillas(&noisy, k).unwrap();
                let b = syndrome_branches(&reg).unwrap();
                [(0, 0), (1, 0), (1, 1), (0, 1)]
                    .iter()
                    .map(|s| b.iter().find(|x| x.syndrome == *s).map_or(0.0, |x| x.probability))
                    .collect()
            };
            let (a, b) = (probs(&logical(t1, p1)), probs(&logical(t2, p2)));
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sigma_x_coupling_is_not_a_phase_flip() {
        let u = kron(&pauli_x(), &pauli_x());
        let ex = expand_in_pauli_errors(&Operator::new(u, vec![2, 2]).unwrap(), &StateVector::plus(), &StateVector::plus())
            .unwrap();
        assert!(ex.norms()[1] > 0.9 && ex.norms()[3] < 1e-14);
    }
}
