//! Qubit coupled to `N` environment qubits:
//! `H = ½ω₀σz − ½Δ₀σx + ½σz ⊗ Σ g_i σz⁽ⁱ⁾`.
//!
//! The environment operators commute with `H`, so `H` is block diagonal over
//! environment `σz` configurations `c`, each block being the qubit
//! Hamiltonian `(½ω₀ + ½E_c)σz − ½Δ₀σx` with `E_c = Σ g_i s_i`. The system
//! qubit is the first tensor factor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::linalg::{embed, pauli_x, pauli_z};
use crate::quantum::{c, re, CMatrix, CVector, DensityMatrix, Operator, StateVector, C64};

pub const MAX_ENV_QUBITS: usize = 14;
const MAX_DENSE_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinEnvironment {
    pub couplings: Vec<f64>,
    /// Initial state `[a, b]` of each environment qubit as `(re, im)` pairs,
    /// normalized on construction.
    pub initial: Vec<[(f64, f64); 2]>,
    pub delta0: f64,
    #[serde(default)]
    pub omega0: f64,
}

impl SpinEnvironment {
    pub fn new(couplings: Vec<f64>, initial: Vec<StateVector>, delta0: f64, omega0: f64) -> Result<Self> {
        if initial.len() != couplings.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} couplings for {} environment states",
                couplings.len(),
                initial.len()
            )));
        }
        let mut states = Vec::with_capacity(initial.len());
        for s in &initial {
            if s.dim() != 2 {
                return Err(Error::DimensionMismatch("environment states must be single qubits".into()));
            }
            let a = s.amplitudes();
            states.push([(a[0].re, a[0].im), (a[1].re, a[1].im)]);
        }
        let env = Self { couplings, initial: states, delta0, omega0 };
        env.validate()?;
        Ok(env)
    }

    /// All environment qubits in `|+⟩`.
    pub fn all_plus(couplings: Vec<f64>, delta0: f64, omega0: f64) -> Result<Self> {
        let n = couplings.len();
        Self::new(couplings, vec![StateVector::plus(); n], delta0, omega0)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.couplings.len();
        if n > MAX_ENV_QUBITS {
            return Err(Error::TooLarge(format!("{n} environment qubits exceeds the limit of {MAX_ENV_QUBITS}")));
        }
        if self.initial.len() != n {
            return Err(Error::DimensionMismatch("one initial state per environment qubit".into()));
        }
        if self.couplings.iter().chain([&self.delta0, &self.omega0]).any(|g| !g.is_finite()) {
            return Err(Error::InvalidArgument("couplings and energies must be finite".into()));
        }
        for s in &self.initial {
            let norm = s.iter().map(|(a, b)| a * a + b * b).sum::<f64>();
            if (norm - 1.0).abs() > 1e-8 {
                return Err(Error::NotNormalized(norm.sqrt()));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.couplings.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![2; self.n() + 1]
    }

    fn env_amplitudes(&self) -> Vec<C64> {
        let mut amps = vec![re(1.0)];
        for s in &self.initial {
            let (a, b) = (c(s[0].0, s[0].1), c(s[1].0, s[1].1));
            amps = amps.iter().flat_map(|x| [x * a, x * b]).collect();
        }
        amps
    }

    /// `E_c = Σ g_i s_i` for every configuration, first qubit most significant.
    fn energies(&self) -> Vec<f64> {
        let n = self.n();
        (0..1usize << n)
            .map(|cfg| {
                self.couplings
                    .iter()
                    .enumerate()
                    .map(|(i, g)| if cfg >> (n - 1 - i) & 1 == 0 { *g } else { -*g })
                    .sum()
            })
            .collect()
    }

    /// Initial environment state.
    pub fn initial_state(&self) -> StateVector {
        StateVector::new(CVector::from_vec(self.env_amplitudes()), vec![2; self.n()])
            .expect("product of normalized qubits")
    }
}

/// Dense total Hamiltonian, for cross-checks at small `N`.
pub fn total_hamiltonian(env: &SpinEnvironment) -> Result<Operator> {
    env.validate()?;
    if env.n() + 1 > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge(format!("dense Hamiltonian for {} qubits", env.n() + 1)));
    }
    let dims = env.dims();
    let sz = embed(&pauli_z(), 0, &dims);
    let mut h = sz.clone() * re(0.5 * env.omega0) - embed(&pauli_x(), 0, &dims) * re(0.5 * env.delta0);
    let mut e = CMatrix::zeros(sz.nrows(), sz.ncols());
    for (i, g) in env.couplings.iter().enumerate() {
        e += embed(&pauli_z(), i + 1, &dims) * re(*g);
    }
    h += sz * e * re(0.5);
    Operator::new(h, dims)
}

/// `exp(−i(a σz + b σx) t)`.
fn qubit_propagator(a: f64, b: f64, t: f64) -> [[C64; 2]; 2] {
    let w = (a * a + b * b).sqrt();
    let (cs, sn) = ((w * t).cos(), (w * t).sin());
    let (nz, nx) = if w > 0.0 { (a / w, b / w) } else { (0.0, 0.0) };
    [
        [c(cs, -sn * nz), c(0.0, -sn * nx)],
        [c(0.0, -sn * nx), c(cs, sn * nz)],
    ]
}

#[derive(Debug, Clone)]
pub struct SpinSpinResult {
    pub times: Vec<f64>,
    pub reduced: Vec<DensityMatrix>,
    /// `|ρ₀₁(t)/ρ₀₁(0)|`, reported when `Δ₀ = 0` and `ρ₀₁(0) ≠ 0`.
    pub decoherence: Option<Vec<f64>>,
    /// Joint state at the last time.
    pub final_state: StateVector,
}

struct Blocks {
    amps: Vec<C64>,
    energies: Vec<f64>,
}

impl Blocks {
    fn new(env: &SpinEnvironment) -> Result<Self> {
        env.validate()?;
        Ok(Self { amps: env.env_amplitudes(), energies: env.energies() })
    }

    /// Per-configuration system vectors `U_c(t) ψ_S` weighted by the
    /// environment amplitude.
    fn evolve(&self, env: &SpinEnvironment, psi: &[C64; 2], t: f64) -> Vec<[C64; 2]> {
        self.energies
            .iter()
            .zip(&self.amps)
            .map(|(e, amp)| {
                let u = qubit_propagator(0.5 * env.omega0 + 0.5 * e, -0.5 * env.delta0, t);
                [
                    (u[0][0] * psi[0] + u[0][1] * psi[1]) * amp,
                    (u[1][0] * psi[0] + u[1][1] * psi[1]) * amp,
                ]
            })
            .collect()
    }
}

fn system_amplitudes(psi0: &StateVector) -> Result<[C64; 2]> {
    if psi0.dim() != 2 {
        return Err(Error::DimensionMismatch("system state must be a single qubit".into()));
    }
    let a = psi0.amplitudes();
    Ok([a[0], a[1]])
}

fn reduce(branches: &[[C64; 2]]) -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    for b in branches {
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] += b[i] * b[j].conj();
            }
        }
    }
    m
}

fn joint(branches: &[[C64; 2]], n: usize) -> Result<StateVector> {
    let half = branches.len();
    let mut v = CVector::zeros(2 * half);
    for (cfg, b) in branches.iter().enumerate() {
        v[cfg] = b[0];
        v[half + cfg] = b[1];
    }
    StateVector::normalized(v, vec![2; n + 1])
}

/// Joint system–environment state at time `t`.
pub fn spin_spin_state(env: &SpinEnvironment, psi0: &StateVector, t: f64) -> Result<StateVector> {
    let blocks = Blocks::new(env)?;
    joint(&blocks.evolve(env, &system_amplitudes(psi0)?, t), env.n())
}

pub fn spin_spin_exact(env: &SpinEnvironment, psi0: &StateVector, times: &[f64]) -> Result<SpinSpinResult> {
    let blocks = Blocks::new(env)?;
    let psi = system_amplitudes(psi0)?;
    if times.is_empty() {
        return Err(Error::InvalidArgument("time grid is empty".into()));
    }
    let mut reduced = Vec::with_capacity(times.len());
    let mut last = Vec::new();
    for &t in times {
        let branches = blocks.evolve(env, &psi, t);
        reduced.push(DensityMatrix::new_unchecked(reduce(&branches), vec![2])?);
        last = branches;
    }
    let c0 = psi[0] * psi[1].conj();
    let decoherence = (env.delta0 == 0.0 && c0.norm() > 1e-12)
        .then(|| reduced.iter().map(|r| (r.matrix()[(0, 1)] / c0).norm()).collect());
    Ok(SpinSpinResult { times: times.to_vec(), reduced, decoherence, final_state: joint(&last, env.n())? })
}
