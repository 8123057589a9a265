use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::series::fmt_f64;
use crate::dynamics::{evolve_with, Generator};
use crate::error::{Error, Result};
use crate::models::{spin_spin_exact, SpinEnvironment};
use crate::quantum::linalg::{eigh, kron_vec, propagator_from_eigen};
use crate::quantum::{entropy, purity, CMatrix, DensityMatrix, StateVector};

/// Reduced system states of a pure initial system state at ascending times.
pub trait ReducedDynamics: Sync {
    fn system_dim(&self) -> usize;

    fn reduced_states(&self, psi0: &StateVector, times: &[f64]) -> Result<Vec<DensityMatrix>>;
}

/// Master-equation dynamics, integrated piecewise between the requested times.
pub struct GeneratorDynamics<'a, G: Generator> {
    pub generator: &'a G,
    pub dt: f64,
}

impl<'a, G: Generator> GeneratorDynamics<'a, G> {
    pub fn new(generator: &'a G, dt: f64) -> Self {
        Self { generator, dt }
    }
}

impl<G: Generator> ReducedDynamics for GeneratorDynamics<'_, G> {
    fn system_dim(&self) -> usize {
        self.generator.dim()
    }

    fn reduced_states(&self, psi0: &StateVector, times: &[f64]) -> Result<Vec<DensityMatrix>> {
        let mut rho = psi0.to_density();
        let mut now = 0.0;
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            let span = t - now;
            if span > 0.0 {
                let dt = self.dt.min(span);
                rho = evolve_with(self.generator, &rho, span, dt, usize::MAX)?.last().clone();
                now = t;
            }
            out.push(rho.clone());
        }
        Ok(out)
    }
}

/// Closed system plus environment: `ρ_S(t) = Tr_E[U(t)(ψ ⊗ E₀)]`.
pub struct UnitaryDilation {
    vals: Vec<f64>,
    vecs: CMatrix,
    system_dims: Vec<usize>,
    env: StateVector,
}

impl UnitaryDilation {
    pub fn new(h_total: &CMatrix, system_dims: Vec<usize>, env: StateVector) -> Result<Self> {
        let ds: usize = system_dims.iter().product();
        if h_total.nrows() != ds * env.dim() || !h_total.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hamiltonian of dimension {} for system {} and environment {}",
                h_total.nrows(),
                ds,
                env.dim()
            )));
        }
        let (vals, vecs) = eigh(h_total);
        Ok(Self { vals, vecs, system_dims, env })
    }
}

impl ReducedDynamics for UnitaryDilation {
    fn system_dim(&self) -> usize {
        self.system_dims.iter().product()
    }

    fn reduced_states(&self, psi0: &StateVector, times: &[f64]) -> Result<Vec<DensityMatrix>> {
        let joint = kron_vec(psi0.amplitudes(), self.env.amplitudes());
        let mut dims = self.system_dims.clone();
        dims.extend_from_slice(self.env.dims());
        let keep: Vec<usize> = (0..self.system_dims.len()).collect();
        times
            .iter()
            .map(|&t| {
                let psi = StateVector::new(propagator_from_eigen(&self.vals, &self.vecs, t) * &joint, dims.clone())?;
                psi.reduced(&keep)
            })
            .collect()
    }
}

/// Exact spin–spin model.
pub struct SpinSpinDynamics {
    pub env: SpinEnvironment,
}

impl ReducedDynamics for SpinSpinDynamics {
    fn system_dim(&self) -> usize {
        2
    }

    fn reduced_states(&self, psi0: &StateVector, times: &[f64]) -> Result<Vec<DensityMatrix>> {
        Ok(spin_spin_exact(&self.env, psi0, times)?.reduced)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SieveMeasure {
    #[default]
    Purity,
    Entropy,
}

#[derive(Debug, Clone)]
pub struct SieveCandidate {
    pub label: String,
    pub initial: StateVector,
    pub purity: Vec<f64>,
    /// Von Neumann entropy in bits.
    pub entropy: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SieveReport {
    pub times: Vec<f64>,
    pub candidates: Vec<SieveCandidate>,
    pub measure: SieveMeasure,
    /// Candidate indices, highest purity at the horizon first.
    pub purity_ranking: Vec<usize>,
    /// Candidate indices, lowest entropy at the horizon first.
    pub entropy_ranking: Vec<usize>,
}

impl SieveReport {
    pub fn ranking(&self) -> &[usize] {
        match self.measure {
            SieveMeasure::Purity => &self.purity_ranking,
            SieveMeasure::Entropy => &self.entropy_ranking,
        }
    }

    pub fn ranked_labels(&self) -> Vec<&str> {
        self.ranking().iter().map(|&i| self.candidates[i].label.as_str()).collect()
    }

    pub fn top(&self) -> &SieveCandidate {
        &self.candidates[self.ranking()[0]]
    }

    /// Columns `label, t, purity, entropy`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,t,purity,entropy\n");
        for cand in &self.candidates {
            for (k, t) in self.times.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    cand.label,
                    fmt_f64(*t),
                    fmt_f64(cand.purity[k]),
                    fmt_f64(cand.entropy[k])
                ));
            }
        }
        out
    }
}

fn quantized(x: f64) -> i64 {
    (x * 1e12).round() as i64
}

fn rank_by(cands: &[SieveCandidate], key: impl Fn(&SieveCandidate) -> i64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..cands.len()).collect();
    idx.sort_by(|&a, &b| key(&cands[a]).cmp(&key(&cands[b])).then_with(|| cands[a].label.cmp(&cands[b].label)));
    idx
}

/// Evolves every labelled candidate under `dynamics` and ranks them at the
/// last time. A zero time is prepended to `times` when absent.
pub fn predictability_sieve(
    dynamics: &dyn ReducedDynamics,
    candidates: &[(String, StateVector)],
    times: &[f64],
    measure: SieveMeasure,
) -> Result<SieveReport> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("candidate list is empty".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) || times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidArgument("time grid must be finite, non-negative and increasing".into()));
    }
    let mut grid = times.to_vec();
    if grid.first() != Some(&0.0) {
        grid.insert(0, 0.0);
    }
    for (label, psi) in candidates {
        if psi.dim() != dynamics.system_dim() {
            return Err(Error::DimensionMismatch(format!("candidate {label} has dimension {}", psi.dim())));
        }
        let norm = psi.amplitudes().norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
    }
    let evaluated = candidates
        .par_iter()
        .map(|(label, psi)| {
            let states = dynamics.reduced_states(psi, &grid)?;
            let purity = states.iter().map(purity).collect::<Result<Vec<_>>>()?;
            let entropy = states.iter().map(entropy).collect::<Result<Vec<_>>>()?;
            Ok(SieveCandidate { label: label.clone(), initial: psi.clone(), purity, entropy })
        })
        .collect::<Result<Vec<_>>>()?;
    let purity_ranking = rank_by(&evaluated, |c| -quantized(*c.purity.last().expect("non-empty")));
    let entropy_ranking = rank_by(&evaluated, |c| quantized(*c.entropy.last().expect("non-empty")));
    Ok(SieveReport { times: grid, candidates: evaluated, measure, purity_ranking, entropy_ranking })
}
