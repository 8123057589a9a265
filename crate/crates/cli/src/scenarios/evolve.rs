use std::path::PathBuf;

use decohere_core::dynamics::series::{density_series_csv, format_csv};
use decohere_core::dynamics::{evolve_with, unravel, LindbladSpec, TrajectoryConfig};
use decohere_core::quantum::linalg::{embed, pauli_x, pauli_z};
use decohere_core::quantum::{re, tensor_all, trace_distance, CMatrix, Operator, StateVector};
use serde::{Deserialize, Serialize};

use super::{check_positive, qubit_state};
use crate::output::Output;
use crate::{CliError, CliResult, Scenario};

/// Register of qubits with `H = Σ_j ½ω_j σz⁽ʲ⁾ + ½Δ_j σx⁽ʲ⁾`, dephasing
/// `L = σz⁽ʲ⁾` at rate `κ_j` and decay `L = σ₋⁽ʲ⁾` at rate `γ_j`.
/// Missing per-qubit lists mean zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSystem {
    #[serde(default = "one")]
    pub n_qubits: usize,
    /// Level splittings `ω_j` (1/time).
    #[serde(default)]
    pub omega: Vec<f64>,
    /// Transverse fields `Δ_j` (1/time).
    #[serde(default)]
    pub delta: Vec<f64>,
    /// Dephasing rates `κ_j` (1/time).
    #[serde(default)]
    pub dephasing: Vec<f64>,
    /// Decay rates `γ_j` (1/time).
    #[serde(default)]
    pub damping: Vec<f64>,
    /// Initial product state, one label per qubit (`0`, `1`, `+`, `-`, `+i`, `-i`).
    #[serde(default)]
    pub initial: Vec<String>,
}

fn one() -> usize {
    1
}

fn per_qubit(name: &str, v: &[f64], n: usize) -> CliResult<Vec<f64>> {
    match v.len() {
        0 => Ok(vec![0.0; n]),
        l if l == n => Ok(v.to_vec()),
        l => Err(CliError::Config(format!("`system.{name}` has {l} entries for {n} qubits"))),
    }
}

impl QubitSystem {
    pub fn spec(&self) -> CliResult<LindbladSpec> {
        let n = self.n_qubits;
        if n == 0 || n > 6 {
            return Err(CliError::Config(format!("`system.n_qubits` must be in 1..=6, got {n}")));
        }
        let dims = vec![2; n];
        let d = 1 << n;
        let omega = per_qubit("omega", &self.omega, n)?;
        let delta = per_qubit("delta", &self.delta, n)?;
        let kappa = per_qubit("dephasing", &self.dephasing, n)?;
        let gamma = per_qubit("damping", &self.damping, n)?;
        let lower = CMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(0.0), re(0.0)]);
        let mut h = CMatrix::zeros(d, d);
        let mut terms = Vec::new();
        for j in 0..n {
            h += embed(&pauli_z(), j, &dims) * re(0.5 * omega[j]) + embed(&pauli_x(), j, &dims) * re(0.5 * delta[j]);
            if kappa[j] != 0.0 {
                terms.push((Operator::new(embed(&pauli_z(), j, &dims), dims.clone())?, kappa[j]));
            }
            if gamma[j] != 0.0 {
                terms.push((Operator::new(embed(&lower, j, &dims), dims.clone())?, gamma[j]));
            }
        }
        Ok(LindbladSpec::new(Operator::new(h, dims)?, terms)?)
    }

    pub fn initial_state(&self) -> CliResult<StateVector> {
        let labels: Vec<String> = if self.initial.is_empty() {
            vec!["+".into(); self.n_qubits]
        } else {
            self.initial.clone()
        };
        if labels.len() != self.n_qubits {
            return Err(CliError::Config(format!(
                "`system.initial` has {} labels for {} qubits",
                labels.len(),
                self.n_qubits
            )));
        }
        let states = labels.iter().map(|l| qubit_state(l)).collect::<CliResult<Vec<_>>>()?;
        Ok(tensor_all(&states).expect("at least one qubit"))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub system: QubitSystem,
    pub t_final: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Record every `stride`-th step.
    #[serde(default = "default_stride")]
    pub stride: usize,
}

fn default_dt() -> f64 {
    1e-3
}

fn default_stride() -> usize {
    10
}

impl Scenario for EvolveConfig {
    const NAME: &'static str = "evolve";

    fn output(&self) -> Option<PathBuf> {
        self.output.clone()
    }

    fn run(&self, out: &mut Output) -> CliResult<Vec<String>> {
        check_positive("t_final", self.t_final)?;
        let spec = self.system.spec()?;
        let psi = self.system.initial_state()?;
        let series = evolve_with(&spec, &psi.to_density(), self.t_final, self.dt, self.stride)?;
        let d = psi.dim();
        out.write("evolve.csv", &density_series_csv(&series.times, &series.states, &[(0, d - 1)])?)?;
        let last = series.last();
        Ok(vec![format!(
            "evolve: {} snapshots to t = {}, final purity {:.6}",
            series.len(),
            self.t_final,
            decohere_core::quantum::purity(last)?
        )])
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoriesConfig {
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    pub system: QubitSystem,
    pub t_final: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    pub n_trajectories: usize,
}

impl Scenario for TrajectoriesConfig {
    const NAME: &'static str = "trajectories";

    fn output(&self) -> Option<PathBuf> {
        self.output.clone()
    }

    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }

    fn run(&self, out: &mut Output) -> CliResult<Vec<String>> {
        check_positive("t_final", self.t_final)?;
        let spec = self.system.spec()?;
        let psi = self.system.initial_state()?;
        let cfg = TrajectoryConfig {
            dt: self.dt,
            t_final: self.t_final,
            n_trajectories: self.n_trajectories,
            master_seed: self.seed,
            record_stride: self.stride,
        };
        let ens = unravel(&spec, &psi, &cfg)?;
        let reference = evolve_with(&spec, &psi.to_density(), self.t_final, self.dt, self.stride)?;
        if reference.times.len() != ens.times.len() {
            return Err(CliError::Config("trajectory and master-equation grids differ".into()));
        }
        let d = psi.dim();
        out.write("trajectories.csv", &density_series_csv(&ens.times, &ens.mean, &[(0, d - 1)])?)?;
        let rows: Vec<Vec<f64>> = ens
            .times
            .iter()
            .zip(ens.mean.iter().zip(&reference.states))
            .map(|(t, (m, r))| vec![*t, trace_distance(m.matrix(), r.matrix())])
            .collect();
        out.write("comparison.csv", &format_csv(&["t", "trace_distance"], &rows))?;
        let worst = ens.records.iter().map(|r| r.max_norm_error).fold(0.0, f64::max);
        let last = rows.last().map(|r| r[1]).unwrap_or(0.0);
        Ok(vec![format!(
            "trajectories: {} runs, trace distance to the master equation at t = {}: {:.3e} (max norm error {:.1e})",
            self.n_trajectories, self.t_final, last, worst
        )])
    }
}
