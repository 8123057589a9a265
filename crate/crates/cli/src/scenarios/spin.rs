use std::path::PathBuf;

use decohere_core::dynamics::SpectralDensity;
use decohere_core::dynamics::evolve_with;
use decohere_core::dynamics::series::{fmt_f64, format_csv};
use decohere_core::models::{
    spin_boson_born_markov_spec, spin_boson_exact_dephasing, spin_spin_exact, SpinEnvironment,
};
use decohere_core::quantum::purity;
use serde::{Deserialize, Serialize};

use super::{opt_cell, qubit_state, time_grid};
use crate::output::Output;
use crate::{CliError, CliResult, Scenario};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinBosonConfig {
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// `J(ω)`, e.g. `{ kind = "ohmic-lorentz-cutoff", mass, gamma0, cutoff }`.
    pub spectral_density: SpectralDensity,
    /// Bath temperature (energy units, `k_B = ħ = 1`).
    pub temperature: f64,
    /// Level splitting `ω₀`; only the Born–Markov comparison uses it.
    #[serde(default)]
    pub omega0: f64,
    /// Tunnelling `Δ₀`; only the Born–Markov comparison uses it.
    #[serde(default)]
    pub delta0: f64,
    pub t_final: f64,
    #[serde(default = "default_n_times")]
    pub n_times: usize,
    /// Step for the Born–Markov integration.
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_n_times() -> usize {
    201
}

fn default_dt() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Serialize)]
struct SpinBosonSummary {
    one_over_e_time: Option<f64>,
    born_markov_one_over_e_time: Option<f64>,
    n_osc: usize,
    discretization_change: f64,
    born_markov_dephasing: f64,
    born_markov_zeta: [f64; 2],
}

fn crossing(times: &[f64], values: &[f64]) -> Option<f64> {
    decohere_core::models::spin_boson::first_crossing(times, values, (-1.0f64).exp())
}

impl Scenario for SpinBosonConfig {
    const NAME: &'static str = "spinboson";

    fn output(&self) -> Option<PathBuf> {
        self.output.clone()
    }

    fn run(&self, out: &mut Output) -> CliResult<Vec<String>> {
        let times = time_grid(self.t_final, self.n_times)?;
        let exact = spin_boson_exact_dephasing(&self.spectral_density, self.temperature, &times)?;
        let bm = spin_boson_born_markov_spec(&self.spectral_density, self.temperature, self.omega0, self.delta0)?;
        let rho0 = qubit_state("+")?.to_density();
        let c0 = rho0.matrix()[(0, 1)].norm();
        let mut bm_coherence = Vec::with_capacity(times.len());
        let mut rho = rho0;
        let mut t_prev = 0.0;
        for &t in &times {
            if t > t_prev {
                rho = evolve_with(&bm, &rho, t - t_prev, self.dt, usize::MAX)?.last().clone();
                t_prev = t;
            }
            bm_coherence.push(rho.matrix()[(0, 1)].norm() / c0);
        }
        let rows: Vec<Vec<f64>> = times
            .iter()
            .zip(exact.coherence.iter().zip(&bm_coherence))
            .map(|(t, (e, b))| vec![*t, *e, *b])
            .collect();
        out.write("dephasing.csv", &format_csv(&["t", "coherence_exact", "coherence_born_markov"], &rows))?;
        let summary = SpinBosonSummary {
            one_over_e_time: exact.one_over_e_time(),
            born_markov_one_over_e_time: crossing(&times, &bm_coherence),
            n_osc: exact.n_osc,
            discretization_change: exact.discretization_change,
            born_markov_dephasing: bm.dephasing,
            born_markov_zeta: [bm.zeta.re, bm.zeta.im],
        };
        out.write_json("summary.json", &summary)?;
        Ok(vec![format!(
            "spinboson: 1/e time exact = {}, Born-Markov = {} ({} oscillators)",
            show(summary.one_over_e_time),
            show(summary.born_markov_one_over_e_time),
            exact.n_osc
        )])
    }
}

fn show(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_else(|| "not reached".into())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSpinConfig {
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Couplings `g_k` of `H_int = ½ σz ⊗ Σ_k g_k σz⁽ᵏ⁾`.
    pub couplings: Vec<f64>,
    #[serde(default)]
    pub delta0: f64,
    #[serde(default)]
    pub omega0: f64,
    /// System qubit label (`0`, `1`, `+`, `-`, `+i`, `-i`); environment spins start in `|+⟩`.
    #[serde(default = "plus")]
    pub initial: String,
    pub t_final: f64,
    #[serde(default = "default_n_times")]
    pub n_times: usize,
}

fn plus() -> String {
    "+".into()
}

impl Scenario for SpinSpinConfig {
    const NAME: &'static str = "spinspin";

    fn output(&self) -> Option<PathBuf> {
        self.output.clone()
    }

    fn run(&self, out: &mut Output) -> CliResult<Vec<String>> {
        if self.couplings.is_empty() {
            return Err(CliError::Config("`couplings` must not be empty".into()));
        }
        let times = time_grid(self.t_final, self.n_times)?;
        let env = SpinEnvironment::all_plus(self.couplings.clone(), self.delta0, self.omega0)?;
        let psi0 = qubit_state(&self.initial)?;
        let res = spin_spin_exact(&env, &psi0, &times)?;
        let mut text = String::from("t,rho00,rho11,re_rho01,im_rho01,purity,decoherence\n");
        for (k, (t, r)) in res.times.iter().zip(&res.reduced).enumerate() {
            let m = r.matrix();
            let z = res.decoherence.as_ref().map(|d| d[k]);
            text.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                fmt_f64(*t),
                fmt_f64(m[(0, 0)].re),
                fmt_f64(m[(1, 1)].re),
                fmt_f64(m[(0, 1)].re),
                fmt_f64(m[(0, 1)].im),
                fmt_f64(purity(r)?),
                opt_cell(z)
            ));
        }
        out.write("spinspin.csv", &text)?;
        let last = res.reduced.last().expect("nonempty time grid");
        Ok(vec![format!(
            "spinspin: {} environment spins, final system purity {:.6}",
            env.n(),
            purity(last)?
        )])
    }
}
