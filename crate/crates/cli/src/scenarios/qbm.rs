use std::path::PathBuf;

use decohere_core::dynamics::evolve_with;
use decohere_core::dynamics::series::format_csv;
use decohere_core::models::oscillator::{tail_population, truncation_certified};
use decohere_core::models::{caldeira_leggett_spec, uniform_grid, wigner_transform_oscillator, CaldeiraLeggettParams};
use decohere_core::quantum::{purity, StateVector};
use serde::{Deserialize, Serialize};

use super::check_positive;
use crate::output::Output;
use crate::{CliError, CliResult, Scenario};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialOscillator {
    Coherent { x0: f64, #[serde(default)] p0: f64 },
    /// Even superposition of coherent states at `±x0`.
    Cat { x0: f64 },
    Fock { n: usize },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerOptions {
    /// Position grid points.
    pub n_grid: usize,
    /// Position spacing (length).
    pub spacing: f64,
    /// Dump every `every`-th recorded snapshot.
    #[serde(default = "one")]
    pub every: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QbmConfig {
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Oscillator and bath: `mass`, `omega`, `gamma0`, `cutoff`, `temperature`,
    /// `n_max`, `pure_decoherence`.
    pub params: CaldeiraLeggettParams,
    pub initial: InitialOscillator,
    pub t_final: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub wigner: Option<WignerOptions>,
}

fn default_dt() -> f64 {
    5e-3
}

fn default_stride() -> usize {
    20
}

impl Scenario for QbmConfig {
    const NAME: &'static str = "qbm";

    fn output(&self) -> Option<PathBuf> {
        self.output.clone()
    }

    fn run(&self, out: &mut Output) -> CliResult<Vec<String>> {
        check_positive("t_final", self.t_final)?;
        let cl = caldeira_leggett_spec(self.params)?;
        let psi: StateVector = match self.initial {
            InitialOscillator::Coherent { x0, p0 } => cl.basis.coherent_state(x0, p0),
            InitialOscillator::Cat { x0 } => cl.basis.cat_state(x0),
            InitialOscillator::Fock { n } => cl.basis.fock_state(n)?,
        };
        let series = evolve_with(&cl, &psi.to_density(), self.t_final, self.dt, self.stride)?;
        let x = &cl.basis.x;
        let x2 = x * x;
        let h = cl.hamiltonian();
        let levels = (cl.basis.dim() / 10).max(2);
        let rows = series
            .times
            .iter()
            .zip(&series.states)
            .map(|(t, s)| {
                let mx = s.expectation(x).re;
                Ok(vec![
                    *t,
                    mx,
                    s.expectation(&x2).re - mx * mx,
                    s.expectation(h).re,
                    purity(s)?,
                    tail_population(s, levels),
                ])
            })
            .collect::<CliResult<Vec<_>>>()?;
        out.write("qbm.csv", &format_csv(&["t", "mean_x", "var_x", "energy", "purity", "tail"], &rows))?;
        let certified = series.states.iter().all(truncation_certified);
        let mut lines = vec![format!(
            "qbm: {} snapshots, D = {:.6e}, truncation {}",
            series.len(),
            cl.diffusion(),
            if certified { "certified" } else { "NOT certified (raise n_max)" }
        )];
        if let Some(w) = &self.wigner {
            if w.every == 0 {
                return Err(CliError::Config("`wigner.every` must be >= 1".into()));
            }
            let grid = uniform_grid(w.n_grid, w.spacing);
            let mut index = Vec::new();
            for (k, (t, s)) in series.times.iter().zip(&series.states).enumerate().step_by(w.every) {
                let wg = wigner_transform_oscillator(s, &cl.basis, grid.clone(), None)?;
                out.write(&format!("wigner_{k:05}.csv"), &wg.to_csv())?;
                index.push(vec![k as f64, *t, wg.negative_volume(), wg.max_abs_in(-0.25 * w.spacing, 0.25 * w.spacing)]);
            }
            out.write("wigner_index.csv", &format_csv(&["snapshot", "t", "negative_volume", "w_abs_at_origin"], &index))?;
            lines.push(format!("qbm: {} Wigner dumps", index.len()));
        }
        Ok(lines)
    }
}
