use std::path::PathBuf;

use decohere_core::dynamics::series::format_csv;
use decohere_core::models::{evolve_collisional, localization_rate, uniform_grid, GridState, Regime, ScatteringModel};
use serde::{Deserialize, Serialize};

use super::check_positive;
use crate::output::Output;
use crate::{CliError, CliResult, Scenario};

/// Maxwell–Boltzmann scatterers, SI units.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalGas {
    /// Number density (1/m³).
    pub number_density: f64,
    /// Scatterer mass (kg).
    pub particle_mass: f64,
    /// Temperature (K).
    pub temperature: f64,
    /// Total cross-section (m²).
    pub cross_section: f64,
}

/// Cat state `ψ ∝ G(x+d/2) + G(x−d/2)` on a grid, evolved under the
/// collisional master equation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Superposition {
    /// Grid points.
    pub n_grid: usize,
    /// Grid spacing (length).
    pub spacing: f64,
    /// Separation of the two packets (length).
    pub separation: f64,
    /// Packet width (length).
    pub sigma: f64,
    /// Sample times (time).
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollisionalConfig {
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub regime: Regime,
    /// Kinetic gas; alternative to `table`.
    #[serde(default)]
    pub gas: Option<ThermalGas>,
    /// Tabulated scatterers `k, density, speed, cross_section` (consistent units).
    #[serde(default)]
    pub table: Option<ScatteringTable>,
    /// Separations for the `F(Δx)` scan, log-spaced from `dx_min` to `dx_max` (length).
    pub dx_min: f64,
    pub dx_max: f64,
    #[serde(default = "default_n_dx")]
    pub n_dx: usize,
    #[serde(default)]
    pub superposition: Option<Superposition>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringTable {
    pub k: Vec<f64>,
    pub density: Vec<f64>,
    pub speed: Vec<f64>,
    pub cross_section: Vec<f64>,
}

fn default_n_dx() -> usize {
    61
}

impl CollisionalConfig {
    pub fn model(&self) -> CliResult<ScatteringModel> {
        match (&self.gas, &self.table) {
            (Some(g), None) => Ok(ScatteringModel::thermal_gas(
                g.number_density,
                g.particle_mass,
                g.temperature,
                g.cross_section,
                self.regime,
            )?),
            (None, Some(t)) => Ok(ScatteringModel::new(
                t.k.clone(),
                t.density.clone(),
                t.speed.clone(),
                t.cross_section.clone(),
                self.regime,
            )?),
            _ => Err(CliError::Config("give exactly one of `gas` and `table`".into())),
        }
    }
}

impl Scenario for CollisionalConfig {
    const NAME: &'static str = "collisional";

    fn output(&self) -> Option<PathBuf> {
        self.output.clone()
    }

    fn run(&self, out: &mut Output) -> CliResult<Vec<String>> {
        let model = self.model()?;
        let rates = model.rates()?;
        check_positive("dx_min", self.dx_min)?;
        check_positive("dx_max", self.dx_max)?;
        if self.n_dx < 2 || self.dx_max <= self.dx_min {
            return Err(CliError::Config("need n_dx >= 2 and dx_max > dx_min".into()));
        }
        let ratio = (self.dx_max / self.dx_min).ln();
        let rows = (0..self.n_dx)
            .map(|i| {
                let dx = self.dx_min * (ratio * i as f64 / (self.n_dx - 1) as f64).exp();
                let f = localization_rate(&model, dx)?;
                Ok(vec![dx, f, rates.lambda * dx * dx, rates.gamma_tot])
            })
            .collect::<CliResult<Vec<_>>>()?;
        out.write("localization.csv", &format_csv(&["dx", "F", "lambda_dx2", "gamma_tot"], &rows))?;
        out.write_json("rates.json", &rates)?;
        let mut lines = vec![format!(
            "collisional: Gamma_tot = {:.6e}, Lambda = {:.6e}",
            rates.gamma_tot, rates.lambda
        )];
        if let Some(s) = &self.superposition {
            let x = uniform_grid(s.n_grid, s.spacing);
            let half = 0.5 * s.separation;
            let state = GridState::gaussian_superposition(x, &[-half, half], s.sigma)?;
            let norm0 = state.cross_block_norm(0.0);
            let rows = s
                .times
                .iter()
                .map(|&t| {
                    let evolved = evolve_collisional(&state, &model, t)?;
                    let n = evolved.cross_block_norm(0.0);
                    Ok(vec![t, n, n / norm0])
                })
                .collect::<CliResult<Vec<_>>>()?;
            out.write("interference.csv", &format_csv(&["t", "cross_norm", "relative"], &rows))?;
            lines.push(format!("collisional: interference norm sampled at {} times", rows.len()));
        }
        Ok(lines)
    }
}
