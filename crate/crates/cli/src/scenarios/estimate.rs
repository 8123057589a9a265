use std::path::PathBuf;

use decohere_core::dynamics::series::{fmt_f64, format_csv};
use decohere_core::models::estimates::timescale_ratio_with;
use decohere_core::models::{table1_scenarios, visibility_vs_pressure, Table1Config};
use serde::{Deserialize, Serialize};

use super::opt_cell;
use crate::output::Output;
use crate::{CliError, CliResult, Scenario};

/// Visibility of a molecular interferometer against background pressure.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisibilityScan {
    /// Collision rate per unit pressure (1/(s·Pa)).
    pub gamma_per_pressure: f64,
    /// Transit time through the interferometer (s).
    pub t_transit: f64,
    /// Pressures (Pa).
    pub pressures: Vec<f64>,
    /// Visibility at zero pressure.
    #[serde(default = "unit")]
    pub v0: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Object mass (g).
    pub mass_g: f64,
    /// Temperature (K).
    pub temp_k: f64,
    /// Superposition separation (cm).
    pub dx_cm: f64,
    /// Relaxation time (s).
    #[serde(default = "unit")]
    pub tau_r: f64,
    /// Scattering constants for the environment/object table.
    #[serde(default)]
    pub table1: Option<Table1Config>,
    #[serde(default)]
    pub visibility: Option<VisibilityScan>,
}

impl Scenario for EstimateConfig {
    const NAME: &'static str = "estimate";

    fn output(&self) -> Option<PathBuf> {
        self.output.clone()
    }

    fn run(&self, out: &mut Output) -> CliResult<Vec<String>> {
        let report = timescale_ratio_with(self.mass_g * 1e-3, self.temp_k, self.dx_cm * 1e-2, self.tau_r)?;
        out.write_json("estimate.json", &report)?;
        let mut lines = vec![format!(
            "tau_r/tau_d = {:.4e} (log10 {:.3}), lambda_dB = {:.4e} m, tau_d = {:.4e} s",
            report.ratio,
            report.ratio.log10(),
            report.lambda_db,
            report.tau_d
        )];
        if let Some(table) = &self.table1 {
            let rows = table1_scenarios(table)?;
            let mut text = String::from("environment,object,dx,tau_d,reference\n");
            for r in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.environment.name(),
                    r.object.name(),
                    fmt_f64(r.dx),
                    opt_cell(r.tau_d),
                    fmt_f64(r.reference)
                ));
            }
            out.write("table1.csv", &text)?;
            let computed = rows.iter().filter(|r| r.tau_d.is_some()).count();
            lines.push(format!("table: {computed} of {} cells computed", rows.len()));
        }
        if let Some(v) = &self.visibility {
            if !(v.gamma_per_pressure >= 0.0) || !(v.t_transit >= 0.0) || v.pressures.iter().any(|p| !(*p >= 0.0)) {
                return Err(CliError::Config("visibility parameters must be nonnegative".into()));
            }
            let vis = visibility_vs_pressure(v.gamma_per_pressure, v.t_transit, &v.pressures, v.v0);
            let rows: Vec<Vec<f64>> = v.pressures.iter().zip(&vis).map(|(p, x)| vec![*p, *x]).collect();
            out.write("visibility.csv", &format_csv(&["pressure", "visibility"], &rows))?;
        }
        Ok(lines)
    }
}
