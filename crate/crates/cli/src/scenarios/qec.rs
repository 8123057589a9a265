use std::path::PathBuf;

use decohere_core::dynamics::series::format_csv;
use decohere_core::qec::{
    fit_power_law, logical_error_csv, logical_error_oracle, logical_error_rate, partial_decoherence_fidelity,
};
use decohere_core::quantum::StateVector;
use serde::{Deserialize, Serialize};

use crate::output::Output;
use crate::{CliError, CliResult, Scenario};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialScan {
    /// Environment qubits entangled with the code block.
    #[serde(default = "one")]
    pub k: usize,
    /// Entangling angles θ (rad).
    pub theta: Vec<f64>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QecConfig {
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Independent phase-flip probabilities.
    #[serde(default = "default_p")]
    pub p: Vec<f64>,
    #[serde(default = "default_shots")]
    pub shots: usize,
    #[serde(default)]
    pub partial: Option<PartialScan>,
}

fn default_p() -> Vec<f64> {
    vec![0.01, 0.02, 0.05]
}

fn default_shots() -> usize {
    100_000
}

#[derive(Debug, Clone, Serialize)]
struct Fit {
    exponent: f64,
    coefficient: f64,
    oracle: Vec<[f64; 2]>,
}

impl Scenario for QecConfig {
    const NAME: &'static str = "qec";

    fn output(&self) -> Option<PathBuf> {
        self.output.clone()
    }

    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }

    fn run(&self, out: &mut Output) -> CliResult<Vec<String>> {
        if self.p.is_empty() {
            return Err(CliError::Config("`p` must list at least one probability".into()));
        }
        let points = self
            .p
            .iter()
            .map(|&p| logical_error_rate(p, self.shots, self.seed))
            .collect::<Result<Vec<_>, _>>()?;
        out.write("qec.csv", &logical_error_csv(&points))?;
        let mut lines: Vec<String> = points
            .iter()
            .map(|r| format!("qec: p = {} uncorrected {:.5} corrected {:.5}", r.p, r.uncorrected, r.corrected))
            .collect();
        match fit_power_law(&points) {
            Ok((exponent, coefficient)) => {
                let oracle = self.p.iter().map(|&p| [p, logical_error_oracle(p)]).collect();
                out.write_json("fit.json", &Fit { exponent, coefficient, oracle })?;
                lines.push(format!("qec: corrected rate ~ {coefficient:.3} p^{exponent:.3}"));
            }
            Err(e) => lines.push(format!("qec: no power-law fit ({e})")),
        }
        if let Some(scan) = &self.partial {
            let plus = StateVector::plus();
            let rows = scan
                .theta
                .iter()
                .map(|&th| {
                    let (raw, fixed) = partial_decoherence_fidelity(&plus, scan.k, th)?;
                    Ok(vec![th, raw, fixed])
                })
                .collect::<CliResult<Vec<_>>>()?;
            out.write("partial.csv", &format_csv(&["theta", "fidelity_uncorrected", "fidelity_corrected"], &rows))?;
        }
        Ok(lines)
    }
}
