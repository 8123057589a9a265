use std::path::PathBuf;

use decohere_core::dynamics::LindbladSpec;
use decohere_core::models::{caldeira_leggett_spec, CaldeiraLeggettParams, SpinEnvironment};
use decohere_core::pointer::{predictability_sieve, GeneratorDynamics, SieveMeasure, SieveReport, SpinSpinDynamics};
use decohere_core::quantum::{Operator, StateVector};
use serde::{Deserialize, Serialize};

use super::{check_positive, qubit_state, time_grid};
use crate::output::Output;
use crate::{CliError, CliResult, Scenario};

const QUBIT_LABELS: [&str; 6] = ["0", "1", "+", "-", "+i", "-i"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SieveModel {
    /// Qubit with `H = ½ω σz` and `L = σz` at rate `kappa`.
    Dephasing {
        kappa: f64,
        #[serde(default)]
        omega: f64,
    },
    /// Exact spin–spin model; environment spins start in `|+⟩`.
    SpinSpin {
        couplings: Vec<f64>,
        #[serde(default)]
        delta0: f64,
        #[serde(default)]
        omega0: f64,
    },
    /// Caldeira–Leggett oscillator; candidates are built around amplitude `x0`.
    Qbm { params: CaldeiraLeggettParams, x0: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SieveConfig {
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub model: SieveModel,
    /// Ranking time (time).
    pub horizon: f64,
    #[serde(default = "default_n_times")]
    pub n_times: usize,
    #[serde(default)]
    pub measure: SieveMeasure,
    /// Integration step for master-equation models.
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_n_times() -> usize {
    41
}

fn default_dt() -> f64 {
    2e-3
}

#[derive(Debug, Clone, Serialize)]
struct RankedCandidate {
    label: String,
    purity: f64,
    entropy: f64,
}

#[derive(Debug, Clone, Serialize)]
struct Ranking {
    measure: SieveMeasure,
    horizon: f64,
    ranking: Vec<RankedCandidate>,
}

fn qubit_candidates() -> CliResult<Vec<(String, StateVector)>> {
    QUBIT_LABELS.iter().map(|l| Ok((l.to_string(), qubit_state(l)?))).collect()
}

fn superpose(a: &StateVector, b: &StateVector) -> CliResult<StateVector> {
    Ok(StateVector::normalized(a.amplitudes() + b.amplitudes(), a.dims().to_vec())?)
}

impl SieveConfig {
    fn report(&self, times: &[f64]) -> CliResult<SieveReport> {
        check_positive("dt", self.dt)?;
        let report = match &self.model {
            SieveModel::Dephasing { kappa, omega } => {
                let h = Operator::new(Operator::pauli_z().matrix() * decohere_core::quantum::re(0.5 * omega), vec![2])?;
                let spec = LindbladSpec::new(h, vec![(Operator::pauli_z(), *kappa)])?;
                predictability_sieve(&GeneratorDynamics::new(&spec, self.dt), &qubit_candidates()?, times, self.measure)?
            }
            SieveModel::SpinSpin { couplings, delta0, omega0 } => {
                if couplings.is_empty() {
                    return Err(CliError::Config("`model.couplings` must not be empty".into()));
                }
                let env = SpinEnvironment::all_plus(couplings.clone(), *delta0, *omega0)?;
                predictability_sieve(&SpinSpinDynamics { env }, &qubit_candidates()?, times, self.measure)?
            }
            SieveModel::Qbm { params, x0 } => {
                let cl = caldeira_leggett_spec(*params)?;
                let b = &cl.basis;
                let candidates = vec![
                    ("coherent(x0)".to_string(), b.coherent_state(*x0, 0.0)),
                    ("coherent(0)".to_string(), b.coherent_state(0.0, 0.0)),
                    ("fock(1)".to_string(), b.fock_state(1)?),
                    ("fock(2)".to_string(), b.fock_state(2)?),
                    ("cat(x0)".to_string(), b.cat_state(*x0)),
                    ("fock(0)+fock(4)".to_string(), superpose(&b.fock_state(0)?, &b.fock_state(4)?)?),
                ];
                predictability_sieve(&GeneratorDynamics::new(&cl, self.dt), &candidates, times, self.measure)?
            }
        };
        Ok(report)
    }
}

impl Scenario for SieveConfig {
    const NAME: &'static str = "sieve";

    fn output(&self) -> Option<PathBuf> {
        self.output.clone()
    }

    fn run(&self, out: &mut Output) -> CliResult<Vec<String>> {
        let times = time_grid(self.horizon, self.n_times)?;
        let report = self.report(&times)?;
        out.write("sieve.csv", &report.to_csv())?;
        let ranking = Ranking {
            measure: self.measure,
            horizon: self.horizon,
            ranking: report
                .ranking()
                .iter()
                .map(|&i| {
                    let c = &report.candidates[i];
                    RankedCandidate {
                        label: c.label.clone(),
                        purity: *c.purity.last().expect("nonempty"),
                        entropy: *c.entropy.last().expect("nonempty"),
                    }
                })
                .collect(),
        };
        out.write_json("ranking.json", &ranking)?;
        Ok(vec![format!("sieve: ranking {}", report.ranked_labels().join(" > "))])
    }
}
