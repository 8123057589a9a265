use std::path::PathBuf;

use decohere_core::pointer::{collective_dfs, collective_sz, dfs_certificate, dfs_find, DfsResult, InteractionSpec};
use decohere_core::quantum::linalg::{embed, frobenius, pauli_z};
use decohere_core::quantum::{Operator, StateVector};
use serde::{Deserialize, Serialize};

use crate::output::Output;
use crate::{CliError, CliResult, Scenario};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfsConfig {
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Number of system qubits.
    pub n: usize,
    /// Collective dephasing `S_z ⊗ E`; otherwise each qubit couples to its own environment spin.
    #[serde(default = "yes")]
    pub collective: bool,
    /// Times at which the entanglement certificate is evaluated.
    #[serde(default = "default_times")]
    pub certificate_times: Vec<f64>,
}

fn yes() -> bool {
    true
}

fn default_times() -> Vec<f64> {
    vec![0.3, 0.7, 1.3, 2.9, 5.1]
}

const MAX_EXPLICIT: usize = 8;

#[derive(Debug, Clone, Serialize)]
struct DfsReport {
    n: usize,
    collective: bool,
    dimension: f64,
    log2_dimension: f64,
    logical_qubits: usize,
    efficiency: Option<f64>,
    stirling_log2: Option<f64>,
    odd: Option<bool>,
    eigenvalues: Vec<f64>,
    labels: Vec<String>,
    basis: serde_json::Value,
    certificate_max_entropy: Option<f64>,
    search_projector_distance: Option<f64>,
}

fn label(psi: &StateVector) -> String {
    let amps = psi.amplitudes();
    let n = psi.dims().len();
    match amps.iter().position(|a| (a.norm() - 1.0).abs() < 1e-12) {
        Some(i) => format!("{:0n$b}", i, n = n),
        None => "superposition".into(),
    }
}

fn spec_for(n: usize, collective: bool) -> CliResult<InteractionSpec> {
    let env = Operator::pauli_z();
    if collective {
        return Ok(InteractionSpec::new(vec![(collective_sz(n)?, env)])?);
    }
    let dims = vec![2; n];
    let terms = (0..n)
        .map(|j| {
            let s = Operator::new(embed(&pauli_z(), j, &dims), dims.clone())?;
            let env_dims = vec![2; n];
            let e = Operator::new(embed(&pauli_z(), j, &env_dims), env_dims)?;
            Ok((s, e))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(InteractionSpec::new(terms)?)
}

impl Scenario for DfsConfig {
    const NAME: &'static str = "dfs";

    fn output(&self) -> Option<PathBuf> {
        self.output.clone()
    }

    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }

    fn run(&self, out: &mut Output) -> CliResult<Vec<String>> {
        if self.n == 0 {
            return Err(CliError::Config("`n` must be at least 1".into()));
        }
        if !self.collective && self.n > MAX_EXPLICIT / 2 {
            return Err(CliError::Config(format!(
                "independent dephasing is limited to n <= {}",
                MAX_EXPLICIT / 2
            )));
        }
        let explicit = self.n <= MAX_EXPLICIT;
        let spec = if explicit { Some(spec_for(self.n, self.collective)?) } else { None };
        let (dfs, mut report): (Option<DfsResult>, DfsReport) = if self.collective {
            let c = collective_dfs(self.n)?;
            let r = DfsReport {
                n: self.n,
                collective: true,
                dimension: c.dimension,
                log2_dimension: c.log2_dimension(),
                logical_qubits: c.logical_qubits(),
                efficiency: Some(c.efficiency),
                stirling_log2: Some(c.stirling_log2),
                odd: Some(c.odd),
                eigenvalues: vec![c.m as f64],
                labels: Vec::new(),
                basis: serde_json::Value::Null,
                certificate_max_entropy: None,
                search_projector_distance: None,
            };
            (c.dfs, r)
        } else {
            let d = dfs_find(spec.as_ref().expect("explicit"))?;
            let dim = d.dimension as f64;
            let r = DfsReport {
                n: self.n,
                collective: false,
                dimension: dim,
                log2_dimension: if dim > 0.0 { dim.log2() } else { f64::NEG_INFINITY },
                logical_qubits: if dim > 0.0 { (dim.log2() + 1e-12).floor() as usize } else { 0 },
                efficiency: None,
                stirling_log2: None,
                odd: None,
                eigenvalues: d.eigenvalues.clone(),
                labels: Vec::new(),
                basis: serde_json::Value::Null,
                certificate_max_entropy: None,
                search_projector_distance: None,
            };
            (Some(d), r)
        };
        if let Some(d) = &dfs {
            report.labels = d.basis.iter().map(label).collect();
            report.basis = d.basis_json();
            if let Some(spec) = &spec {
                let env = StateVector::plus();
                let env = if spec.env_dim() == 2 {
                    env
                } else {
                    let plus = vec![StateVector::plus(); self.n];
                    decohere_core::quantum::tensor_all(&plus).expect("n >= 1")
                };
                report.certificate_max_entropy =
                    Some(dfs_certificate(spec, d, &env, &self.certificate_times, self.seed)?);
                if self.collective {
                    let found = dfs_find(spec)?;
                    report.search_projector_distance = Some(frobenius(&(found.projector() - d.projector())));
                }
            }
        }
        out.write_json("dfs.json", &report)?;
        let mut lines = vec![format!("dimension {}", report.dimension)];
        if !report.labels.is_empty() {
            lines.push(format!("basis {}", report.labels.join(" ")));
        }
        if let Some(e) = report.certificate_max_entropy {
            lines.push(format!("max system-environment entropy {e:.3e} bits"));
        }
        Ok(lines)
    }
}
