pub mod collisional;
pub mod dfs;
pub mod estimate;
pub mod evolve;
pub mod qbm;
pub mod qec;
pub mod sieve;
pub mod spin;

use decohere_core::dynamics::series::fmt_f64;
use decohere_core::quantum::{c, CVector, StateVector};

use crate::{CliError, CliResult};

/// Single-qubit state from a label: `0`, `1`, `+`, `-`, `+i`, `-i`.
pub fn qubit_state(label: &str) -> CliResult<StateVector> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps = match label {
        "0" => [c(1.0, 0.0), c(0.0, 0.0)],
        "1" => [c(0.0, 0.0), c(1.0, 0.0)],
        "+" => [c(s, 0.0), c(s, 0.0)],
        "-" => [c(s, 0.0), c(-s, 0.0)],
        "+i" => [c(s, 0.0), c(0.0, s)],
        "-i" => [c(s, 0.0), c(0.0, -s)],
        other => {
            return Err(CliError::Config(format!(
                "unknown qubit state `{other}` (expected 0, 1, +, -, +i or -i)"
            )))
        }
    };
    Ok(StateVector::new(CVector::from_vec(amps.to_vec()), vec![2])?)
}

/// `n` equally spaced times on `[0, t_final]`, both ends included.
pub fn time_grid(t_final: f64, n: usize) -> CliResult<Vec<f64>> {
    if !(t_final > 0.0) || !t_final.is_finite() || n < 2 {
        return Err(CliError::Config(format!("need t_final > 0 and n_times >= 2, got {t_final} and {n}")));
    }
    Ok((0..n).map(|k| t_final * k as f64 / (n - 1) as f64).collect())
}

/// CSV cell for an optional number: empty when absent.
pub fn opt_cell(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn check_positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("`{name}` must be positive, got {v}")))
    }
}
