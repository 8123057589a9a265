use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::series::format_csv;
use crate::error::{Error, Result};
use crate::quantum::{subsystem_entropy, StateVector};
use crate::rng;

/// Largest environment for fragment analysis.
pub const MAX_FRAGMENT_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FragmentConfig {
    /// Random fragments per size; sizes with at most this many subsets are
    /// enumerated exhaustively.
    pub samples: usize,
    pub seed: u64,
}

impl Default for FragmentConfig {
    fn default() -> Self {
        Self { samples: 30, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FragmentPoint {
    pub size: usize,
    /// Mean `I(S:F)` in bits.
    pub mean: f64,
    pub std: f64,
    pub fragments: usize,
}

pub fn fragment_curve_csv(points: &[FragmentPoint]) -> String {
    let rows: Vec<Vec<f64>> =
        points.iter().map(|p| vec![p.size as f64, p.mean, p.std, p.fragments as f64]).collect();
    format_csv(&["size", "mean_bits", "std_bits", "fragments"], &rows)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// `I(S:F) = S(S) + S(F) − S(SF)` for environment fragments of each size.
/// Factor 0 of `psi` is the system, the remaining factors the environment.
pub fn fragment_mutual_information(
    psi: &StateVector,
    sizes: &[usize],
    cfg: &FragmentConfig,
) -> Result<Vec<FragmentPoint>> {
    let n = psi.dims().len().saturating_sub(1);
    if n == 0 {
        return Err(Error::InvalidArgument("state has no environment factors".into()));
    }
    if n > MAX_FRAGMENT_QUBITS {
        return Err(Error::TooLarge(format!("{n} environment factors (limit {MAX_FRAGMENT_QUBITS})")));
    }
    if let Some(bad) = sizes.iter().find(|&&f| f > n) {
        return Err(Error::InvalidArgument(format!("fragment size {bad} exceeds environment size {n}")));
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument("need at least one fragment sample".into()));
    }
    let s_sys = subsystem_entropy(psi, &[0])?;
    sizes
        .par_iter()
        .map(|&f| {
            if f == 0 {
                return Ok(FragmentPoint { size: 0, mean: 0.0, std: 0.0, fragments: 1 });
            }
            let fragments: Vec<Vec<usize>> = if binomial(n, f) <= cfg.samples as f64 {
                combinations(n, f)
            } else {
                let mut rng = rng::stream(cfg.seed, f as u64);
                (0..cfg.samples).map(|_| sample(&mut rng, n, f).into_vec()).collect()
            };
            let values = fragments
                .iter()
                .map(|frag| {
                    let env: Vec<usize> = frag.iter().map(|k| k + 1).collect();
                    let mut joint = vec![0];
                    joint.extend_from_slice(&env);
                    Ok(s_sys + subsystem_entropy(psi, &env)? - subsystem_entropy(psi, &joint)?)
                })
                .collect::<Result<Vec<f64>>>()?;
            let m = values.len() as f64;
            let mean = values.iter().sum::<f64>() / m;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m;
            Ok(FragmentPoint { size: f, mean, std: var.sqrt(), fragments: values.len() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{spin_spin_state, SpinEnvironment};
    use crate::quantum::{c, re, CVector};
    use rand::Rng;

    fn ghz(n_env: usize) -> StateVector {
        let d = 1usize << (n_env + 1);
        let mut v = CVector::zeros(d);
        v[0] = re(1.0);
        v[d - 1] = re(1.0);
        StateVector::normalized(v, vec![2; n_env + 1]).unwrap()
    }

    #[test]
    fn product_state_carries_no_information() {
        let psi = StateVector::qubits(&[0, 1, 0, 1, 1]).unwrap();
        let curve = fragment_mutual_information(&psi, &[0, 1, 2, 3, 4], &FragmentConfig::default()).unwrap();
        assert!(curve.iter().all(|p| p.mean.abs() < 1e-10));
    }

    #[test]
    fn branching_state_plateau() {
        let n = 10;
        let curve = fragment_mutual_information(&ghz(n), &(0..=n).collect::<Vec<_>>(), &FragmentConfig::default())
            .unwrap();
        assert!(curve[0].mean.abs() < 1e-12);
        for p in &curve[1..n] {
            assert!((p.mean - 1.0).abs() < 1e-9, "{p:?}");
            assert!(p.std < 1e-9);
        }
        assert!((curve[n].mean - 2.0).abs() < 1e-9);
        assert_eq!(curve[1].fragments, 10);
        assert_eq!(curve[5].fragments, 30);
        assert!(fragment_curve_csv(&curve).starts_with("size,mean_bits"));
    }

    #[test]
    fn spin_spin_records_plateau() {
        let couplings: Vec<f64> = (0..8).map(|k| 0.6 + 0.13 * k as f64).collect();
        let env = SpinEnvironment::all_plus(couplings, 0.0, 0.0).unwrap();
        let psi = spin_spin_state(&env, &StateVector::plus(), 26.0).unwrap();
        let s_sys = crate::quantum::subsystem_entropy(&psi, &[0]).unwrap();
        assert!(s_sys > 0.99, "{s_sys}");
        let curve = fragment_mutual_information(&psi, &[1, 4, 7, 8], &FragmentConfig::default()).unwrap();
        assert!(curve[0].mean < curve[1].mean);
        assert!((curve[1].mean - s_sys).abs() < 0.05, "{curve:?}");
        assert!((curve[3].mean - 2.0 * s_sys).abs() < 1e-9);
    }

    #[test]
    fn errors_and_determinism() {
        let psi = ghz(4);
        assert!(fragment_mutual_information(&psi, &[5], &FragmentConfig::default()).is_err());
        let cfg = FragmentConfig { samples: 3, seed: 11 };
        let a = fragment_mutual_information(&psi, &[2], &cfg).unwrap();
        let b = fragment_mutual_information(&psi, &[2], &cfg).unwrap();
        assert_eq!(a[0].mean, b[0].mean);
        assert_eq!(a[0].fragments, 3);
    }

    #[test]
    fn curve_monotone_for_random_pure_states() {
        let mut rng = rng::stream(5, 0);
        for _ in 0..4 {
            let d = 1usize << 7;
            let v: CVector = CVector::from_fn(d, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            let psi = StateVector::normalized(v, vec![2; 7]).unwrap();
            let curve = fragment_mutual_information(&psi, &(0..=6).collect::<Vec<_>>(), &FragmentConfig::default())
                .unwrap();
            for w in curve.windows(2) {
                let noise = 3.0 * (w[0].std.powi(2) / w[0].fragments as f64 + w[1].std.powi(2) / w[1].fragments as f64).sqrt();
                assert!(w[1].mean >= w[0].mean - noise - 1e-12, "{curve:?}");
            }
        }
    }
}
