//! Diffusive unraveling for Hermitian Lindblad operators:
//! `dψ = [−iH − Σ κ/2 (L−⟨L⟩)²] ψ dt + Σ √κ (L−⟨L⟩) ψ dW`.
//!
//! Each step applies `exp(−iH dt)` exactly, then an Euler–Maruyama increment
//! for the measurement terms, then renormalizes.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::LindbladSpec;
use crate::error::{Error, Result};
use crate::quantum::linalg::propagator;
use crate::quantum::{CMatrix, CVector, DensityMatrix, StateVector, C64};
use crate::rng;

const CHUNK: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub dt: f64,
    pub t_final: f64,
    pub n_trajectories: usize,
    pub master_seed: u64,
    /// Record the ensemble every `record_stride` steps (and at `t_final`).
    #[serde(default = "one")]
    pub record_stride: usize,
}

fn one() -> usize {
    1
}

impl TrajectoryConfig {
    pub fn new(dt: f64, t_final: f64, n_trajectories: usize, master_seed: u64) -> Self {
        Self { dt, t_final, n_trajectories, master_seed, record_stride: 1 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.t_final >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need dt > 0 and t_final >= 0, got dt = {}, t_final = {}",
                self.dt, self.t_final
            )));
        }
        if self.n_trajectories == 0 {
            return Err(Error::InvalidArgument("n_trajectories must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub index: usize,
    pub final_state: StateVector,
    /// Largest `|‖ψ‖ − 1|` seen after renormalization.
    pub max_norm_error: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectoryEnsemble {
    pub times: Vec<f64>,
    /// Ensemble-averaged `|ψ⟩⟨ψ|` at each recorded time.
    pub mean: Vec<DensityMatrix>,
    pub records: Vec<TrajectoryRecord>,
}

struct Stepper {
    u: CMatrix,
    ops: Vec<(CMatrix, f64)>,
    h: f64,
    steps: usize,
    stride: usize,
}

impl Stepper {
    fn record_steps(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.steps).filter(move |s| *s == 0 || s % self.stride == 0 || *s == self.steps)
    }

    fn run(&self, psi0: &CVector, index: u64, seed: u64) -> (Vec<CVector>, CVector, f64) {
        let mut rng = rng::stream(seed, index);
        let d = psi0.len();
        let mut psi = psi0.clone();
        let mut out = vec![psi.clone()];
        let mut a = CVector::zeros(d);
        let mut incr = CVector::zeros(d);
        let mut worst = 0.0f64;
        let sqrt_h = self.h.sqrt();
        for step in 1..=self.steps {
            psi = &self.u * &psi;
            incr.fill(C64::new(0.0, 0.0));
            for (l, kappa) in &self.ops {
                let xi: f64 = StandardNormal.sample(&mut rng);
                if *kappa == 0.0 {
                    continue;
                }
                let lpsi = l * &psi;
                let mean = psi.dotc(&lpsi).re;
                a.copy_from(&lpsi);
                a.axpy(C64::new(-mean, 0.0), &psi, C64::new(1.0, 0.0));
                let la = l * &a;
                // (L − ⟨L⟩)² ψ = L a − ⟨L⟩ a
                incr.axpy(C64::new(-0.5 * kappa * self.h, 0.0), &la, C64::new(1.0, 0.0));
                incr.axpy(C64::new(0.5 * kappa * self.h * mean, 0.0), &a, C64::new(1.0, 0.0));
                incr.axpy(C64::new(kappa.sqrt() * xi * sqrt_h, 0.0), &a, C64::new(1.0, 0.0));
            }
            psi += &incr;
            let norm = psi.norm();
            psi.unscale_mut(norm);
            worst = worst.max((psi.norm() - 1.0).abs());
            if step % self.stride == 0 || step == self.steps {
                out.push(psi.clone());
            }
        }
        (out, psi, worst)
    }
}

/// Ensemble of diffusive trajectories from `psi0`. Trajectory `k` draws its
/// noise from stream `k` of `master_seed`, and ensemble sums run in index
/// order, so the output is bitwise independent of the worker count.
pub fn unravel(spec: &LindbladSpec, psi0: &StateVector, cfg: &TrajectoryConfig) -> Result<TrajectoryEnsemble> {
    cfg.validate()?;
    if psi0.dim() != spec.hamiltonian().dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} for generator of dimension {}",
            psi0.dim(),
            spec.hamiltonian().dim()
        )));
    }
    if !spec.all_hermitian() {
        return Err(Error::InvalidArgument(
            "diffusive unraveling requires Hermitian Lindblad operators".into(),
        ));
    }
    let steps = if cfg.t_final == 0.0 { 0 } else { (cfg.t_final / cfg.dt - 1e-9).ceil().max(1.0) as usize };
    let h = if steps == 0 { 0.0 } else { cfg.t_final / steps as f64 };
    let stepper = Stepper {
        u: propagator(spec.hamiltonian().matrix(), h),
        ops: spec.lindblad_terms().iter().map(|(l, k)| (l.matrix().clone(), *k)).collect(),
        h,
        steps,
        stride: cfg.record_stride.max(1),
    };
    let times: Vec<f64> = stepper.record_steps().map(|s| s as f64 * h).collect();
    let d = psi0.dim();
    let mut sums = vec![CMatrix::zeros(d, d); times.len()];
    let mut records = Vec::with_capacity(cfg.n_trajectories);
    let amps = psi0.amplitudes();

    let mut start = 0;
    while start < cfg.n_trajectories {
        let end = (start + CHUNK).min(cfg.n_trajectories);
        let chunk: Vec<_> = (start..end)
            .into_par_iter()
            .map(|k| stepper.run(amps, k as u64, cfg.master_seed))
            .collect();
        for (offset, (snaps, last, worst)) in chunk.into_iter().enumerate() {
            for (acc, psi) in sums.iter_mut().zip(&snaps) {
                acc.gerc(C64::new(1.0, 0.0), psi, psi, C64::new(1.0, 0.0));
            }
            records.push(TrajectoryRecord {
                index: start + offset,
                final_state: StateVector::new(last, psi0.dims().to_vec())?,
                max_norm_error: worst,
            });
        }
        start = end;
    }
    let scale = C64::new(1.0 / cfg.n_trajectories as f64, 0.0);
    let mean = sums
        .into_iter()
        .map(|m| DensityMatrix::new_unchecked(m * scale, psi0.dims().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrajectoryEnsemble { times, mean, records })
}
