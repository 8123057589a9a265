//! Time evolution: Lindblad generators, a fixed-step RK4 integrator,
//! diffusive trajectories and the Born–Markov bath machinery.

mod bath;
pub mod series;
mod trajectories;

pub use bath::{
    bath_kernels, effective_spectral_density, qbm_coefficients, spin_boson_coefficients,
    BathKernels, CoefficientSet, QuadratureConfig, SpectralDensity,
};
pub use trajectories::{unravel, TrajectoryConfig, TrajectoryEnsemble, TrajectoryRecord};

use crate::error::{Error, Result};
use crate::quantum::linalg::{commutator, frobenius, hermiticity_error, symmetrize, trace};
use crate::quantum::{c, re, CMatrix, DensityMatrix, Operator, HERMITIAN_TOL};

/// Positivity floor below which [`evolve`] aborts.
pub const POSITIVITY_ABORT: f64 = -1e-6;
pub const TRACE_DRIFT_TOL: f64 = 1e-8;

/// Anything that supplies `dρ/dt` for a density matrix of fixed dimension.
pub trait Generator: Sync {
    fn dim(&self) -> usize;

    fn rhs(&self, rho: &CMatrix) -> CMatrix;

    /// Largest rate in the generator (1/time), used for the step-size
    /// warning.
    fn rate_scale(&self) -> f64;
}

/// `H'` plus the diagonal-form Lindblad terms `(L_μ, κ_μ)`.
#[derive(Debug, Clone)]
pub struct LindbladSpec {
    hamiltonian: Operator,
    terms: Vec<(Operator, f64)>,
    ldl: Vec<CMatrix>,
}

impl LindbladSpec {
    pub fn new(hamiltonian: Operator, terms: Vec<(Operator, f64)>) -> Result<Self> {
        let herm = hermiticity_error(hamiltonian.matrix());
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let d = hamiltonian.dim();
        for (l, k) in &terms {
            if !(*k >= 0.0) || !k.is_finite() {
                return Err(Error::InvalidArgument(format!("Lindblad rate must be >= 0, got {k}")));
            }
            if l.dim() != d {
                return Err(Error::DimensionMismatch(format!(
                    "Lindblad operator of dimension {} with Hamiltonian of dimension {d}",
                    l.dim()
                )));
            }
        }
        let ldl = terms.iter().map(|(l, _)| l.matrix().adjoint() * l.matrix()).collect();
        Ok(Self { hamiltonian, terms, ldl })
    }

    pub fn closed(hamiltonian: Operator) -> Result<Self> {
        Self::new(hamiltonian, Vec::new())
    }

    /// Qubit with `H = 0` and a single `σ_z` term of rate `kappa`.
    pub fn dephasing_qubit(kappa: f64) -> Result<Self> {
        Self::new(Operator::new(CMatrix::zeros(2, 2), vec![2])?, vec![(Operator::pauli_z(), kappa)])
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn lindblad_terms(&self) -> &[(Operator, f64)] {
        &self.terms
    }

    pub fn dims(&self) -> &[usize] {
        self.hamiltonian.dims()
    }

    pub fn all_hermitian(&self) -> bool {
        self.terms.iter().all(|(l, _)| l.is_hermitian(HERMITIAN_TOL))
    }
}

impl Generator for LindbladSpec {
    fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let h = self.hamiltonian.matrix();
        let mut out = commutator(h, rho) * c(0.0, -1.0);
        for ((l, k), ldl) in self.terms.iter().zip(&self.ldl) {
            if *k == 0.0 {
                continue;
            }
            let l = l.matrix();
            let jump = l * rho * l.adjoint();
            let anti = ldl * rho + rho * ldl;
            out += (jump - anti * re(0.5)) * re(*k);
        }
        out
    }

    fn rate_scale(&self) -> f64 {
        let h = frobenius(self.hamiltonian.matrix());
        self.terms
            .iter()
            .map(|(l, k)| k * frobenius(l.matrix()).powi(2))
            .fold(h, f64::max)
    }
}

/// `dρ/dt` for a Lindblad spec.
pub fn lindblad_rhs(spec: &LindbladSpec, rho: &DensityMatrix) -> Result<CMatrix> {
    if rho.dim() != spec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} for generator of dimension {}",
            rho.dim(),
            spec.dim()
        )));
    }
    Ok(spec.rhs(rho.matrix()))
}

/// Snapshots of an evolution.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl TimeSeries {
    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("time series is never empty")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// One classical RK4 step followed by Hermitian symmetrization.
pub fn rk4_step<G: Generator + ?Sized>(g: &G, rho: &CMatrix, dt: f64) -> CMatrix {
    let k1 = g.rhs(rho);
    let k2 = g.rhs(&(rho + &k1 * re(0.5 * dt)));
    let k3 = g.rhs(&(rho + &k2 * re(0.5 * dt)));
    let k4 = g.rhs(&(rho + &k3 * re(dt)));
    let next = rho + (k1 + (k2 + k3) * re(2.0) + k4) * re(dt / 6.0);
    symmetrize(&next)
}

/// Fixed-step RK4 with every step recorded. See [`evolve_with`].
pub fn evolve<G: Generator + ?Sized>(
    g: &G,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
) -> Result<TimeSeries> {
    evolve_with(g, rho0, t_final, dt, 1)
}

/// Fixed-step RK4 from `0` to `t_final`, recording every `stride`-th step and
/// the final one. The step is shrunk so that an integer number of steps lands
/// exactly on `t_final`.
///
/// Every recorded snapshot is checked: the run aborts with
/// [`Error::PositivityViolation`] when the minimum eigenvalue drops below
/// [`POSITIVITY_ABORT`], and with [`Error::NonConvergent`] when the trace has
/// drifted by more than [`TRACE_DRIFT_TOL`].
pub fn evolve_with<G: Generator + ?Sized>(
    g: &G,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<TimeSeries> {
    if rho0.dim() != g.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} for generator of dimension {}",
            rho0.dim(),
            g.dim()
        )));
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidArgument(format!("t_final must be >= 0, got {t_final}")));
    }
    let mut series = TimeSeries { times: vec![0.0], states: vec![rho0.clone()] };
    if t_final == 0.0 {
        return Ok(series);
    }
    if !(dt > 0.0) || dt > t_final {
        return Err(Error::InvalidArgument(format!("need 0 < dt <= t_final, got dt = {dt}")));
    }
    let stride = stride.max(1);
    let steps = (t_final / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    if h * g.rate_scale() > 0.1 {
        log::warn!("dt * rate = {:.3} exceeds 0.1; RK4 accuracy may suffer", h * g.rate_scale());
    }
    let dims = rho0.dims().to_vec();
    let tr0 = trace(rho0.matrix()).re;
    let mut rho = rho0.matrix().clone();
    for step in 1..=steps {
        rho = rk4_step(g, &rho, h);
        if step % stride == 0 || step == steps {
            let t = step as f64 * h;
            let drift = (trace(&rho).re - tr0).abs();
            if drift > TRACE_DRIFT_TOL {
                return Err(Error::NonConvergent { what: format!("trace at t = {t}"), residual: drift });
            }
            let snap = DensityMatrix::new_unchecked(rho.clone(), dims.clone())?;
            let min = snap.min_eigenvalue();
            if min < POSITIVITY_ABORT {
                return Err(Error::PositivityViolation { t, min_eigenvalue: min });
            }
            series.times.push(t);
            series.states.push(snap);
        }
    }
    Ok(series)
}
