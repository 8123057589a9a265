//! Spin–boson model. Exact dephasing for `H = ½ω₀σz + Σωa†a + σz⊗Σg(a+a†)`
//! with a discretized bath, and the weak-coupling Born–Markov equation for the
//! general model with tunneling.
//!
//! In the exact route each mode is evolved branch by branch: a coherent state
//! `|α⟩` stays coherent under `ωa†a ± g(a+a†)`, so the thermal state is
//! propagated through its Glauber–Sudarshan `P` representation and the
//! average over `α` is done by 2-d Gauss–Hermite quadrature.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::{GaussHermite, GaussLegendre};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{spin_boson_coefficients, CoefficientSet, Generator, SpectralDensity};
use crate::error::{Error, Result};
use crate::quantum::linalg::{pauli_x, pauli_y, pauli_z};
use crate::quantum::{c, re, CMatrix, DensityMatrix, C64};

const HERMITE_SIZES: [usize; 6] = [8, 16, 32, 64, 128, 192];
const HERMITE_TOL: f64 = 1e-10;

/// Bath modes `ω_i` with couplings `g_i`, `g_i² = w_i J(ω_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathModes {
    pub omega: Vec<f64>,
    pub coupling: Vec<f64>,
}

/// Gauss–Legendre nodes on `[0, band_factor·Λ]`.
pub fn discretize_bath(j: &SpectralDensity, n_osc: usize, band_factor: f64) -> Result<BathModes> {
    j.validate()?;
    let n = NonZeroUsize::new(n_osc).ok_or_else(|| Error::InvalidArgument("n_osc must be >= 1".into()))?;
    let top = band_factor * j.characteristic_frequency();
    if !(top > 0.0) {
        return Err(Error::InvalidArgument("bath band must be positive".into()));
    }
    let gl = GaussLegendre::new(n);
    let mut omega = Vec::with_capacity(n_osc);
    let mut coupling = Vec::with_capacity(n_osc);
    for &(x, w) in gl.as_node_weight_pairs() {
        let om = 0.5 * top * (x + 1.0);
        omega.push(om);
        coupling.push((0.5 * top * w * j.eval(om)).max(0.0).sqrt());
    }
    Ok(BathModes { omega, coupling })
}

fn hermite_rules() -> &'static Vec<Vec<(f64, f64)>> {
    static RULES: OnceLock<Vec<Vec<(f64, f64)>>> = OnceLock::new();
    RULES.get_or_init(|| {
        HERMITE_SIZES
            .iter()
            .map(|&n| GaussHermite::new(NonZeroUsize::new(n).expect("nonzero")).as_node_weight_pairs().to_vec())
            .collect()
    })
}

/// Branch `s = ±1` of `|α⟩` under `ωa†a + s g(a+a†)` for time `t`, up to the
/// branch-independent phase `e^{iωβ²t}`: returns `(phase, α(t))`.
fn branch(alpha: C64, beta: f64, rot: C64, s: f64) -> (C64, C64) {
    let a1 = alpha + s * beta;
    let a2 = a1 * rot;
    let phase = s * beta * (a2.im - alpha.im);
    (C64::from_polar(1.0, phase), a2 - s * beta)
}

fn branch_overlap(alpha: C64, beta: f64, rot: C64) -> C64 {
    let (pp, ap) = branch(alpha, beta, rot, 1.0);
    let (pm, am) = branch(alpha, beta, rot, -1.0);
    let ov = (-0.5 * (ap.norm_sqr() + am.norm_sqr()) + am.conj() * ap).exp();
    pm.conj() * pp * ov
}

/// `Tr[U₊(t) ρ_th U₋(t)†]` for one mode.
pub fn mode_decoherence_factor(omega: f64, g: f64, temperature: f64, t: f64) -> Result<C64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidArgument(format!("mode frequency must be positive, got {omega}")));
    }
    let beta = g / omega;
    let rot = C64::from_polar(1.0, -omega * t);
    let nbar = if temperature > 0.0 { 1.0 / (omega / temperature).exp_m1() } else { 0.0 };
    if beta == 0.0 {
        return Ok(re(1.0));
    }
    if nbar < 1e-300 {
        return Ok(branch_overlap(re(0.0), beta, rot));
    }
    let width = nbar.sqrt();
    let average = |rule: &[(f64, f64)]| -> C64 {
        let mut sum = C64::new(0.0, 0.0);
        for &(u, wu) in rule {
            for &(v, wv) in rule {
                sum += branch_overlap(c(width * u, width * v), beta, rot) * (wu * wv);
            }
        }
        sum / PI
    };
    let rules = hermite_rules();
    let mut prev = average(&rules[1]);
    let mut diff = f64::INFINITY;
    for rule in &rules[2..] {
        let next = average(rule);
        diff = (next - prev).norm();
        if diff <= HERMITE_TOL {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergent { what: "thermal average over coherent states".into(), residual: diff })
}

/// Product of the mode factors: `ρ₀₁(t) = ρ₀₁(0) e^{−iω₀t} χ(t)`.
pub fn decoherence_factor(bath: &BathModes, temperature: f64, t: f64) -> Result<C64> {
    bath.omega
        .iter()
        .zip(&bath.coupling)
        .try_fold(re(1.0), |acc, (w, g)| Ok(acc * mode_decoherence_factor(*w, *g, temperature, t)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactDephasingConfig {
    pub n_osc_initial: usize,
    pub n_osc_max: usize,
    /// Accepted relative change on doubling the mode count.
    pub tolerance: f64,
    /// Modes cover `[0, band_factor·Λ]`.
    pub band_factor: f64,
}

impl Default for ExactDephasingConfig {
    fn default() -> Self {
        Self { n_osc_initial: 16, n_osc_max: 1024, tolerance: 0.02, band_factor: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DephasingResult {
    pub times: Vec<f64>,
    /// `|ρ₀₁(t)|/|ρ₀₁(0)|`.
    pub coherence: Vec<f64>,
    /// Complex factor `χ(t)` (without the `e^{−iω₀t}` rotation).
    pub factor: Vec<C64>,
    pub n_osc: usize,
    /// Relative change of the coherence on the last doubling.
    pub discretization_change: f64,
}

impl DephasingResult {
    /// First time at which the coherence falls to `1/e`, by log-linear
    /// interpolation between grid points.
    pub fn one_over_e_time(&self) -> Option<f64> {
        first_crossing(&self.times, &self.coherence, (-1.0f64).exp())
    }
}

pub fn first_crossing(times: &[f64], values: &[f64], level: f64) -> Option<f64> {
    for i in 1..values.len() {
        if values[i] <= level && values[i - 1] > level {
            let (a, b) = (values[i - 1].ln(), values[i].ln());
            let f = (a - level.ln()) / (a - b);
            return Some(times[i - 1] + f * (times[i] - times[i - 1]));
        }
    }
    None
}

fn factors(bath: &BathModes, temperature: f64, times: &[f64]) -> Result<Vec<C64>> {
    times.par_iter().map(|t| decoherence_factor(bath, temperature, *t)).collect()
}

/// Exact `|ρ₀₁(t)/ρ₀₁(0)|` for the dephasing model with a discretized bath,
/// doubling the mode count until the result changes by less than the
/// configured tolerance.
pub fn spin_boson_exact_dephasing(j: &SpectralDensity, temperature: f64, times: &[f64]) -> Result<DephasingResult> {
    spin_boson_exact_dephasing_with(j, temperature, times, &ExactDephasingConfig::default())
}

pub fn spin_boson_exact_dephasing_with(
    j: &SpectralDensity,
    temperature: f64,
    times: &[f64],
    cfg: &ExactDephasingConfig,
) -> Result<DephasingResult> {
    if !(temperature >= 0.0) {
        return Err(Error::InvalidArgument(format!("temperature must be >= 0, got {temperature}")));
    }
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidArgument("times must be finite and >= 0".into()));
    }
    if cfg.n_osc_initial == 0 || cfg.n_osc_max < cfg.n_osc_initial {
        return Err(Error::InvalidArgument("need 1 <= n_osc_initial <= n_osc_max".into()));
    }
    let mut n = cfg.n_osc_initial;
    let mut prev = factors(&discretize_bath(j, n, cfg.band_factor)?, temperature, times)?;
    let mut change = f64::INFINITY;
    while 2 * n <= cfg.n_osc_max {
        n *= 2;
        let next = factors(&discretize_bath(j, n, cfg.band_factor)?, temperature, times)?;
        change = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a.norm() - b.norm()).abs() / b.norm().max(0.01))
            .fold(0.0, f64::max);
        prev = next;
        if change < cfg.tolerance {
            return Ok(DephasingResult {
                times: times.to_vec(),
                coherence: prev.iter().map(|z| z.norm()).collect(),
                factor: prev,
                n_osc: n,
                discretization_change: change,
            });
        }
    }
    Err(Error::NonConvergent { what: format!("bath discretization at n_osc = {n}"), residual: change })
}

/// Reduced qubit state of the dephasing model at time `t`.
pub fn exact_reduced_state(rho0: &DensityMatrix, omega0: f64, factor: C64, t: f64) -> Result<DensityMatrix> {
    if rho0.dim() != 2 {
        return Err(Error::DimensionMismatch("spin–boson system is a single qubit".into()));
    }
    let mut m = rho0.matrix().clone();
    let z = m[(0, 1)] * C64::from_polar(1.0, -omega0 * t) * factor;
    m[(0, 1)] = z;
    m[(1, 0)] = z.conj();
    DensityMatrix::new_unchecked(m, vec![2])
}

/// `dρ/dt = −i(H′ρ − ρH′†) − D̃[σz,[σz,ρ]] + ζσzρσy + ζ*σyρσz` with
/// `H′ = ½ω₀σz − ½Δ₀σx − ζ*σx` and `ζ* = f̃ − iγ̃`.
#[derive(Debug, Clone)]
pub struct SpinBosonBornMarkov {
    pub omega0: f64,
    pub delta0: f64,
    pub dephasing: f64,
    pub zeta: C64,
    h_eff: CMatrix,
}

impl SpinBosonBornMarkov {
    pub fn from_coefficients(omega0: f64, delta0: f64, coeffs: &CoefficientSet) -> Self {
        let zeta = c(coeffs.decay_real, coeffs.decay_imag);
        let h_eff = pauli_z() * re(0.5 * omega0) - pauli_x() * (re(0.5 * delta0) + zeta.conj());
        Self { omega0, delta0, dephasing: coeffs.dephasing, zeta, h_eff }
    }

    /// Non-Hermitian `H′_S`.
    pub fn effective_hamiltonian(&self) -> &CMatrix {
        &self.h_eff
    }
}

pub fn spin_boson_born_markov_spec(
    j: &SpectralDensity,
    temperature: f64,
    omega0: f64,
    delta0: f64,
) -> Result<SpinBosonBornMarkov> {
    let coeffs = spin_boson_coefficients(j, temperature, delta0)?;
    Ok(SpinBosonBornMarkov::from_coefficients(omega0, delta0, &coeffs))
}

impl Generator for SpinBosonBornMarkov {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let (sy, sz) = (pauli_y(), pauli_z());
        let unitary = (&self.h_eff * rho - rho * self.h_eff.adjoint()) * c(0.0, -1.0);
        let zr = &sz * rho;
        let rz = rho * &sz;
        let double = &sz * &zr - &zr * &sz - &sz * &rz + &rz * &sz;
        unitary - double * re(self.dephasing) + &zr * &sy * self.zeta + &sy * &rz * self.zeta.conj()
    }

    fn rate_scale(&self) -> f64 {
        self.omega0.abs() + self.delta0.abs() + 4.0 * self.dephasing.abs() + 4.0 * self.zeta.norm()
    }
}
