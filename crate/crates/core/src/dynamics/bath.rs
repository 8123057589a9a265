//! Spectral densities, the noise and dissipation kernels
//! `ν(τ) = ∫dω J(ω) coth(ω/2T) cos ωτ`, `η(τ) = ∫dω J(ω) sin ωτ`, and the
//! Born–Markov coefficient integrals built from them.
//!
//! Frequency integrals use the trapezoid rule on a uniform window
//! `[0, ω_max]`. The integrand is multiplied by a smooth taper that falls from
//! 1 to 0 over the top fifth of the window, so the kernels decay like the
//! physical ones instead of ringing as `1/τ` off a hard edge. Time integrals
//! use Simpson's rule on `[0, t_max]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpectralDensity {
    /// `J(ω) = (2Mγ₀/π) ω Λ²/(Λ² + ω²)`.
    OhmicLorentzCutoff { mass: f64, gamma0: f64, cutoff: f64 },
    /// `J(ω) = (2Mγ₀/π) ω` with no cutoff; every kernel integral diverges.
    Ohmic { mass: f64, gamma0: f64 },
    /// Tabulated `J` on an ascending, nonnegative frequency grid.
    Sampled { omega: Vec<f64>, j: Vec<f64>, mass: f64 },
}

impl SpectralDensity {
    pub fn ohmic_lorentz(mass: f64, gamma0: f64, cutoff: f64) -> Self {
        SpectralDensity::OhmicLorentzCutoff { mass, gamma0, cutoff }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpectralDensity::OhmicLorentzCutoff { mass, gamma0, cutoff } => {
                if !(*mass > 0.0) || !(*gamma0 >= 0.0) || !(*cutoff > 0.0) {
                    return Err(Error::InvalidArgument(
                        "ohmic density needs mass > 0, gamma0 >= 0, cutoff > 0".into(),
                    ));
                }
            }
            SpectralDensity::Ohmic { .. } => {
                return Err(Error::DivergentIntegrand(
                    "ohmic spectral density without a cutoff: ∫J(ω)coth(ω/2T)dω diverges as ω → ∞"
                        .into(),
                ))
            }
            SpectralDensity::Sampled { omega, j, mass } => {
                if omega.len() != j.len() || omega.len() < 2 {
                    return Err(Error::InvalidArgument(
                        "sampled density needs matching omega/j arrays of length >= 2".into(),
                    ));
                }
                if omega[0] < 0.0 || omega.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidArgument(
                        "sampled frequencies must be nonnegative and strictly ascending".into(),
                    ));
                }
                if let Some(bad) = j.iter().find(|v| !(**v >= 0.0)) {
                    return Err(Error::InvalidArgument(format!("J must be >= 0, got {bad}")));
                }
                if !(*mass > 0.0) {
                    return Err(Error::InvalidArgument("mass must be > 0".into()));
                }
            }
        }
        Ok(())
    }

    pub fn mass(&self) -> f64 {
        match self {
            SpectralDensity::OhmicLorentzCutoff { mass, .. }
            | SpectralDensity::Ohmic { mass, .. }
            | SpectralDensity::Sampled { mass, .. } => *mass,
        }
    }

    /// Frequency scale that sets the default quadrature windows: `Λ`, or a
    /// tenth of the top of a sampled grid.
    pub fn characteristic_frequency(&self) -> f64 {
        match self {
            SpectralDensity::OhmicLorentzCutoff { cutoff, .. } => *cutoff,
            SpectralDensity::Ohmic { .. } => f64::INFINITY,
            SpectralDensity::Sampled { omega, .. } => omega.last().copied().unwrap_or(1.0) / 10.0,
        }
    }

    /// `J(ω)`; sampled densities interpolate linearly and vanish outside the grid.
    pub fn eval(&self, w: f64) -> f64 {
        match self {
            SpectralDensity::Sampled { omega, j, .. } => interp(omega, j, w),
            _ => self.over_omega(w) * w,
        }
    }

    /// `J(ω)/ω` with its `ω → 0` limit.
    pub fn over_omega(&self, w: f64) -> f64 {
        use std::f64::consts::PI;
        match self {
            SpectralDensity::OhmicLorentzCutoff { mass, gamma0, cutoff } => {
                2.0 * mass * gamma0 / PI * cutoff * cutoff / (cutoff * cutoff + w * w)
            }
            SpectralDensity::Ohmic { mass, gamma0 } => 2.0 * mass * gamma0 / PI,
            SpectralDensity::Sampled { omega, j, .. } => {
                if w > 0.0 {
                    interp(omega, j, w) / w
                } else if omega[0] > 0.0 {
                    0.0
                } else {
                    // Forward difference at the origin.
                    (j[1] - j[0]) / omega[1]
                }
            }
        }
    }
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x < xs[0] || x > xs[xs.len() - 1] {
        return 0.0;
    }
    let k = xs.partition_point(|&v| v <= x);
    if k == 0 {
        return ys[0];
    }
    if k == xs.len() {
        return ys[xs.len() - 1];
    }
    let (x0, x1) = (xs[k - 1], xs[k]);
    ys[k - 1] + (ys[k] - ys[k - 1]) * (x - x0) / (x1 - x0)
}

/// `ω coth(ω/2T)`, equal to `|ω|` at `T = 0` and `2T` at `ω = 0`.
fn omega_coth(w: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return w.abs();
    }
    let x = w / (2.0 * temperature);
    if x.abs() < 1e-8 {
        2.0 * temperature
    } else {
        w / x.tanh()
    }
}

/// Smooth step, 1 below `0.8·top`, 0 at `top`.
fn taper(w: f64, top: f64) -> f64 {
    let start = 0.8 * top;
    if w <= start {
        return 1.0;
    }
    if w >= top {
        return 0.0;
    }
    // C∞ step: 1/(1 + e^{1/(1−s) − 1/s}).
    let s = (w - start) / (top - start);
    1.0 / (1.0 + (1.0 / (1.0 - s) - 1.0 / s).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    /// Top of the frequency window in units of the characteristic frequency.
    pub omega_max_factor: f64,
    pub n_omega: usize,
    /// Upper limit of the coefficient time integrals, in units of
    /// `1/characteristic frequency`.
    pub t_max_factor: f64,
    /// Number of τ nodes (forced odd for Simpson).
    pub n_tau: usize,
    /// Relative tolerance on the change of each coefficient between
    /// `0.9·t_max` and `t_max`.
    pub convergence_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { omega_max_factor: 10.0, n_omega: 4096, t_max_factor: 50.0, n_tau: 8001, convergence_tol: 1e-6 }
    }
}

impl QuadratureConfig {
    /// Both grids doubled.
    pub fn refined(&self) -> Self {
        Self { n_omega: 2 * self.n_omega, n_tau: 2 * self.n_tau - 1, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathKernels {
    pub tau: Vec<f64>,
    pub nu: Vec<f64>,
    pub eta: Vec<f64>,
}

/// Frequency nodes with trapezoid weights already folded into the two
/// integrands `J coth` and `J`.
struct FrequencyRule {
    omega: Vec<f64>,
    w_nu: Vec<f64>,
    w_eta: Vec<f64>,
    uniform_step: Option<f64>,
}

impl FrequencyRule {
    fn new(j: &SpectralDensity, temperature: f64, cfg: &QuadratureConfig) -> Result<Self> {
        j.validate()?;
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(Error::InvalidArgument(format!("temperature must be >= 0, got {temperature}")));
        }
        let (omega, uniform_step) = match j {
            SpectralDensity::Sampled { omega, .. } => {
                let h = omega[1] - omega[0];
                let uniform = omega.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-12 * h.max(1.0));
                (omega.clone(), if uniform && omega[0] == 0.0 { Some(h) } else { None })
            }
            _ => {
                let n = cfg.n_omega.max(3);
                let top = cfg.omega_max_factor * j.characteristic_frequency();
                let h = top / (n - 1) as f64;
                ((0..n).map(|k| k as f64 * h).collect(), Some(h))
            }
        };
        let n = omega.len();
        let top = omega[n - 1];
        let mut w_nu = vec![0.0; n];
        let mut w_eta = vec![0.0; n];
        for k in 0..n {
            let left = if k > 0 { omega[k] - omega[k - 1] } else { 0.0 };
            let right = if k + 1 < n { omega[k + 1] - omega[k] } else { 0.0 };
            let weight = 0.5 * (left + right) * taper(omega[k], top);
            let over = j.over_omega(omega[k]);
            w_nu[k] = weight * over * omega_coth(omega[k], temperature);
            w_eta[k] = weight * j.eval(omega[k]);
        }
        Ok(Self { omega, w_nu, w_eta, uniform_step })
    }

    /// `(ν(τ), η(τ))`.
    fn kernels_at(&self, tau: f64) -> (f64, f64) {
        let (mut nu, mut eta) = (0.0, 0.0);
        match self.uniform_step {
            Some(h) => {
                // e^{iω_k τ} by repeated rotation; re-anchored every 256 nodes.
                let (s1, c1) = (h * tau).sin_cos();
                let (mut s, mut cc) = (0.0f64, 1.0f64);
                for k in 0..self.omega.len() {
                    if k % 256 == 0 {
                        let (sk, ck) = (k as f64 * h * tau).sin_cos();
                        s = sk;
                        cc = ck;
                    }
                    nu += self.w_nu[k] * cc;
                    eta += self.w_eta[k] * s;
                    let ns = s * c1 + cc * s1;
                    cc = cc * c1 - s * s1;
                    s = ns;
                }
            }
            None => {
                for k in 0..self.omega.len() {
                    let (s, cc) = (self.omega[k] * tau).sin_cos();
                    nu += self.w_nu[k] * cc;
                    eta += self.w_eta[k] * s;
                }
            }
        }
        (nu, eta)
    }
}

/// Noise and dissipation kernels on a caller-supplied τ grid, with default
/// frequency quadrature.
pub fn bath_kernels(j: &SpectralDensity, temperature: f64, tau_grid: &[f64]) -> Result<BathKernels> {
    bath_kernels_with(j, temperature, tau_grid, &QuadratureConfig::default())
}

pub fn bath_kernels_with(
    j: &SpectralDensity,
    temperature: f64,
    tau_grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<BathKernels> {
    let rule = FrequencyRule::new(j, temperature, cfg)?;
    let (nu, eta) = tau_grid.iter().map(|&t| rule.kernels_at(t)).unzip();
    Ok(BathKernels { tau: tau_grid.to_vec(), nu, eta })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    /// `Ω̃²` (frequency²).
    pub shift: f64,
    /// `γ` (1/time).
    pub damping: f64,
    /// `D`.
    pub normal_diffusion: f64,
    /// `f`.
    pub anomalous_diffusion: f64,
    /// `D̃`.
    pub dephasing: f64,
    /// `f̃`.
    pub decay_real: f64,
    /// `γ̃`.
    pub decay_imag: f64,
}

/// Four half-line integrals `∫₀^∞ {ν,η}(τ) {cos,sin}(Ωτ) dτ`, in the order
/// `(ν cos, ν sin, η cos, η sin)`.
fn kernel_transforms(
    j: &SpectralDensity,
    temperature: f64,
    omega: f64,
    cfg: &QuadratureConfig,
) -> Result<[f64; 4]> {
    let rule = FrequencyRule::new(j, temperature, cfg)?;
    let scale = j.characteristic_frequency();
    let t_max = cfg.t_max_factor / scale;
    let n = (cfg.n_tau.max(5) / 2) * 2 + 1;
    let h = t_max / (n - 1) as f64;
    // Last odd-length prefix ending near 0.9·t_max, for the tail check.
    let m = ((0.9 * (n - 1) as f64) as usize / 2) * 2 + 1;

    let mut sums = [[0.0f64; 4]; 3]; // full, prefix, |full|
    for i in 0..n {
        let tau = i as f64 * h;
        let (nu, eta) = rule.kernels_at(tau);
        let (s, cc) = (omega * tau).sin_cos();
        let vals = [nu * cc, nu * s, eta * cc, eta * s];
        let wt = simpson_weight(i, n);
        for q in 0..4 {
            sums[0][q] += wt * vals[q];
            sums[2][q] += wt * vals[q].abs();
            if i < m {
                sums[1][q] += simpson_weight(i, m) * vals[q];
            }
        }
    }
    let mut out = [0.0; 4];
    for q in 0..4 {
        out[q] = sums[0][q] * h / 3.0;
        let prefix = sums[1][q] * h / 3.0;
        let magnitude = sums[2][q] * h / 3.0;
        let residual = (out[q] - prefix).abs();
        if residual > cfg.convergence_tol * magnitude {
            return Err(Error::NonConvergent {
                what: format!("kernel time integral {q} up to t_max = {t_max}"),
                residual: residual / magnitude,
            });
        }
    }
    Ok(out)
}

fn simpson_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i == n - 1 {
        1.0
    } else if i % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// `Ω̃², γ, D, f` of the quantum Brownian motion master equation for a
/// system oscillator of frequency `omega`.
pub fn qbm_coefficients(j: &SpectralDensity, temperature: f64, omega: f64) -> Result<CoefficientSet> {
    qbm_coefficients_with(j, temperature, omega, &QuadratureConfig::default())
}

pub fn qbm_coefficients_with(
    j: &SpectralDensity,
    temperature: f64,
    omega: f64,
    cfg: &QuadratureConfig,
) -> Result<CoefficientSet> {
    if !(omega > 0.0) {
        return Err(Error::InvalidArgument(format!("system frequency must be > 0, got {omega}")));
    }
    let [nu_c, nu_s, eta_c, eta_s] = kernel_transforms(j, temperature, omega, cfg)?;
    let m = j.mass();
    Ok(CoefficientSet {
        shift: -2.0 / m * eta_c,
        damping: eta_s / (m * omega),
        normal_diffusion: nu_c,
        anomalous_diffusion: -nu_s / (m * omega),
        ..CoefficientSet::default()
    })
}

/// `D̃, f̃, γ̃` of the weak-coupling spin–boson master equation.
pub fn spin_boson_coefficients(j: &SpectralDensity, temperature: f64, delta0: f64) -> Result<CoefficientSet> {
    spin_boson_coefficients_with(j, temperature, delta0, &QuadratureConfig::default())
}

pub fn spin_boson_coefficients_with(
    j: &SpectralDensity,
    temperature: f64,
    delta0: f64,
    cfg: &QuadratureConfig,
) -> Result<CoefficientSet> {
    let [nu_c, nu_s, _, eta_s] = kernel_transforms(j, temperature, delta0, cfg)?;
    Ok(CoefficientSet {
        dephasing: nu_c,
        decay_real: nu_s,
        decay_imag: eta_s,
        ..CoefficientSet::default()
    })
}

/// `J_eff(ω) = J(ω) tanh(ω/2T)` sampled on the default frequency window.
pub fn effective_spectral_density(j: &SpectralDensity, temperature: f64) -> Result<SpectralDensity> {
    j.validate()?;
    let omega: Vec<f64> = match j {
        SpectralDensity::Sampled { omega, .. } => omega.clone(),
        _ => {
            let cfg = QuadratureConfig::default();
            let top = cfg.omega_max_factor * j.characteristic_frequency();
            let h = top / (cfg.n_omega - 1) as f64;
            (0..cfg.n_omega).map(|k| k as f64 * h).collect()
        }
    };
    let values = omega
        .iter()
        .map(|&w| {
            let t = if temperature <= 0.0 { 1.0 } else { (w / (2.0 * temperature)).tanh() };
            j.eval(w) * t
        })
        .collect();
    Ok(SpectralDensity::Sampled { omega, j: values, mass: j.mass() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ohmic() -> SpectralDensity {
        SpectralDensity::ohmic_lorentz(1.0, 0.05, 1.0)
    }

    #[test]
    fn eta_vanishes_at_zero() {
        let k = bath_kernels(&ohmic(), 2.0, &[0.0, 0.5]).unwrap();
        assert_eq!(k.eta[0], 0.0);
        assert!(k.eta[1] > 0.0);
    }

    #[test]
    fn kernels_match_direct_summation() {
        let j = ohmic();
        let cfg = QuadratureConfig::default();
        let taus = [0.0, 0.37, 3.1, 17.0];
        let k = bath_kernels(&j, 0.8, &taus).unwrap();
        // Direct trapezoid with explicit cos/sin, no recurrence.
        let n = cfg.n_omega;
        let top = 10.0;
        let h = top / (n - 1) as f64;
        for (i, &tau) in taus.iter().enumerate() {
            let (mut nu, mut eta) = (0.0, 0.0);
            for kk in 0..n {
                let w = kk as f64 * h;
                let wt = if kk == 0 || kk == n - 1 { 0.5 * h } else { h } * taper(w, top);
                nu += wt * j.over_omega(w) * omega_coth(w, 0.8) * (w * tau).cos();
                eta += wt * j.eval(w) * (w * tau).sin();
            }
            assert!((k.nu[i] - nu).abs() < 1e-12 * nu.abs().max(1e-3));
            assert!((k.eta[i] - eta).abs() < 1e-12 * eta.abs().max(1e-3));
        }
    }

    #[test]
    fn narrow_spike_gives_cosine_kernel() {
        let (w0, sigma, area, temp) = (2.0, 0.01, 0.3, 0.7);
        let omega: Vec<f64> = (0..40001).map(|k| k as f64 * 1e-4).collect();
        let j: Vec<f64> = omega
            .iter()
            .map(|w| area * (-(w - w0) * (w - w0) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt()))
            .collect();
        let density = SpectralDensity::Sampled { omega, j, mass: 1.0 };
        let taus = [0.0, 1.0, 2.5];
        let k = bath_kernels(&density, temp, &taus).unwrap();
        for (i, &tau) in taus.iter().enumerate() {
            // Gaussian spike: exact transform carries an envelope e^{-σ²τ²/2}.
            let expected = area / (w0 / (2.0 * temp)).tanh() * (w0 * tau).cos();
            assert!((k.nu[i] - expected).abs() < 2e-3 * area, "tau {tau}: {} vs {expected}", k.nu[i]);
        }
    }

    #[test]
    fn high_temperature_noise_kernel_scales_with_t() {
        let j = ohmic();
        let taus = [0.0, 0.5, 2.0];
        let a = bath_kernels(&j, 1e3, &taus).unwrap();
        let b = bath_kernels(&j, 2e3, &taus).unwrap();
        let cfg = QuadratureConfig::default();
        let n = cfg.n_omega;
        let h = 10.0 / (n - 1) as f64;
        for i in 0..taus.len() {
            let limit: f64 = (0..n)
                .map(|kk| {
                    let w = kk as f64 * h;
                    let wt = if kk == 0 || kk == n - 1 { 0.5 * h } else { h } * taper(w, 10.0);
                    2.0 * wt * j.over_omega(w) * (w * taus[i]).cos()
                })
                .sum();
            assert!((a.nu[i] / 1e3 - limit).abs() < 1e-5 * limit.abs());
            assert!((b.nu[i] / 2e3 - limit).abs() < 1e-5 * limit.abs());
        }
    }

    #[test]
    fn qbm_coefficients_against_closed_forms() {
        let (m, g0, lam, omega) = (1.0, 0.05, 1.0, 0.1);
        let j = SpectralDensity::ohmic_lorentz(m, g0, lam);
        let c = qbm_coefficients(&j, 100.0, omega).unwrap();
        // D → 2Mγ₀T at high temperature.
        assert!((c.normal_diffusion / (2.0 * m * g0 * 100.0) - 1.0).abs() < 0.05);
        // D = (π/2) J(Ω) coth(Ω/2T) exactly for a Markovian half-line integral.
        let d_exact = PI / 2.0 * j.eval(omega) / (omega / 200.0).tanh();
        assert!((c.normal_diffusion / d_exact - 1.0).abs() < 1e-4);
        // γ = γ₀Λ²/(Λ² + Ω²).
        let gamma = g0 * lam * lam / (lam * lam + omega * omega);
        assert!((c.damping / gamma - 1.0).abs() < 1e-4);
        // Shift ≈ −2γ₀Λ up to the finite frequency window.
        assert!((c.shift / (-2.0 * g0 * lam) - 1.0).abs() < 0.15);
        let cold = qbm_coefficients(&j, 2.0, omega).unwrap();
        assert!((cold.damping / c.damping - 1.0).abs() < 1e-4);
    }

    #[test]
    fn zero_density_gives_zero_coefficients() {
        let omega: Vec<f64> = (0..101).map(|k| k as f64 * 0.1).collect();
        let j = SpectralDensity::Sampled { j: vec![0.0; omega.len()], omega, mass: 1.0 };
        let c = qbm_coefficients(&j, 1.0, 0.5).unwrap();
        assert_eq!(c, CoefficientSet::default());
    }

    #[test]
    fn spin_boson_structure() {
        let j = ohmic();
        let at_zero = spin_boson_coefficients(&j, 1.0, 0.0).unwrap();
        assert_eq!(at_zero.decay_real, 0.0);
        assert_eq!(at_zero.decay_imag, 0.0);
        // Same integrals as the oscillator coefficients with Ω ↔ Δ₀.
        let sb = spin_boson_coefficients(&j, 1.0, 0.3).unwrap();
        let q = qbm_coefficients(&j, 1.0, 0.3).unwrap();
        assert!((sb.dephasing - q.normal_diffusion).abs() < 1e-15);
        assert!((sb.decay_real + q.anomalous_diffusion * j.mass() * 0.3).abs() < 1e-15);
        assert!((sb.decay_imag - q.damping * j.mass() * 0.3).abs() < 1e-15);
        // Refined-grid oracle.
        let fine = spin_boson_coefficients_with(&j, 1.0, 0.3, &QuadratureConfig::default().refined()).unwrap();
        for (a, b) in [
            (sb.dephasing, fine.dephasing),
            (sb.decay_real, fine.decay_real),
            (sb.decay_imag, fine.decay_imag),
        ] {
            assert!(((a - b) / b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn coefficients_stable_under_resolution_doubling() {
        let j = ohmic();
        let a = qbm_coefficients(&j, 3.0, 0.4).unwrap();
        let b = qbm_coefficients_with(&j, 3.0, 0.4, &QuadratureConfig::default().refined()).unwrap();
        for (x, y) in [
            (a.shift, b.shift),
            (a.damping, b.damping),
            (a.normal_diffusion, b.normal_diffusion),
            (a.anomalous_diffusion, b.anomalous_diffusion),
        ] {
            assert!(((x - y) / y).abs() < 1e-4);
        }
    }

    #[test]
    fn cutoff_free_ohmic_is_divergent() {
        let j = SpectralDensity::Ohmic { mass: 1.0, gamma0: 0.1 };
        let err = bath_kernels(&j, 1.0, &[0.1]).unwrap_err();
        assert!(matches!(err, Error::DivergentIntegrand(_)));
        assert!(err.is_numerical());
    }

    #[test]
    fn slow_kernels_are_reported_non_convergent() {
        let j = ohmic();
        let cfg = QuadratureConfig { t_max_factor: 3.0, ..QuadratureConfig::default() };
        assert!(matches!(
            qbm_coefficients_with(&j, 1.0, 0.5, &cfg),
            Err(Error::NonConvergent { .. })
        ));
    }

    #[test]
    fn effective_density_limits() {
        let j = ohmic();
        let cold = effective_spectral_density(&j, 0.0).unwrap();
        for w in [0.1, 1.0, 5.0] {
            assert!((cold.eval(w) - j.eval(w)).abs() < 1e-4 * j.eval(w));
        }
        let t = 0.5;
        let eff = effective_spectral_density(&j, t).unwrap();
        if let SpectralDensity::Sampled { omega, j: vals, .. } = &eff {
            let k = omega.iter().position(|&w| (w - 2.0 * t).abs() < 1e-9).unwrap_or_else(|| {
                omega.iter().enumerate().min_by(|a, b| (a.1 - 1.0).abs().total_cmp(&(b.1 - 1.0).abs())).unwrap().0
            });
            let w = omega[k];
            assert!((vals[k] / j.eval(w) - (w / (2.0 * t)).tanh()).abs() < 1e-12);
            assert!(((1.0f64).tanh() - 0.7616).abs() < 1e-4);
        }
        let hot = effective_spectral_density(&j, 1e6).unwrap();
        assert!((hot.eval(0.5) / (j.eval(0.5) * 0.5 / 2e6) - 1.0).abs() < 1e-3);
    }
}
