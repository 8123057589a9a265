//! Collisional decoherence without recoil:
//! `∂ρ(x,x′)/∂t = −F(x−x′) ρ(x,x′)` with
//! `F(Δx) = ∫dq ϱ(q)v(q) ∫dn̂dn̂′/4π (1 − e^{iq(n̂−n̂′)·Δx}) |f|²`.
//!
//! Momenta are carried as wavenumbers `k = q/ħ`, so the phase is
//! `k (n̂−n̂′)·Δx` in any consistent unit system. For isotropic `|f|²` the
//! solid-angle integral reduces to polar angles, and the 2-d Gauss–Legendre
//! rule over `(cos θ, cos θ′)` factorizes into the square of a 1-d sum.
//! Rates follow the corrected normalization (no extra factor of 2π).

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use super::grid::GridState;
use super::units::{BOLTZMANN, HBAR};
use crate::error::{Error, Result};
use crate::quantum::re;

/// Above this `kΔx` the angular factor `sinc²(kΔx) < 5e-7` is dropped.
const SATURATION_ARGUMENT: f64 = 1500.0;
const RULE_SIZES: [usize; 8] = [16, 32, 64, 128, 256, 512, 1024, 1280];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    ShortWavelength,
    LongWavelength,
    Full,
}

/// Tabulated isotropic scattering environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringModel {
    /// Wavenumbers `k = q/ħ` (1/length), ascending.
    pub k: Vec<f64>,
    /// `ϱ` per unit volume per unit wavenumber.
    pub density: Vec<f64>,
    /// `v(k)` (length/time).
    pub speed: Vec<f64>,
    /// Isotropic differential cross-section `|f|²` (area/sr).
    pub cross_section: Vec<f64>,
    pub regime: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceRates {
    /// `Γ_tot` (1/time).
    pub gamma_tot: f64,
    /// `Λ` (1/(time·length²)).
    pub lambda: f64,
}

impl DecoherenceRates {
    /// Regime-limit localization rate: `Λ Δx²` or `Γ_tot`.
    pub fn limit_rate(&self, regime: Regime, dx: f64) -> f64 {
        match regime {
            Regime::LongWavelength => self.lambda * dx * dx,
            _ => self.gamma_tot,
        }
    }
}

impl ScatteringModel {
    pub fn new(
        k: Vec<f64>,
        density: Vec<f64>,
        speed: Vec<f64>,
        cross_section: Vec<f64>,
        regime: Regime,
    ) -> Result<Self> {
        let m = Self { k, density, speed, cross_section, regime };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.k.len();
        if n < 2 || self.density.len() != n || self.speed.len() != n || self.cross_section.len() != n {
            return Err(Error::InvalidArgument(
                "scattering tables must share a length of at least 2".into(),
            ));
        }
        if self.k[0] < 0.0 || self.k.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("wavenumbers must be nonnegative and ascending".into()));
        }
        for (name, v) in [("density", &self.density), ("speed", &self.speed), ("cross_section", &self.cross_section)] {
            if let Some(bad) = v.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be finite and >= 0, got {bad}")));
            }
        }
        Ok(())
    }

    /// Maxwell–Boltzmann gas of particles of mass `particle_mass` (kg) at
    /// `temperature` (K) and `number_density` (1/m³), scattering isotropically
    /// with total cross-section `total_cross_section` (m²). SI units.
    pub fn thermal_gas(
        number_density: f64,
        particle_mass: f64,
        temperature: f64,
        total_cross_section: f64,
        regime: Regime,
    ) -> Result<Self> {
        if !(number_density >= 0.0) || !(particle_mass > 0.0) || !(temperature > 0.0) || !(total_cross_section >= 0.0) {
            return Err(Error::InvalidArgument("gas parameters must be positive".into()));
        }
        let mkt = particle_mass * BOLTZMANN * temperature;
        let k_th = (2.0 * mkt).sqrt() / HBAR;
        let n = 2001;
        let top = 8.0 * k_th;
        let k: Vec<f64> = (0..n).map(|i| top * i as f64 / (n - 1) as f64).collect();
        let norm = number_density * 4.0 * PI * (HBAR * HBAR / (2.0 * PI * mkt)).powf(1.5);
        let density = k.iter().map(|&k| norm * k * k * (-(HBAR * k).powi(2) / (2.0 * mkt)).exp()).collect();
        let speed = k.iter().map(|&k| HBAR * k / particle_mass).collect();
        let cross_section = vec![total_cross_section / (4.0 * PI); n];
        Self::new(k, density, speed, cross_section, regime)
    }

    fn flux_weight(&self, i: usize) -> f64 {
        self.density[i] * self.speed[i] * 4.0 * PI * self.cross_section[i]
    }

    /// Trapezoid over the wavenumber table.
    fn integrate(&self, f: impl Fn(usize) -> f64) -> Result<f64> {
        let n = self.k.len();
        let mut total = 0.0;
        let mut peak = 0.0f64;
        let vals: Vec<f64> = (0..n).map(&f).collect();
        for i in 0..n - 1 {
            total += 0.5 * (self.k[i + 1] - self.k[i]) * (vals[i] + vals[i + 1]);
        }
        for v in &vals {
            peak = peak.max(v.abs());
        }
        if peak > 0.0 && vals[n - 1].abs() > 1e-6 * peak {
            return Err(Error::NonConvergent {
                what: "wavenumber integral (integrand not negligible at the top of the table)".into(),
                residual: vals[n - 1].abs() / peak,
            });
        }
        Ok(total)
    }

    /// `Γ_tot = ∫dk ϱ v σ_tot`.
    pub fn total_rate(&self) -> Result<f64> {
        self.integrate(|i| self.flux_weight(i))
    }

    /// `Λ = ∫dk ϱ v σ_tot k²/3`.
    pub fn scattering_constant(&self) -> Result<f64> {
        self.integrate(|i| self.flux_weight(i) * self.k[i] * self.k[i] / 3.0)
    }

    pub fn rates(&self) -> Result<DecoherenceRates> {
        Ok(DecoherenceRates { gamma_tot: self.total_rate()?, lambda: self.scattering_constant()? })
    }
}

fn rules() -> &'static Vec<Vec<(f64, f64)>> {
    static RULES: OnceLock<Vec<Vec<(f64, f64)>>> = OnceLock::new();
    RULES.get_or_init(|| {
        RULE_SIZES
            .iter()
            .map(|&n| {
                let gl = GaussLegendre::new(NonZeroUsize::new(n).expect("nonzero"));
                // Symmetric rule: keep u ≥ 0 with the weight of its mirror folded in.
                gl.as_node_weight_pairs()
                    .iter()
                    .filter(|(u, _)| *u >= 0.0)
                    .map(|&(u, w)| (u, if u == 0.0 { w } else { 2.0 * w }))
                    .collect()
            })
            .collect()
    })
}

/// `(4π)⁻² |∫dn̂ e^{i y n̂·ẑ}|² = |½∫₋₁¹ du e^{iyu}|²` by Gauss–Legendre.
fn angular_overlap(y: f64) -> f64 {
    if y == 0.0 {
        return 1.0;
    }
    if y > SATURATION_ARGUMENT {
        return 0.0;
    }
    let need = 0.75 * y + 16.0;
    let idx = RULE_SIZES.iter().position(|&n| n as f64 >= need).unwrap_or(RULE_SIZES.len() - 1);
    let half: f64 = rules()[idx].iter().map(|(u, w)| w * (y * u).cos()).sum::<f64>() * 0.5;
    half * half
}

/// `F(Δx)` for separation `dx ≥ 0`.
pub fn localization_rate(model: &ScatteringModel, dx: f64) -> Result<f64> {
    if !(dx >= 0.0) {
        return Err(Error::InvalidArgument(format!("separation must be >= 0, got {dx}")));
    }
    model.validate()?;
    if dx == 0.0 {
        return Ok(0.0);
    }
    model.integrate(|i| model.flux_weight(i) * (1.0 - angular_overlap(model.k[i] * dx)))
}

/// `ρ(x,x′,t) = ρ(x,x′,0) e^{−F(x−x′)t}`.
pub fn evolve_collisional(state: &GridState, model: &ScatteringModel, t: f64) -> Result<GridState> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    let h = state.spacing();
    let rates = (0..state.len())
        .map(|d| localization_rate(model, d as f64 * h))
        .collect::<Result<Vec<_>>>()?;
    state.map_entries(|i, j, z| z * re((-rates[i.abs_diff(j)] * t).exp()))
}

/// `V(p) = V₀ exp(−Γ(p) t)` with `Γ` linear in pressure.
pub fn visibility_vs_pressure(gamma_per_pressure: f64, t_transit: f64, p_grid: &[f64], v0: f64) -> Vec<f64> {
    p_grid.iter().map(|p| v0 * (-gamma_per_pressure * p * t_transit).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::grid::uniform_grid;

    /// Dimensionless gas-like table: ϱ ∝ k² e^{−k²}, v = k, |f|² const.
    fn toy_model(regime: Regime) -> ScatteringModel {
        let n = 4001;
        let k: Vec<f64> = (0..n).map(|i| 8.0 * i as f64 / (n - 1) as f64).collect();
        let density = k.iter().map(|k| k * k * (-k * k).exp()).collect();
        let speed = k.clone();
        ScatteringModel::new(k, density, speed, vec![0.25 / PI; n], regime).unwrap()
    }

    fn sinc2_oracle(model: &ScatteringModel, dx: f64) -> f64 {
        let f = |i: usize| {
            let y = model.k[i] * dx;
            let s = if y == 0.0 { 1.0 } else { y.sin() / y };
            model.flux_weight(i) * (1.0 - s * s)
        };
        (0..model.k.len() - 1).map(|i| 0.5 * (model.k[i + 1] - model.k[i]) * (f(i) + f(i + 1))).sum()
    }

    #[test]
    fn angular_factor_matches_sinc_squared() {
        for y in [1e-3f64, 0.5, 3.0, 40.0, 700.0] {
            let s = y.sin() / y;
            assert!((angular_overlap(y) - s * s).abs() < 1e-13, "y = {y}");
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let m = toy_model(Regime::Full);
        for dx in [0.01, 0.3, 2.0, 25.0] {
            let f = localization_rate(&m, dx).unwrap();
            assert!((f - sinc2_oracle(&m, dx)).abs() < 1e-12 * f.max(1e-12));
        }
        assert_eq!(localization_rate(&m, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn limits() {
        let m = toy_model(Regime::Full);
        let rates = m.rates().unwrap();
        // ∫k³e^{−k²}dk = ½ with σ_tot = 1.
        assert!((rates.gamma_tot - 0.5).abs() < 1e-6);
        let far = localization_rate(&m, 50.0).unwrap();
        assert!((far / rates.gamma_tot - 1.0).abs() < 0.01);
        let near = localization_rate(&m, 1e-3).unwrap();
        assert!((near / (rates.lambda * 1e-6) - 1.0).abs() < 0.01);
        let mut prev = 0.0;
        for i in 1..60 {
            let f = localization_rate(&m, 0.1 * i as f64).unwrap();
            assert!(f >= prev - 1e-14 && f <= rates.gamma_tot * (1.0 + 1e-9));
            prev = f;
        }
    }

    #[test]
    fn truncated_table_is_non_convergent() {
        let n = 101;
        let k: Vec<f64> = (0..n).map(|i| i as f64 * 0.01).collect();
        let m = ScatteringModel::new(k.clone(), vec![1.0; n], k, vec![1.0; n], Regime::Full).unwrap();
        assert!(matches!(m.total_rate(), Err(Error::NonConvergent { .. })));
    }

    #[test]
    fn collisional_evolution_keeps_diagonal() {
        let m = toy_model(Regime::Full);
        let s = GridState::gaussian_superposition(uniform_grid(40, 0.25), &[-2.0, 2.0], 0.4).unwrap();
        let out = evolve_collisional(&s, &m, 3.0).unwrap();
        for i in 0..s.len() {
            assert!((out.density().matrix()[(i, i)] - s.density().matrix()[(i, i)]).norm() < 1e-12);
        }
        assert!(out.cross_block_norm(0.0) < s.cross_block_norm(0.0));
        let same = evolve_collisional(&s, &m, 0.0).unwrap();
        assert_eq!(same.density().matrix(), s.density().matrix());
    }

    #[test]
    fn thermal_gas_rate_is_n_sigma_mean_speed() {
        let (n, mass, t, sigma) = (2.5e25, 4.65e-26, 300.0, 1e-18);
        let gas = ScatteringModel::thermal_gas(n, mass, t, sigma, Regime::ShortWavelength).unwrap();
        let mean_speed = (8.0 * BOLTZMANN * t / (PI * mass)).sqrt();
        let expected = n * sigma * mean_speed;
        assert!((gas.total_rate().unwrap() / expected - 1.0).abs() < 1e-6);
    }

    #[test]
    fn visibility_curve() {
        let v = visibility_vs_pressure(2.0, 0.5, &[0.0, 1.0, 3.0], 0.8);
        assert_eq!(v[0], 0.8);
        assert!((v[1] / 0.8 - (-1.0f64).exp()).abs() < 1e-15);
        let slope = (v[2].ln() - v[1].ln()) / 2.0;
        assert!((slope + 1.0).abs() < 1e-12);
    }
}
