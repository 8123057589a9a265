//! Order-of-magnitude estimators in SI units: relaxation versus decoherence
//! times and the decoherence-timescale table for everyday environments.

use serde::{Deserialize, Serialize};

use super::collisional::{localization_rate, Regime, ScatteringModel};
use super::units::{BOLTZMANN, HBAR};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimescaleReport {
    /// Decoherence time (s).
    pub tau_d: f64,
    /// Relaxation time (s).
    pub tau_r: f64,
    /// `τ_r/τ_d = (Δx/λ_dB)²`.
    pub ratio: f64,
    /// Thermal de Broglie wavelength `ħ/√(2mk_BT)` (m).
    pub lambda_db: f64,
}

pub fn thermal_de_broglie(mass: f64, temperature: f64) -> f64 {
    HBAR / (2.0 * mass * BOLTZMANN * temperature).sqrt()
}

/// Ratio of relaxation to decoherence time for a mass `mass` (kg) at
/// `temperature` (K) in a superposition of separation `dx` (m). Times are
/// reported in units of the relaxation time (`tau_r = 1`).
pub fn timescale_ratio(mass: f64, temperature: f64, dx: f64) -> Result<TimescaleReport> {
    timescale_ratio_with(mass, temperature, dx, 1.0)
}

pub fn timescale_ratio_with(mass: f64, temperature: f64, dx: f64, tau_r: f64) -> Result<TimescaleReport> {
    for (name, v) in [("mass", mass), ("temperature", temperature), ("dx", dx), ("tau_r", tau_r)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
    }
    let lambda_db = thermal_de_broglie(mass, temperature);
    let ratio = (dx / lambda_db).powi(2);
    Ok(TimescaleReport { tau_d: tau_r / ratio, tau_r, ratio, lambda_db })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Environment {
    CosmicBackground,
    RoomTemperaturePhotons,
    BestLaboratoryVacuum,
    Air,
}

impl Environment {
    pub const ALL: [Environment; 4] = [
        Environment::CosmicBackground,
        Environment::RoomTemperaturePhotons,
        Environment::BestLaboratoryVacuum,
        Environment::Air,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Environment::CosmicBackground => "cosmic background radiation",
            Environment::RoomTemperaturePhotons => "photons at room temperature",
            Environment::BestLaboratoryVacuum => "best laboratory vacuum",
            Environment::Air => "air",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectSize {
    DustGrain,
    LargeMolecule,
}

impl ObjectSize {
    pub const ALL: [ObjectSize; 2] = [ObjectSize::DustGrain, ObjectSize::LargeMolecule];

    /// Object radius `a` (m); the superposition separation is taken equal to it.
    pub fn size(self) -> f64 {
        match self {
            ObjectSize::DustGrain => 1e-5,
            ObjectSize::LargeMolecule => 1e-8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ObjectSize::DustGrain => "dust grain",
            ObjectSize::LargeMolecule => "large molecule",
        }
    }
}

/// Published order-of-magnitude decoherence times (s), for display only.
pub fn table1_reference(env: Environment, object: ObjectSize) -> f64 {
    use Environment::*;
    use ObjectSize::*;
    match (env, object) {
        (CosmicBackground, DustGrain) => 1.0,
        (CosmicBackground, LargeMolecule) => 1e24,
        (RoomTemperaturePhotons, DustGrain) => 1e-18,
        (RoomTemperaturePhotons, LargeMolecule) => 1e6,
        (BestLaboratoryVacuum, DustGrain) => 1e-14,
        (BestLaboratoryVacuum, LargeMolecule) => 1e-2,
        (Air, DustGrain) => 1e-31,
        (Air, LargeMolecule) => 1e-19,
    }
}

/// Kinetic description of a scattering gas; the object's geometric
/// cross-section `π a²` is used as `σ_tot`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasParameters {
    /// Number density (1/m³).
    pub number_density: f64,
    /// Mass of one gas particle (kg).
    pub particle_mass: f64,
    /// Gas temperature (K).
    pub temperature: f64,
}

/// User-supplied scattering constants for one table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConstants {
    pub environment: Environment,
    pub object: ObjectSize,
    pub regime: Regime,
    /// `Λ` (1/(s·m²)), required for the long-wavelength regime unless `gas` is given.
    #[serde(default)]
    pub lambda: Option<f64>,
    /// `Γ_tot` (1/s), required for the short-wavelength regime unless `gas` is given.
    #[serde(default)]
    pub gamma_tot: Option<f64>,
    #[serde(default)]
    pub gas: Option<GasParameters>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1Config {
    #[serde(default)]
    pub scenario: Vec<ScenarioConstants>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub environment: Environment,
    pub object: ObjectSize,
    pub dx: f64,
    /// Computed `τ_d` (s), if constants were supplied.
    pub tau_d: Option<f64>,
    /// Published order of magnitude (s).
    pub reference: f64,
}

fn missing(c: &ScenarioConstants, what: &str) -> Error {
    Error::InvalidArgument(format!(
        "missing constant `{what}` for {} / {} in the {:?} regime",
        c.environment.name(),
        c.object.name(),
        c.regime
    ))
}

fn positive(v: f64, what: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!("{what} must be positive, got {v}")))
    }
}

/// `τ_d` for one configured cell: `1/(ΛΔx²)`, `1/Γ_tot` or `1/F(Δx)`.
pub fn scenario_timescale(c: &ScenarioConstants) -> Result<f64> {
    let dx = c.object.size();
    let gas_model = |regime| -> Result<Option<ScatteringModel>> {
        c.gas
            .map(|g| {
                let sigma = std::f64::consts::PI * dx * dx;
                ScatteringModel::thermal_gas(g.number_density, g.particle_mass, g.temperature, sigma, regime)
            })
            .transpose()
    };
    let rate = match c.regime {
        Regime::LongWavelength => match (c.lambda, gas_model(c.regime)?) {
            (Some(l), _) => positive(l, "lambda")? * dx * dx,
            (None, Some(m)) => m.scattering_constant()? * dx * dx,
            (None, None) => return Err(missing(c, "lambda")),
        },
        Regime::ShortWavelength => match (c.gamma_tot, gas_model(c.regime)?) {
            (Some(g), _) => positive(g, "gamma_tot")?,
            (None, Some(m)) => m.total_rate()?,
            (None, None) => return Err(missing(c, "gamma_tot")),
        },
        Regime::Full => match gas_model(c.regime)? {
            Some(m) => localization_rate(&m, dx)?,
            None => return Err(missing(c, "gas")),
        },
    };
    Ok(1.0 / positive(rate, "decoherence rate")?)
}

/// All eight environment/object cells with the reference values, and
/// computed `τ_d` wherever the configuration supplies constants.
pub fn table1_scenarios(config: &Table1Config) -> Result<Vec<Table1Row>> {
    let mut rows = Vec::new();
    for env in Environment::ALL {
        for object in ObjectSize::ALL {
            let mut cells = config.scenario.iter().filter(|c| c.environment == env && c.object == object);
            let tau_d = cells.next().map(scenario_timescale).transpose()?;
            if cells.next().is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate entry for {} / {}",
                    env.name(),
                    object.name()
                )));
            }
            rows.push(Table1Row { environment: env, object, dx: object.size(), tau_d, reference: table1_reference(env, object) });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_at_room_temperature() {
        let r = timescale_ratio(1e-3, 300.0, 1e-2).unwrap();
        assert!(r.ratio.log10() > 39.0 && r.ratio.log10() < 41.0, "ratio {}", r.ratio);
        assert!((r.lambda_db / 3.665e-23 - 1.0).abs() < 1e-3);
        assert!((r.ratio / (1e-2 / r.lambda_db).powi(2) - 1.0).abs() < 1e-10);
        assert_eq!(r.tau_d * r.ratio, r.tau_r);
    }

    #[test]
    fn scaling_and_unit_ratio() {
        let l = thermal_de_broglie(2e-26, 4.0);
        let r = timescale_ratio(2e-26, 4.0, l).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
        let a = timescale_ratio(2e-26, 4.0, 3e-9).unwrap();
        let b = timescale_ratio(2e-26, 4.0, 6e-9).unwrap();
        assert!((b.ratio / a.ratio - 4.0).abs() < 1e-12);
        assert!(timescale_ratio(0.0, 1.0, 1.0).is_err());
    }

    fn lambda_cell(env: Environment, lambda: f64) -> ScenarioConstants {
        ScenarioConstants {
            environment: env,
            object: ObjectSize::LargeMolecule,
            regime: Regime::LongWavelength,
            lambda: Some(lambda),
            gamma_tot: None,
            gas: None,
        }
    }

    #[test]
    fn environment_ratio_is_lambda_ratio() {
        let cfg = Table1Config {
            scenario: vec![lambda_cell(Environment::CosmicBackground, 1e6), lambda_cell(Environment::Air, 3e31)],
        };
        let rows = table1_scenarios(&cfg).unwrap();
        assert_eq!(rows.len(), 8);
        let tau = |env| rows.iter().find(|r| r.environment == env && r.object == ObjectSize::LargeMolecule).unwrap().tau_d.unwrap();
        let ratio = tau(Environment::CosmicBackground) / tau(Environment::Air);
        assert!((ratio / 3e25 - 1.0).abs() < 1e-12);
        assert!(rows.iter().filter(|r| r.tau_d.is_some()).count() == 2);
    }

    #[test]
    fn references_displayed() {
        let rows = table1_scenarios(&Table1Config::default()).unwrap();
        let cell = |e, o| rows.iter().find(|r| r.environment == e && r.object == o).unwrap().reference;
        assert_eq!(cell(Environment::CosmicBackground, ObjectSize::DustGrain), 1.0);
        assert_eq!(cell(Environment::BestLaboratoryVacuum, ObjectSize::LargeMolecule), 1e-2);
    }

    #[test]
    fn missing_constant_is_an_error() {
        let mut c = lambda_cell(Environment::Air, 1.0);
        c.lambda = None;
        assert!(matches!(scenario_timescale(&c), Err(Error::InvalidArgument(_))));
        c.regime = Regime::ShortWavelength;
        assert!(scenario_timescale(&c).is_err());
    }

    #[test]
    fn gas_short_wavelength_rate() {
        let g = GasParameters { number_density: 2.5e25, particle_mass: 4.8e-26, temperature: 300.0 };
        let c = ScenarioConstants {
            environment: Environment::Air,
            object: ObjectSize::LargeMolecule,
            regime: Regime::ShortWavelength,
            lambda: None,
            gamma_tot: None,
            gas: Some(g),
        };
        let mean_speed = (8.0 * BOLTZMANN * 300.0 / (std::f64::consts::PI * 4.8e-26)).sqrt();
        let expected = 1.0 / (2.5e25 * std::f64::consts::PI * 1e-16 * mean_speed);
        assert!((scenario_timescale(&c).unwrap() / expected - 1.0).abs() < 1e-6);
    }
}
