//! Concrete decoherence models, SI estimators and Wigner functions.

pub mod collisional;
pub mod estimates;
pub mod grid;
pub mod oscillator;
pub mod spin_boson;
pub mod spin_spin;
pub mod units;
pub mod wigner;

pub use collisional::{
    evolve_collisional, localization_rate, visibility_vs_pressure, DecoherenceRates, Regime, ScatteringModel,
};
pub use estimates::{table1_scenarios, timescale_ratio, Table1Config, TimescaleReport};
pub use grid::{uniform_grid, GridState};
pub use oscillator::{
    caldeira_leggett_spec, tail_population, truncation_certified, CaldeiraLeggett, CaldeiraLeggettParams,
    FreeParticleGrid, OscillatorBasis,
};
pub use spin_boson::{
    spin_boson_born_markov_spec, spin_boson_exact_dephasing, DephasingResult, SpinBosonBornMarkov,
};
pub use spin_spin::{spin_spin_exact, spin_spin_state, total_hamiltonian, SpinEnvironment, SpinSpinResult};
pub use wigner::{wigner_transform, wigner_transform_oscillator, WignerGrid};
