//! Numerical toolkit for decoherence in open quantum systems.
//!
//! * [`quantum`]: states, operators, tensor products, partial traces and
//!   information measures.
//! * [`channels`]: operator-sum (Kraus) maps and indirect measurements.
//! * [`dynamics`]: Lindblad integration, diffusive trajectories and the
//!   Born–Markov bath machinery.
//! * [`models`]: collisional decoherence, quantum Brownian motion, spin–boson
//!   and spin–spin models, physical estimators and Wigner functions.
//! * [`pointer`]: pointer states, decoherence-free subspaces, the
//!   predictability sieve and environment-fragment information.
//! * [`qec`]: the three-qubit phase-flip code under environmental dephasing.
//!
//! Units: ħ = k_B = 1 except in the SI estimators of [`models::estimates`].

pub mod channels;
pub mod dynamics;
pub mod error;
pub mod models;
pub mod pointer;
pub mod qec;
pub mod quantum;
pub mod rng;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
