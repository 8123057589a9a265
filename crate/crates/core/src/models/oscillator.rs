//! Quantum Brownian motion: the Caldeira–Leggett equation for a harmonic
//! oscillator in a truncated number basis, and the free-particle variant on a
//! position grid.

use serde::{Deserialize, Serialize};

use super::grid::GridState;
use crate::dynamics::Generator;
use crate::error::{Error, Result};
use crate::quantum::{c, re, CMatrix, CVector, DensityMatrix, StateVector, C64};

pub const DEFAULT_N_MAX: usize = 60;
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Position and momentum in the basis `|0⟩ … |n_max⟩`.
#[derive(Debug, Clone)]
pub struct OscillatorBasis {
    pub n_max: usize,
    pub mass: f64,
    pub omega: f64,
    pub x: CMatrix,
    pub p: CMatrix,
}

fn ladder(dim: usize) -> CMatrix {
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = re((n as f64).sqrt());
    }
    a
}

impl OscillatorBasis {
    pub fn new(n_max: usize, mass: f64, omega: f64) -> Result<Self> {
        if n_max < 4 {
            return Err(Error::InvalidArgument(format!("n_max must be >= 4, got {n_max}")));
        }
        if !(mass > 0.0) || !(omega > 0.0) {
            return Err(Error::InvalidArgument("mass and frequency must be positive".into()));
        }
        let (x, p) = Self::quadratures(n_max + 1, mass, omega);
        Ok(Self { n_max, mass, omega, x, p })
    }

    fn quadratures(dim: usize, mass: f64, omega: f64) -> (CMatrix, CMatrix) {
        let a = ladder(dim);
        let ad = a.adjoint();
        let x = (&a + &ad) * re(1.0 / (2.0 * mass * omega).sqrt());
        let p = (&ad - &a) * c(0.0, (mass * omega / 2.0).sqrt());
        (x, p)
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// `p²/2M + ½MΩ′²x²`, with the squares formed before truncation so the
    /// top level is not distorted.
    pub fn hamiltonian(&self, omega_sq: f64) -> CMatrix {
        let d = self.dim();
        let (x, p) = Self::quadratures(d + 1, self.mass, self.omega);
        let h = &p * &p * re(0.5 / self.mass) + &x * &x * re(0.5 * self.mass * omega_sq);
        h.view((0, 0), (d, d)).into_owned()
    }

    /// Normalized coherent state centred at `(x0, p0)`.
    pub fn coherent_state(&self, x0: f64, p0: f64) -> StateVector {
        let alpha = c(x0 * (self.mass * self.omega / 2.0).sqrt(), p0 / (2.0 * self.mass * self.omega).sqrt());
        let mut amp = CVector::zeros(self.dim());
        let mut term = re((-0.5 * alpha.norm_sqr()).exp());
        for n in 0..self.dim() {
            amp[n] = term;
            term *= alpha / (n as f64 + 1.0).sqrt();
        }
        StateVector::normalized(amp, vec![self.dim()]).expect("nonzero amplitudes")
    }

    /// `(|x0⟩ + |−x0⟩)/N` built from coherent states.
    pub fn cat_state(&self, x0: f64) -> StateVector {
        let a = self.coherent_state(x0, 0.0);
        let b = self.coherent_state(-x0, 0.0);
        StateVector::normalized(a.amplitudes() + b.amplitudes(), vec![self.dim()]).expect("nonzero amplitudes")
    }

    pub fn fock_state(&self, n: usize) -> Result<StateVector> {
        StateVector::basis(vec![self.dim()], n)
    }
}

/// Population in the top `levels` number states.
pub fn tail_population(rho: &DensityMatrix, levels: usize) -> f64 {
    let d = rho.dim();
    let m = rho.matrix();
    (d.saturating_sub(levels)..d).map(|n| m[(n, n)].re).sum()
}

/// Truncation is certified when the top tenth of the levels (at least two)
/// holds less than [`TAIL_TOLERANCE`].
pub fn truncation_certified(rho: &DensityMatrix) -> bool {
    tail_population(rho, (rho.dim() / 10).max(2)) < TAIL_TOLERANCE
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaldeiraLeggettParams {
    pub mass: f64,
    pub omega: f64,
    pub gamma0: f64,
    pub cutoff: f64,
    pub temperature: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Drop the dissipative `−iγ₀[x,{p,ρ}]` term.
    #[serde(default)]
    pub pure_decoherence: bool,
}

fn default_n_max() -> usize {
    DEFAULT_N_MAX
}

/// Nonzero entries of a banded operator.
#[derive(Debug, Clone)]
struct Sparse(Vec<(usize, usize, C64)>);

impl Sparse {
    fn from_dense(m: &CMatrix) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if m[(i, j)].norm() > 1e-14 {
                    entries.push((i, j, m[(i, j)]));
                }
            }
        }
        Self(entries)
    }

    /// `S·ρ − ρ·S`
    fn commutator(&self, rho: &CMatrix) -> CMatrix {
        self.combine(rho, -1.0)
    }

    /// `S·ρ + ρ·S`
    fn anticommutator(&self, rho: &CMatrix) -> CMatrix {
        self.combine(rho, 1.0)
    }

    fn combine(&self, rho: &CMatrix, sign: f64) -> CMatrix {
        let d = rho.nrows();
        let mut out = CMatrix::zeros(d, d);
        for &(i, k, v) in &self.0 {
            for j in 0..d {
                out[(i, j)] += v * rho[(k, j)];
            }
            let w = v * sign;
            for r in 0..d {
                out[(r, k)] += rho[(r, i)] * w;
            }
        }
        out
    }
}

/// `dρ/dt = −i[H′,ρ] − iγ₀[x,{p,ρ}] − 2Mγ₀T[x,[x,ρ]]`.
#[derive(Debug, Clone)]
pub struct CaldeiraLeggett {
    pub params: CaldeiraLeggettParams,
    pub basis: OscillatorBasis,
    hamiltonian: CMatrix,
    h_sparse: Sparse,
    x_sparse: Sparse,
    p_sparse: Sparse,
    scale: f64,
}

impl CaldeiraLeggett {
    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    /// Bare oscillator energy `p²/2M + ½MΩ²x²`.
    pub fn bare_hamiltonian(&self) -> CMatrix {
        self.basis.hamiltonian(self.basis.omega * self.basis.omega)
    }

    pub fn diffusion(&self) -> f64 {
        2.0 * self.params.mass * self.params.gamma0 * self.params.temperature
    }

    /// Localization rate `D (Δx)²` for a separation `dx`.
    pub fn localization_rate(&self, dx: f64) -> f64 {
        self.diffusion() * dx * dx
    }
}

pub fn caldeira_leggett_spec(params: CaldeiraLeggettParams) -> Result<CaldeiraLeggett> {
    let CaldeiraLeggettParams { mass, omega, gamma0, cutoff, temperature, n_max, .. } = params;
    if !(gamma0 >= 0.0) || !(cutoff >= 0.0) || !(temperature >= 0.0) {
        return Err(Error::InvalidArgument("gamma0, cutoff and temperature must be >= 0".into()));
    }
    let omega_sq = omega * omega - 2.0 * gamma0 * cutoff;
    if !(omega_sq > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "renormalized frequency squared Ω² − 2γ₀Λ = {omega_sq} must be positive"
        )));
    }
    let basis = OscillatorBasis::new(n_max, mass, omega)?;
    let hamiltonian = basis.hamiltonian(omega_sq);
    let x_max = (2.0 * (n_max as f64 + 1.0) / (mass * omega)).sqrt();
    let p_max = (2.0 * (n_max as f64 + 1.0) * mass * omega).sqrt();
    let scale = omega_sq.sqrt() * (n_max as f64 + 0.5)
        + 2.0 * gamma0 * x_max * p_max
        + 2.0 * mass * gamma0 * temperature * 4.0 * x_max * x_max;
    Ok(CaldeiraLeggett {
        params,
        h_sparse: Sparse::from_dense(&hamiltonian),
        x_sparse: Sparse::from_dense(&basis.x),
        p_sparse: Sparse::from_dense(&basis.p),
        basis,
        hamiltonian,
        scale,
    })
}

impl Generator for CaldeiraLeggett {
    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let mut out = self.h_sparse.commutator(rho) * c(0.0, -1.0);
        if self.diffusion() != 0.0 {
            let xr = self.x_sparse.commutator(rho);
            out -= self.x_sparse.commutator(&xr) * re(self.diffusion());
        }
        if !self.params.pure_decoherence && self.params.gamma0 != 0.0 {
            let anti = self.p_sparse.anticommutator(rho);
            out += self.x_sparse.commutator(&anti) * c(0.0, -self.params.gamma0);
        }
        out
    }

    fn rate_scale(&self) -> f64 {
        self.scale
    }
}

/// Free particle of mass `m` on a position grid:
/// `∂ρ/∂t = (i/2m)(∂x² − ∂x′²)ρ − γ(x−x′)(∂x − ∂x′)ρ − D(x−x′)²ρ`,
/// `D = 2mγT`, central differences with Dirichlet boundaries.
#[derive(Debug, Clone)]
pub struct FreeParticleGrid {
    x: Vec<f64>,
    spacing: f64,
    pub mass: f64,
    pub gamma: f64,
    pub temperature: f64,
}

impl FreeParticleGrid {
    pub fn new(x: Vec<f64>, mass: f64, gamma: f64, temperature: f64) -> Result<Self> {
        if !(mass > 0.0) || !(gamma >= 0.0) || !(temperature >= 0.0) {
            return Err(Error::InvalidArgument("need mass > 0, gamma >= 0, T >= 0".into()));
        }
        if x.len() < 3 {
            return Err(Error::InvalidArgument("grid needs at least three points".into()));
        }
        let spacing = x[1] - x[0];
        Ok(Self { x, spacing, mass, gamma, temperature })
    }

    pub fn for_state(state: &GridState, mass: f64, gamma: f64, temperature: f64) -> Result<Self> {
        Self::new(state.x().to_vec(), mass, gamma, temperature)
    }

    pub fn diffusion(&self) -> f64 {
        2.0 * self.mass * self.gamma * self.temperature
    }

    /// Long-time growth rate of `ΔX²`, `D/(2m²γ²)`.
    pub fn spreading_rate(&self) -> f64 {
        self.diffusion() / (2.0 * self.mass * self.mass * self.gamma * self.gamma)
    }
}

impl Generator for FreeParticleGrid {
    fn dim(&self) -> usize {
        self.x.len()
    }

    fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let n = self.x.len();
        let h = self.spacing;
        let at = |i: isize, j: isize| -> C64 {
            if i < 0 || j < 0 || i >= n as isize || j >= n as isize {
                C64::new(0.0, 0.0)
            } else {
                rho[(i as usize, j as usize)]
            }
        };
        let kin = c(0.0, 0.5 / (self.mass * h * h));
        let drift = self.gamma / (2.0 * h);
        let diff = self.diffusion();
        CMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (i as isize, j as isize);
            let r = rho[(i, j)];
            let lap = at(a + 1, b) + at(a - 1, b) - at(a, b + 1) - at(a, b - 1);
            let grad = at(a + 1, b) - at(a - 1, b) - at(a, b + 1) + at(a, b - 1);
            let dx = self.x[i] - self.x[j];
            kin * lap - grad * (drift * dx) - r * (diff * dx * dx)
        })
    }

    fn rate_scale(&self) -> f64 {
        let span = self.x[self.x.len() - 1] - self.x[0];
        2.0 / (self.mass * self.spacing * self.spacing) + self.gamma * span / self.spacing + self.diffusion() * span * span
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve_with;
    use crate::models::grid::uniform_grid;
    use crate::quantum::linalg::{commutator, hermiticity_error, trace};

    fn params(gamma0: f64, temperature: f64) -> CaldeiraLeggettParams {
        CaldeiraLeggettParams {
            mass: 1.0,
            omega: 1.0,
            gamma0,
            cutoff: 1.0,
            temperature,
            n_max: 40,
            pure_decoherence: false,
        }
    }

    fn energy(h: &CMatrix, rho: &DensityMatrix) -> f64 {
        trace(&(h * rho.matrix())).re
    }

    #[test]
    fn small_cutoff_rejected() {
        assert!(caldeira_leggett_spec(CaldeiraLeggettParams { n_max: 3, ..params(0.0, 0.0) }).is_err());
        assert!(caldeira_leggett_spec(CaldeiraLeggettParams { cutoff: 1.0, gamma0: 0.6, ..params(0.0, 0.0) }).is_err());
    }

    #[test]
    fn hamiltonian_is_exact_ladder() {
        let cl = caldeira_leggett_spec(params(0.0, 0.0)).unwrap();
        for n in 0..=40 {
            assert!((cl.hamiltonian()[(n, n)].re - (n as f64 + 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_oscillator_conserves_energy() {
        let cl = caldeira_leggett_spec(params(0.0, 0.0)).unwrap();
        let rho0 = cl.basis.coherent_state(1.5, 0.5).to_density();
        let period = 2.0 * std::f64::consts::PI;
        let series = evolve_with(&cl, &rho0, 10.0 * period, 5e-3, 1200).unwrap();
        let e0 = energy(cl.hamiltonian(), &rho0);
        for s in &series.states {
            assert!((energy(cl.hamiltonian(), s) - e0).abs() < 1e-8);
        }
    }

    #[test]
    fn coherent_state_moments() {
        let b = OscillatorBasis::new(40, 2.0, 0.5).unwrap();
        let psi = b.coherent_state(1.2, -0.7).to_density();
        assert!((trace(&(&b.x * psi.matrix())).re - 1.2).abs() < 1e-10);
        assert!((trace(&(&b.p * psi.matrix())).re + 0.7).abs() < 1e-10);
        assert!(truncation_certified(&psi));
    }

    #[test]
    fn rhs_hermitian_and_traceless() {
        let cl = caldeira_leggett_spec(params(0.05, 3.0)).unwrap();
        let rho = cl.basis.cat_state(1.5).to_density();
        let r = cl.rhs(rho.matrix());
        let (x, p, m) = (&cl.basis.x, &cl.basis.p, rho.matrix());
        let dense = commutator(cl.hamiltonian(), m) * c(0.0, -1.0)
            - commutator(x, &commutator(x, m)) * re(cl.diffusion())
            + commutator(x, &(p * m + m * p)) * c(0.0, -0.05);
        assert!((&r - dense).norm() < 1e-10);
        assert!(hermiticity_error(&r) < 1e-10);
        assert!(trace(&r).norm() < 1e-9);
    }

    #[test]
    fn stationary_energy_approaches_equipartition() {
        let t = 2.0;
        let cl = caldeira_leggett_spec(CaldeiraLeggettParams { n_max: 30, ..params(0.1, t) }).unwrap();
        let rho0 = cl.basis.fock_state(0).unwrap().to_density();
        let series = evolve_with(&cl, &rho0, 20.0, 5e-3, 500).unwrap();
        let gaps: Vec<f64> = series.states.iter().map(|s| (t - energy(cl.hamiltonian(), s)).abs()).collect();
        assert!(gaps.windows(2).all(|w| w[1] <= w[0] + 1e-3), "{gaps:?}");
        assert!(*gaps.last().unwrap() < 0.03 * t, "{gaps:?}");
    }

    #[test]
    fn free_particle_rhs_is_traceless_and_hermitian() {
        let s = GridState::gaussian_superposition(uniform_grid(30, 0.3), &[0.5], 0.8).unwrap();
        let g = FreeParticleGrid::for_state(&s, 1.0, 0.7, 2.0).unwrap();
        let r = g.rhs(s.density().matrix());
        assert!(trace(&r).norm() < 1e-12);
        assert!(hermiticity_error(&r) < 1e-12);
    }

    #[test]
    fn free_particle_without_bath_spreads_ballistically() {
        let sigma = 1.0;
        let s = GridState::gaussian_superposition(uniform_grid(120, 0.2), &[0.0], sigma).unwrap();
        let g = FreeParticleGrid::for_state(&s, 1.0, 0.0, 0.0).unwrap();
        let out = evolve_with(&g, s.density(), 1.0, 1e-3, 1000).unwrap();
        let expected = sigma * sigma + 1.0 / (4.0 * sigma * sigma);
        let got = s.with_density(out.last().clone()).unwrap().position_variance();
        assert!((got / expected - 1.0).abs() < 0.01, "{got} vs {expected}");
    }
}
