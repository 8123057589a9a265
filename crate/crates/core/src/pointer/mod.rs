//! Pointer states, decoherence-free subspaces, the predictability sieve and
//! environment-fragment information.

mod darwinism;
mod sieve;

pub use darwinism::{
    fragment_curve_csv, fragment_mutual_information, FragmentConfig, FragmentPoint, MAX_FRAGMENT_QUBITS,
};
pub use sieve::{
    predictability_sieve, GeneratorDynamics, ReducedDynamics, SieveCandidate, SieveMeasure, SieveReport,
    SpinSpinDynamics, UnitaryDilation,
};

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quantum::linalg::{eigh, frobenius, identity, kron, propagator_from_eigen};
use crate::quantum::io::vector_to_json;
use crate::quantum::{c, subsystem_entropy, CMatrix, CVector, Operator, StateVector};
use crate::rng;

/// Relative eigenvalue clustering tolerance.
pub const CLUSTER_TOL: f64 = 1e-9;
const INTERSECTION_TOL: f64 = 1e-8;

/// `H_int = Σ_α S_α ⊗ E_α` with optional self-Hamiltonians.
#[derive(Debug, Clone)]
pub struct InteractionSpec {
    terms: Vec<(Operator, Operator)>,
    h_s: Option<Operator>,
    h_e: Option<Operator>,
}

impl InteractionSpec {
    pub fn new(terms: Vec<(Operator, Operator)>) -> Result<Self> {
        let Some((s0, e0)) = terms.first() else {
            return Err(Error::InvalidArgument("interaction needs at least one term".into()));
        };
        let (ds, de) = (s0.dims().to_vec(), e0.dims().to_vec());
        for (s, e) in &terms {
            if s.dims() != ds.as_slice() || e.dims() != de.as_slice() {
                return Err(Error::DimensionMismatch("all S_α (and all E_α) must share dimensions".into()));
            }
        }
        Ok(Self { terms, h_s: None, h_e: None })
    }

    pub fn with_system_hamiltonian(mut self, h: Operator) -> Result<Self> {
        if h.dims() != self.system_dims() {
            return Err(Error::DimensionMismatch("H_S must act on the system".into()));
        }
        self.h_s = Some(h);
        Ok(self)
    }

    pub fn with_environment_hamiltonian(mut self, h: Operator) -> Result<Self> {
        if h.dims() != self.env_dims() {
            return Err(Error::DimensionMismatch("H_E must act on the environment".into()));
        }
        self.h_e = Some(h);
        Ok(self)
    }

    pub fn terms(&self) -> &[(Operator, Operator)] {
        &self.terms
    }

    pub fn system_dims(&self) -> &[usize] {
        self.terms[0].0.dims()
    }

    pub fn env_dims(&self) -> &[usize] {
        self.terms[0].1.dims()
    }

    pub fn system_dim(&self) -> usize {
        self.terms[0].0.dim()
    }

    pub fn env_dim(&self) -> usize {
        self.terms[0].1.dim()
    }

    pub fn system_hamiltonian(&self) -> Option<&Operator> {
        self.h_s.as_ref()
    }

    pub fn interaction_hamiltonian(&self) -> CMatrix {
        let mut h = CMatrix::zeros(self.system_dim() * self.env_dim(), self.system_dim() * self.env_dim());
        for (s, e) in &self.terms {
            h += kron(s.matrix(), e.matrix());
        }
        h
    }

    /// `H_S ⊗ I + I ⊗ H_E + H_int`.
    pub fn total_hamiltonian(&self) -> CMatrix {
        let mut h = self.interaction_hamiltonian();
        if let Some(hs) = &self.h_s {
            h += kron(hs.matrix(), &identity(self.env_dim()));
        }
        if let Some(he) = &self.h_e {
            h += kron(&identity(self.system_dim()), he.matrix());
        }
        h
    }

    fn check_hermitian(&self) -> Result<()> {
        for (s, _) in &self.terms {
            if !s.is_hermitian(1e-10) {
                return Err(Error::NotHermitian(crate::quantum::linalg::hermiticity_error(s.matrix())));
            }
        }
        Ok(())
    }
}

/// `‖[O ⊗ I, H_int]‖_F / (‖O‖_F ‖H_int‖_F)`.
pub fn commutativity_residual(o: &Operator, spec: &InteractionSpec) -> Result<f64> {
    if o.dim() != spec.system_dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator of dimension {} for a system of dimension {}",
            o.dim(),
            spec.system_dim()
        )));
    }
    let h = spec.interaction_hamiltonian();
    let lifted = kron(o.matrix(), &identity(spec.env_dim()));
    let scale = frobenius(o.matrix()) * frobenius(&h);
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(frobenius(&(&lifted * &h - &h * &lifted)) / scale)
}

/// Eigenspaces of a Hermitian matrix with eigenvalues clustered to within
/// `CLUSTER_TOL·‖S‖`.
fn eigenspaces(s: &CMatrix) -> Vec<(f64, CMatrix)> {
    let (vals, vecs) = eigh(s);
    let norm = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = CLUSTER_TOL * norm.max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || vals[i] - vals[i - 1] > tol {
            let mean = vals[start..i].iter().sum::<f64>() / (i - start) as f64;
            out.push((mean, vecs.columns(start, i - start).into_owned()));
            start = i;
        }
    }
    out
}

/// Orthonormal basis of the intersection of two column spans.
fn intersect(a: &CMatrix, b: &CMatrix) -> Option<CMatrix> {
    let m = a.adjoint() * b;
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1.0 - INTERSECTION_TOL)
        .collect();
    if keep.is_empty() {
        return None;
    }
    let cols: Vec<CVector> = keep.iter().map(|&i| a * u.column(i)).collect();
    Some(CMatrix::from_columns(&cols))
}

/// A joint eigenspace of all `S_α`.
#[derive(Debug, Clone)]
pub struct JointEigenspace {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns.
    pub basis: CMatrix,
}

impl JointEigenspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// All joint eigenspaces, ordered by decreasing dimension and then by
/// decreasing eigenvalue tuple.
pub fn joint_eigenspaces(spec: &InteractionSpec) -> Result<Vec<JointEigenspace>> {
    spec.check_hermitian()?;
    let mut spaces = vec![JointEigenspace { eigenvalues: Vec::new(), basis: identity(spec.system_dim()) }];
    for (s, _) in spec.terms() {
        let eig = eigenspaces(s.matrix());
        let mut next = Vec::new();
        for space in &spaces {
            for (lambda, cols) in &eig {
                if let Some(basis) = intersect(&space.basis, cols) {
                    let mut eigenvalues = space.eigenvalues.clone();
                    eigenvalues.push(*lambda);
                    next.push(JointEigenspace { eigenvalues, basis });
                }
            }
        }
        spaces = next;
        if spaces.is_empty() {
            break;
        }
    }
    spaces.sort_by(|a, b| {
        b.dim().cmp(&a.dim()).then_with(|| {
            b.eigenvalues.partial_cmp(&a.eigenvalues).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    Ok(spaces)
}

#[derive(Debug, Clone)]
pub struct PointerState {
    pub state: StateVector,
    pub eigenvalues: Vec<f64>,
}

/// Simultaneous eigenvectors of every `S_α`, one orthonormal basis per joint
/// eigenspace. Empty when the terms share no eigenvector.
pub fn pointer_states(spec: &InteractionSpec) -> Result<Vec<PointerState>> {
    let dims = spec.system_dims().to_vec();
    let mut out = Vec::new();
    for space in joint_eigenspaces(spec)? {
        for col in space.basis.column_iter() {
            out.push(PointerState {
                state: StateVector::normalized(col.into_owned(), dims.clone())?,
                eigenvalues: space.eigenvalues.clone(),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct DfsResult {
    pub basis: Vec<StateVector>,
    /// Shared eigenvalue `λ^(α)` of each term.
    pub eigenvalues: Vec<f64>,
    pub dimension: usize,
    /// `‖(I − P) H_S P‖_F` when a system Hamiltonian is given.
    pub drift: Option<f64>,
}

impl DfsResult {
    /// Basis as a JSON list of amplitude arrays.
    pub fn basis_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.basis.iter().map(|b| vector_to_json(b.amplitudes())).collect())
    }

    pub fn projector(&self) -> CMatrix {
        let d = self.basis.first().map(|b| b.dim()).unwrap_or(0);
        let mut p = CMatrix::zeros(d, d);
        for b in &self.basis {
            p += b.amplitudes() * b.amplitudes().adjoint();
        }
        p
    }
}

fn dfs_from_space(spec: &InteractionSpec, space: Option<JointEigenspace>) -> Result<DfsResult> {
    let Some(space) = space else {
        return Ok(DfsResult { basis: Vec::new(), eigenvalues: Vec::new(), dimension: 0, drift: None });
    };
    let dims = spec.system_dims().to_vec();
    let basis = space
        .basis
        .column_iter()
        .map(|c| StateVector::normalized(c.into_owned(), dims.clone()))
        .collect::<Result<Vec<_>>>()?;
    let mut result = DfsResult { dimension: basis.len(), basis, eigenvalues: space.eigenvalues, drift: None };
    if let Some(hs) = spec.system_hamiltonian() {
        let p = result.projector();
        let q = identity(p.nrows()) - &p;
        result.drift = Some(frobenius(&(q * hs.matrix() * p)));
    }
    Ok(result)
}

/// Largest joint eigenspace of the `S_α`; ties go to the greatest eigenvalue
/// tuple.
pub fn dfs_find(spec: &InteractionSpec) -> Result<DfsResult> {
    let space = joint_eigenspaces(spec)?.into_iter().next();
    dfs_from_space(spec, space)
}

/// Largest entanglement entropy (bits) between system and environment for a
/// random DFS state evolved under `exp(−iH_int t)` from `ψ ⊗ env`.
pub fn dfs_certificate(
    spec: &InteractionSpec,
    dfs: &DfsResult,
    env: &StateVector,
    times: &[f64],
    seed: u64,
) -> Result<f64> {
    if dfs.dimension == 0 {
        return Ok(0.0);
    }
    if env.dim() != spec.env_dim() {
        return Err(Error::DimensionMismatch("environment state dimension".into()));
    }
    let mut rng = rng::stream(seed, 0);
    let mut psi = CVector::zeros(spec.system_dim());
    for b in &dfs.basis {
        let (x, y): (f64, f64) = (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
        psi += b.amplitudes() * c(x, y);
    }
    let total = crate::quantum::linalg::kron_vec(&psi.normalize(), env.amplitudes());
    let mut dims = spec.system_dims().to_vec();
    dims.extend_from_slice(spec.env_dims());
    let sys: Vec<usize> = (0..spec.system_dims().len()).collect();
    let (vals, vecs) = eigh(&spec.interaction_hamiltonian());
    let mut worst = 0.0f64;
    for &t in times {
        let state = StateVector::new(propagator_from_eigen(&vals, &vecs, t) * &total, dims.clone())?;
        worst = worst.max(subsystem_entropy(&state, &sys)?);
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
pub struct CollectiveDfs {
    pub n: usize,
    /// Explicit basis for `N ≤ 14`.
    pub dfs: Option<DfsResult>,
    /// Collective eigenvalue `m` of the chosen class.
    pub m: i64,
    /// `C(N, N/2)` for even `N`, the largest class otherwise.
    pub dimension: f64,
    /// `log₂(dimension)/N`.
    pub efficiency: f64,
    /// `N − ½log₂(πN/2)`.
    pub stirling_log2: f64,
    /// Odd `N`: the `m = 0` space is empty.
    pub odd: bool,
}

impl CollectiveDfs {
    pub fn log2_dimension(&self) -> f64 {
        self.dimension.log2()
    }

    /// Whole logical qubits that fit in the subspace.
    pub fn logical_qubits(&self) -> usize {
        (self.log2_dimension() + 1e-12).floor() as usize
    }
}

fn log2_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).log2() - ((i + 1) as f64).log2()).sum()
}

/// `S_z = Σ_j σ_z^(j)` on `n` qubits.
pub fn collective_sz(n: usize) -> Result<Operator> {
    let d = 1usize << n;
    let diag: Vec<_> = (0..d).map(|i| c(n as f64 - 2.0 * i.count_ones() as f64, 0.0)).collect();
    Operator::new(CMatrix::from_diagonal(&CVector::from_vec(diag)), vec![2; n])
}

/// Decoherence-free subspace of collective dephasing `S_z ⊗ E` on `n` qubits.
pub fn collective_dfs(n: usize) -> Result<CollectiveDfs> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one qubit".into()));
    }
    let odd = n % 2 == 1;
    let zeros = n / 2 + usize::from(odd);
    let m = 2 * zeros as i64 - n as i64;
    let log2_dim = log2_binomial(n, zeros);
    let dfs = if n <= 14 {
        let dims = vec![2; n];
        let basis = (0..1usize << n)
            .filter(|i| n - i.count_ones() as usize == zeros)
            .map(|i| StateVector::basis(dims.clone(), i))
            .collect::<Result<Vec<_>>>()?;
        Some(DfsResult { dimension: basis.len(), basis, eigenvalues: vec![m as f64], drift: None })
    } else {
        None
    };
    let nf = n as f64;
    Ok(CollectiveDfs {
        n,
        dfs,
        m,
        dimension: 2f64.powf(log2_dim),
        efficiency: log2_dim / nf,
        stirling_log2: nf - 0.5 * (std::f64::consts::PI * nf / 2.0).log2(),
        odd,
    })
}
