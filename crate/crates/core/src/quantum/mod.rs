//! Finite-dimensional Hilbert-space primitives.
//!
//! States and operators carry the dimensions of their tensor factors so that
//! composition ([`TensorProduct`]) and reduction ([`partial_trace`]) can be
//! expressed by factor index. Units follow ħ = k_B = 1 throughout.

pub mod info;
pub mod io;
pub mod linalg;

pub use info::{entropy, mutual_information, purity, subsystem_entropy};
pub use linalg::{c, re, CMatrix, CVector, C64, I};

use crate::error::{Error, Result};
use linalg::{eigvalsh, hermiticity_error, kron, kron_vec, subset_offsets, trace};

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument(format!("bad factor dimensions {dims:?}")));
    }
    let prod: usize = dims.iter().product();
    if prod != len {
        return Err(Error::DimensionMismatch(format!(
            "factor dimensions {dims:?} multiply to {prod}, data has dimension {len}"
        )));
    }
    Ok(())
}

/// Normalized pure state with tensor-factor dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: CVector,
    dims: Vec<usize>,
}

impl StateVector {
    pub fn new(amps: CVector, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amps.len())?;
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amps, dims })
    }

    /// Builds a state from unnormalized amplitudes.
    pub fn normalized(amps: CVector, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amps.len())?;
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amps: amps / re(norm), dims })
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        Self::normalized(CVector::from_column_slice(amps), vec![amps.len()])
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let d: usize = dims.iter().product();
        if index >= d {
            return Err(Error::IndexOutOfRange { index, n: d });
        }
        let mut amps = CVector::zeros(d);
        amps[index] = re(1.0);
        Self::new(amps, dims)
    }

    /// `n`-qubit computational basis state; `bits[0]` is the leftmost factor.
    pub fn qubits(bits: &[u8]) -> Result<Self> {
        let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1));
        Self::basis(vec![2; bits.len()], index)
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { amps: CVector::from_vec(vec![re(h), re(h)]), dims: vec![2] }
    }

    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { amps: CVector::from_vec(vec![re(h), re(-h)]), dims: vec![2] }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            mat: &self.amps * self.amps.adjoint(),
            dims: self.dims.clone(),
        }
    }

    /// Reduced density matrix of the factors in `keep`.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (kept, traced) = split_factors(&self.dims, keep)?;
        let ko = subset_offsets(&self.dims, &kept);
        let to = subset_offsets(&self.dims, &traced);
        let mut psi = CMatrix::zeros(ko.len(), to.len());
        for (i, &a) in ko.iter().enumerate() {
            for (j, &b) in to.iter().enumerate() {
                psi[(i, j)] = self.amps[a + b];
            }
        }
        Ok(DensityMatrix {
            mat: &psi * psi.adjoint(),
            dims: kept.iter().map(|&k| self.dims[k]).collect(),
        })
    }

    /// Applies `op` (acting on the whole space) and renormalizes.
    pub fn apply(&self, op: &CMatrix) -> Result<Self> {
        if op.ncols() != self.dim() || op.nrows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator {}x{} on state of dimension {}",
                op.nrows(),
                op.ncols(),
                self.dim()
            )));
        }
        Self::normalized(op * &self.amps, self.dims.clone())
    }
}

/// Square operator with tensor-factor dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: CMatrix,
    dims: Vec<usize>,
}

impl Operator {
    pub fn new(mat: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        check_dims(&dims, mat.nrows())?;
        Ok(Self { mat, dims })
    }

    /// Single-factor operator.
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        let n = mat.nrows();
        Self::new(mat, vec![n])
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let d = dims.iter().product();
        Self { mat: linalg::identity(d), dims }
    }

    pub fn pauli_x() -> Self {
        Self { mat: linalg::pauli_x(), dims: vec![2] }
    }

    pub fn pauli_y() -> Self {
        Self { mat: linalg::pauli_y(), dims: vec![2] }
    }

    pub fn pauli_z() -> Self {
        Self { mat: linalg::pauli_z(), dims: vec![2] }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn dagger(&self) -> Self {
        Self { mat: self.mat.adjoint(), dims: self.dims.clone() }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        hermiticity_error(&self.mat) <= tol
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { mat: &self.mat * s, dims: self.dims.clone() }
    }
}

/// Validated density matrix: Hermitian, unit trace, numerically positive.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let rho = Self::new_unchecked(mat, dims)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Checks shape only; physicality is left to [`DensityMatrix::validate`].
    pub fn new_unchecked(mat: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        check_dims(&dims, mat.nrows())?;
        Ok(Self { mat, dims })
    }

    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        let n = mat.nrows();
        Self::new(mat, vec![n])
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self { mat: linalg::identity(d) * re(1.0 / d as f64), dims }
    }

    pub fn validate(&self) -> Result<()> {
        let herm = hermiticity_error(&self.mat);
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = trace(&self.mat);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotOne(tr.re));
        }
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> C64 {
        trace(&self.mat)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.mat)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Averages the matrix with its adjoint.
    pub fn symmetrized(&self) -> Self {
        Self { mat: linalg::symmetrize(&self.mat), dims: self.dims.clone() }
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self { mat: u * &self.mat * u.adjoint(), dims: self.dims.clone() }
    }

    /// Expectation value `Tr(O ρ)`.
    pub fn expectation(&self, op: &CMatrix) -> C64 {
        trace(&(op * &self.mat))
    }
}

/// Trace distance `½‖a − b‖₁`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * eigvalsh(&(a - b)).iter().map(|x| x.abs()).sum::<f64>()
}

/// Kronecker composition of same-kind objects; factor dimensions concatenate.
pub trait TensorProduct: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

fn concat(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

impl TensorProduct for StateVector {
    fn tensor(&self, other: &Self) -> Self {
        Self { amps: kron_vec(&self.amps, &other.amps), dims: concat(&self.dims, &other.dims) }
    }
}

impl TensorProduct for Operator {
    fn tensor(&self, other: &Self) -> Self {
        Self { mat: kron(&self.mat, &other.mat), dims: concat(&self.dims, &other.dims) }
    }
}

impl TensorProduct for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        Self { mat: kron(&self.mat, &other.mat), dims: concat(&self.dims, &other.dims) }
    }
}

/// Free function form of [`TensorProduct::tensor`].
pub fn tensor<T: TensorProduct>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Tensor product of many factors, left to right.
pub fn tensor_all<T: TensorProduct + Clone>(items: &[T]) -> Option<T> {
    let (first, rest) = items.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, x| acc.tensor(x)))
}

fn split_factors(dims: &[usize], keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = dims.len();
    let mut seen = vec![false; n];
    for &k in keep {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, n });
        }
        if seen[k] {
            return Err(Error::InvalidArgument(format!("factor {k} listed twice")));
        }
        seen[k] = true;
    }
    let traced = (0..n).filter(|&k| !seen[k]).collect();
    Ok((keep.to_vec(), traced))
}

/// Reduced density matrix over the factors listed in `keep` (in that order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = rho.dims();
    let (kept, traced) = split_factors(dims, keep)?;
    let ko = subset_offsets(dims, &kept);
    let to = subset_offsets(dims, &traced);
    let m = rho.matrix();
    let mut out = CMatrix::zeros(ko.len(), ko.len());
    for (i, &a) in ko.iter().enumerate() {
        for (j, &b) in ko.iter().enumerate() {
            out[(i, j)] = to.iter().map(|&t| m[(a + t, b + t)]).sum();
        }
    }
    DensityMatrix::new_unchecked(out, kept.iter().map(|&k| dims[k]).collect())
}

/// Inner product `⟨a|b⟩`.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<C64> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch(format!(
            "overlap of states with dims {:?} and {:?}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(a.amplitudes().dotc(b.amplitudes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use linalg::max_abs_diff;

    #[test]
    fn tensor_identities() {
        let i2 = Operator::identity(vec![2]);
        let i4 = i2.tensor(&i2);
        assert_eq!(i4.matrix(), &linalg::identity(4));
        assert_eq!(i4.dims(), &[2, 2]);

        let zz = Operator::pauli_z().tensor(&Operator::pauli_z());
        let diag: Vec<f64> = zz.matrix().diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);

        let s01 = StateVector::qubits(&[0]).unwrap().tensor(&StateVector::qubits(&[1]).unwrap());
        assert_eq!(s01, StateVector::basis(vec![2, 2], 1).unwrap());
    }

    #[test]
    fn partial_trace_of_orthogonal_branches_is_diagonal() {
        let (alpha, beta) = (0.6, 0.8);
        // α|s1⟩|E1⟩ + β|s2⟩|E2⟩ with orthogonal environment states in a qutrit.
        let mut amps = CVector::zeros(6);
        amps[0] = re(alpha); // |0⟩|0⟩
        amps[3 + 2] = re(beta); // |1⟩|2⟩
        let psi = StateVector::new(amps, vec![2, 3]).unwrap();
        let rho_s = partial_trace(&psi.to_density(), &[0]).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[re(0.36), re(0.0), re(0.0), re(0.64)]);
        assert!(max_abs_diff(rho_s.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_indices() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]);
        assert!(matches!(partial_trace(&rho, &[2]), Err(Error::IndexOutOfRange { .. })));
        assert!(partial_trace(&rho, &[0, 0]).is_err());
    }

    #[test]
    fn keep_order_permutes_factors() {
        let a = StateVector::qubits(&[0]).unwrap();
        let b = StateVector::plus();
        let rho = a.tensor(&b).to_density();
        let swapped = partial_trace(&rho, &[1, 0]).unwrap();
        let expected = b.tensor(&a).to_density();
        assert!(max_abs_diff(swapped.matrix(), expected.matrix()) < 1e-15);
    }

    #[test]
    fn reduced_state_matches_partial_trace_of_projector() {
        let amps: Vec<C64> = (0..12).map(|k| c((k as f64).sin(), (k as f64 * 0.7).cos())).collect();
        let psi = StateVector::normalized(CVector::from_vec(amps), vec![2, 3, 2]).unwrap();
        for keep in [vec![0], vec![1, 2], vec![2, 0]] {
            let a = psi.reduced(&keep).unwrap();
            let b = partial_trace(&psi.to_density(), &keep).unwrap();
            assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-14);
        }
    }

    #[test]
    fn overlap_basics() {
        let zero = StateVector::qubits(&[0]).unwrap();
        let one = StateVector::qubits(&[1]).unwrap();
        assert_eq!(overlap(&zero, &one).unwrap(), re(0.0));
        let plus = StateVector::plus();
        assert!((overlap(&plus, &plus).unwrap() - re(1.0)).norm() < 1e-15);
        let pair = zero.tensor(&one);
        assert!(matches!(overlap(&zero, &pair), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn validation_rejects_unphysical_matrices() {
        let not_herm = CMatrix::from_row_slice(2, 2, &[re(0.5), re(0.1), re(0.0), re(0.5)]);
        assert!(matches!(DensityMatrix::from_matrix(not_herm), Err(Error::NotHermitian(_))));
        let bad_trace = linalg::identity(2);
        assert!(matches!(DensityMatrix::from_matrix(bad_trace), Err(Error::TraceNotOne(_))));
        let negative = CMatrix::from_row_slice(2, 2, &[re(1.2), re(0.0), re(0.0), re(-0.2)]);
        assert!(matches!(DensityMatrix::from_matrix(negative), Err(Error::NotPositive(_))));
        assert!(StateVector::new(CVector::from_vec(vec![re(1.0), re(1.0)]), vec![2]).is_err());
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states_is_one() {
        let a = StateVector::qubits(&[0]).unwrap().to_density();
        let b = StateVector::qubits(&[1]).unwrap().to_density();
        assert!((trace_distance(a.matrix(), b.matrix()) - 1.0).abs() < 1e-14);
    }
}
