use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("subsystem index {index} out of range for {n} factors")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("state is not normalized (norm {0:.15})")]
    NotNormalized(f64),

    #[error("density matrix trace is {0:.15}, expected 1")]
    TraceNotOne(f64),

    #[error("density matrix is not positive (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("operator is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("projectors do not form an orthogonal complete set (residual {0:.3e})")]
    IncompleteProjectors(f64),

    #[error("Kraus completeness violated (residual {0:.3e})")]
    Completeness(f64),

    #[error("positivity violated at t = {t}: min eigenvalue {min_eigenvalue:.3e}")]
    PositivityViolation { t: f64, min_eigenvalue: f64 },

    #[error("{what} did not converge (residual {residual:.3e})")]
    NonConvergent { what: String, residual: f64 },

    #[error("divergent integrand: {0}")]
    DivergentIntegrand(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("problem too large: {0}")]
    TooLarge(String),
}

impl Error {
    /// True for failures of a numerical contract (positivity, convergence),
    /// as opposed to bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::PositivityViolation { .. }
                | Error::NonConvergent { .. }
                | Error::DivergentIntegrand(_)
                | Error::GridTooCoarse(_)
                | Error::Completeness(_)
        )
    }
}
