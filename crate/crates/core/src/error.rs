use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("Jacobi sweeps did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis is not orthonormal (max |B^dagger B - I| = {deviation:e})")]
    NonOrthonormalBasis { deviation: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("integration failure: {0}")]
    IntegrationFailure(String),

    #[error("probability {value:e} is below the clamping threshold")]
    NegativeProbability { value: f64 },

    #[error("support mismatch: q vanishes at cell ({initial}, {final_}) where p = {p:e}")]
    SupportMismatch { initial: usize, final_: usize, p: f64 },

    #[error("inconsistent configuration: {0}")]
    InconsistentConfig(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
