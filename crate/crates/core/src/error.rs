use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty subsystem")]
    EmptySubsystem,

    #[error("mask out of range: bit {bit} in a {n_qubits}-qubit register")]
    MaskOutOfRange { bit: usize, n_qubits: usize },

    #[error("subsystems overlap")]
    SubsystemsOverlap,

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("amplitude vector has length {len}, expected a power of two")]
    BadDimension { len: usize },

    #[error("register of {n_qubits} qubits exceeds the limit of {limit}")]
    RegisterTooLarge { n_qubits: usize, limit: usize },

    #[error("subsystem larger than complement (m = {m}, n = {n})")]
    SubsystemLargerThanComplement { m: u64, n: u64 },

    #[error("system not an environment")]
    SystemNotEnvironment,

    #[error("moments undefined: profile contains an infinite d-factor")]
    MomentsUndefined,

    #[error("enumeration too large: {count} subsets exceeds cap {cap}")]
    EnumerationTooLarge { count: f64, cap: f64 },

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    QuadratureNonconvergent { achieved: f64, requested: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
