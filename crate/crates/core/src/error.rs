use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m - m^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("subset mask is empty")]
    EmptySubset,

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("Kraus operators are not trace preserving (max deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("invalid amplitudes: |a|^2 + |b|^2 = {0}")]
    InvalidAmplitudes(f64),

    #[error("{qubits} qubits exceed the configured maximum of {max}")]
    DimensionTooLarge { qubits: usize, max: usize },

    #[error("invalid state factor: {0}")]
    InvalidFactor(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("n = {n} exceeds the enumeration limit of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("derivative has weight {numerator:e} on a zero-population direction")]
    SingularDirection { numerator: f64 },

    #[error("invalid gate {index}: {reason}")]
    InvalidGate { index: usize, reason: String },

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("matrix entries are not finite")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, Error>;
