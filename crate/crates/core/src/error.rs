use thiserror::Error;

/// Errors raised by the simulator and its numeric routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate {gate} expects {expected} target(s), got {got}")]
    GateArity {
        gate: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("targets of a multi-qubit operation must be distinct")]
    DuplicateTargets,

    #[error("custom gate is not unitary (deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("observable is not Hermitian (deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} requires at most {max} qubits, got {got}")]
    TooManyQubits {
        what: &'static str,
        max: usize,
        got: usize,
    },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid Hamiltonian: {0}")]
    InvalidHamiltonian(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("instance has no witness state")]
    MissingWitness,

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
