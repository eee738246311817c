use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("gate targets must be distinct, got ({0}, {0})")]
    EqualTargets(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("partial trace needs a nonempty set of kept qubits")]
    EmptyKeepSet,

    #[error("eta must lie in (0, 1], got {0}")]
    InvalidEta(f64),

    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),

    #[error(
        "Haar-ball rejection sampler accepted {accepted} of {attempts} draws at epsilon = {epsilon}; \
         acceptance rate is below 1e-4, use the Pauli-Hamiltonian sampler instead"
    )]
    RejectionStalled { epsilon: f64, attempts: usize, accepted: usize },

    #[error("search space too large ({what}); lower the gate budget or switch to optimized mode")]
    SearchBudget { what: String },

    #[error("regime violation: {0}")]
    Regime(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
