use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("qubit index {index} out of range for a {n}-qubit register")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("qubit {0} used twice")]
    DuplicateQubit(usize),
    #[error("register size {0} outside 1..=16")]
    RegisterSize(usize),
    #[error("dimension mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("projection onto a zero-probability branch")]
    ZeroProbability,
    #[error("qubits are entangled with the rest of the register")]
    NotSeparable,
    #[error("degenerate gate: recycle probability is one")]
    Degenerate,
    #[error("quadrature grid too coarse (estimated error {error:.3e}); try n_points = {suggested}")]
    CoarseGrid { error: f64, suggested: usize },
    #[error("chain is empty")]
    EmptyChain,
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
