use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("amplitude vector has zero (or sub-1e-14) norm")]
    ZeroNorm,
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("expected {expected} amplitudes, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("qubit {qubit} out of range for {num_qubits} qubits")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),
    #[error("number of qubits must be between 1 and {max}, got {got}")]
    QubitCount { got: usize, max: usize },
    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("operator dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid bipartition: {0}")]
    InvalidSplit(&'static str),
    #[error("outcome {outcome} on qubit {qubit} has zero probability")]
    ZeroProbability { qubit: usize, outcome: u8 },
    #[error("invalid lattice site ({protofilament}, {row})")]
    InvalidSite { protofilament: usize, row: usize },
    #[error("sites are not lattice neighbors")]
    NotAdjacent,
    #[error("patterns or neurons belong to different lattice geometries")]
    GeometryMismatch,
    #[error("helical pathway must start every 3, 5 or 8 rows, got {0}")]
    InvalidHelix(usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("no neuron with id {0}")]
    UnknownNeuron(u64),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}
