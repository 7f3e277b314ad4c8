use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tight-binding parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid k-path: {0}")]
    InvalidKPath(String),

    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: residual {residual:e} exceeds {tol:e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("qubit count mismatch: expected {expected}, got {actual}")]
    QubitMismatch { expected: usize, actual: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("CNOT control and target are both qubit {0}")]
    SameControlTarget(usize),

    #[error("invalid Pauli word {0:?}")]
    InvalidPauliWord(String),

    #[error("missing expectation value for Pauli word {0}")]
    MissingExpectation(String),

    #[error("Pauli word {0} contains X or Y; apply a basis change first")]
    NonDiagonalWord(String),

    #[error("ansatz {kind} takes {expected} parameters, got {actual}")]
    ParameterCount {
        kind: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid bitstring counts: {0}")]
    InvalidCounts(String),

    #[error("invalid readout noise model: {0}")]
    InvalidNoise(String),

    #[error("readout mitigation ill-posed on qubit {qubit}: w01 + w10 = {p_plus} >= 1")]
    MitigationIllPosed { qubit: usize, p_plus: f64 },

    #[error("invalid optimizer configuration: {0}")]
    InvalidOptimizer(String),

    #[error("requested {requested} levels but the space holds only {available}")]
    TooManyLevels { requested: usize, available: usize },

    #[error("level {level} converged to {energy:.6} eV, indistinguishable from a deflated zero")]
    ZeroCapture { level: usize, energy: f64 },

    #[error("grid scan requires a single-qubit decomposition, got {0} qubits")]
    ScanNeedsOneQubit(usize),

    #[error("grid must have at least two nodes per axis")]
    GridTooSmall,
}
