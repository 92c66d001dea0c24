use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite input: {0}")]
    NonFinite(f64),
    #[error("instance has no pieces")]
    Empty,
    #[error("piece {index} has right end {right} but piece {next} starts at {next_left}", next = index + 1)]
    NonAbutting {
        index: usize,
        right: f64,
        next_left: f64,
    },
    #[error("piece {index} is degenerate: [{left}, {right}]")]
    DegeneratePiece { index: usize, left: f64, right: f64 },
    #[error("empty window [{0}, {1}]")]
    EmptyWindow(f64, f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("query point is not finite: {0}")]
    NonFiniteQuery(f64),
    #[error("query budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },
    #[error("oracle source does not provide function values")]
    ValuesUnavailable,
    #[error("adversary session is closed")]
    SessionClosed,
    #[error("invalid rescaling parameter: {0}")]
    InvalidScale(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("solver needs a zeroth+first-order oracle")]
    NeedsValues,
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdversaryError {
    #[error("adversary session is closed")]
    SessionClosed,
    #[error("query point is not finite: {0}")]
    NonFiniteQuery(f64),
    #[error("invalid epsilon {0}")]
    InvalidEpsilon(f64),
    #[error("unknown solver `{0}`")]
    UnknownSolver(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("protocol error on line {line}: {message}")]
    Protocol { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("invalid trial spec: {0}")]
    InvalidSpec(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
