use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomial degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: matrix has {expected} rows, vector has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("singular pivot {pivot:e} at row {row}")]
    SingularPivot { row: usize, pivot: f64 },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApproxError {
    #[error("function returned a non-finite value at t = {t}")]
    NonFiniteSample { t: f64 },
    #[error("gram solve failed (condition estimate {condition:e}): {source}")]
    GramSolve {
        condition: f64,
        #[source]
        source: LinalgError,
    },
    #[error("coefficient vector has length {found}, basis has {expected} members")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Basis(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unsupported boundary conditions: {0}")]
    UnsupportedBc(String),
    #[error("non-finite {what} at t = {t} during iteration {iteration}")]
    NonFinite {
        what: &'static str,
        t: f64,
        iteration: usize,
    },
    #[error("collocation system failed at iteration {iteration}: {source}")]
    Singular {
        iteration: usize,
        #[source]
        source: LinalgError,
    },
    #[error("derivative order {requested} exceeds the problem order {order}")]
    DerivativeOrder { requested: usize, order: usize },
    #[error(transparent)]
    Basis(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("unknown problem `{0}`")]
    Unknown(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("non-finite residual at t = {t}")]
    NonFinite { t: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
