use thiserror::Error;

/// Errors raised by the numerical and parsing layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not self-adjoint (max |M - M*| = {defect:e})")]
    NotSelfAdjoint { defect: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("operator is not positive definite (smallest eigenvalue {lambda_min:e})")]
    NotPositive { lambda_min: f64 },
    #[error("operator is singular (smallest singular value {sigma_min:e})")]
    Singular { sigma_min: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("bad interval [{a}, {b}]: need a < b")]
    BadInterval { a: f64, b: f64 },
    #[error("quadrature order must be at least 1")]
    BadOrder,
    #[error("mass {mass} at index {index} is not strictly positive")]
    NonpositiveMass { index: usize, mass: f64 },
    #[error("length mismatch: {left} points but {right} masses")]
    LengthMismatch { left: usize, right: usize },
    #[error("a measure needs at least one node")]
    EmptyMeasure,

    #[error("frames are sampled on different measure spaces")]
    SpaceMismatch,
    #[error("family is not a frame (lower bound {lower:e}, upper bound {upper:e})")]
    NotAFrame { lower: f64, upper: f64 },
    #[error("family is not a controlled frame ({classification})")]
    NotControlledFrame { classification: String },
    #[error("family is not Parseval controlled (max |S_VF - I| = {defect:e})")]
    NotParsevalControlled { defect: f64 },
    #[error("alpha[{index}] = {value} is not strictly positive")]
    NonpositiveAlpha { index: usize, value: f64 },
    #[error("operators do not commute: {what} (defect {defect:e})")]
    NotCommuting { what: &'static str, defect: f64 },
    #[error("operator is not an orthogonal projection (defect {defect:e})")]
    NotAProjection { defect: f64 },
    #[error("controlled operator is not normal (defect {defect:e})")]
    NotNormal { defect: f64 },
    #[error("no consistent common eigenbasis (residual {residual:e})")]
    EigenbasisMismatch { residual: f64 },

    #[error("syntax error at byte {offset}: expected {}", expected.join(" or "))]
    Syntax { offset: usize, expected: Vec<String> },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("division by zero at s = {s}")]
    DivisionByZero { s: f64 },
    #[error("domain error at s = {s}: {what}")]
    Domain { s: f64, what: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },
    #[error("component {component} at node s = {node}: {source}")]
    Evaluation {
        component: usize,
        node: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("{0}")]
    Io(String),
}

impl Error {
    /// True for failures caused by the input (as opposed to numerical breakdown).
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::NoConvergence { .. } | Error::EigenbasisMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
