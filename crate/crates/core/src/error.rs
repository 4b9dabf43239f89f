use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Domain violations raised while evaluating a [`ScalarExpr`](crate::ScalarExpr).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalFault {
    DivisionByZero,
    LnOfZero,
    SqrtOfNegative,
    CoordinateOutOfRange,
    NonFinite,
}

impl std::fmt::Display for EvalFault {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EvalFault::DivisionByZero => "division by zero",
            EvalFault::LnOfZero => "logarithm of zero",
            EvalFault::SqrtOfNegative => "square root of a negative number",
            EvalFault::CoordinateOutOfRange => "coordinate index outside the chart",
            EvalFault::NonFinite => "non-finite value",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{fault} in `{node}`")]
    Eval { fault: EvalFault, node: String },

    #[error("parse error at column {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("fibre coordinate t must be nonzero")]
    ZeroFibre,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degree error: {0}")]
    Degree(String),

    #[error("form is not horizontal")]
    NotHorizontal,

    #[error("invalid bundle: {0}")]
    InvalidBundle(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("CFL violation: du = {du} exceeds the admissible bound {bound}")]
    Cfl { du: f64, bound: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("form is not regular at t = 0: offending component {0}")]
    NotRegular(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
