use crate::indicial::ResonanceReport;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole order of zero is undefined")]
    ZeroHasNoOrder,
    #[error("variable count mismatch: {0}")]
    VarMismatch(String),
    #[error("not a unit at the origin")]
    NotUnit,
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("zero operator has no order")]
    ZeroOperator,
    #[error("operator is not in D_*: coefficient of theta^{alpha:?} Dx^{beta:?} does not vanish on the wall")]
    NotDStar { alpha: Vec<u32>, beta: Vec<u32> },
    #[error("resonance at exponent {}: {} hit(s) within bound {}", .0.lambda_text(), .0.gamma_hits.len(), .0.search_bound)]
    Resonance(Box<ResonanceReport>),
    #[error("seed is not in the nullspace of the indicial matrix at the exponent")]
    SeedNotInNullspace,
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
