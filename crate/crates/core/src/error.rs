use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{what} is degenerate (nondegeneracy violated: {detail})")]
    Degenerate { what: String, detail: String },
    #[error("{what} is not symmetric")]
    NotSymmetric { what: String },
    #[error("scale constant c must be nonzero")]
    ZeroScale,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("CFL condition violated: number {cfl:.3e} exceeds {limit}")]
    CflViolation { cfl: f64, limit: f64 },
    #[error("non-finite value produced at step {step}")]
    NonFinite { step: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(GeomError::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
