use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{a} has no inverse modulo {m}")]
    NoInverse { a: i64, m: u64 },

    #[error("value out of supported range: {0}")]
    Range(String),

    #[error("precision exhausted; last trusted index {last_trusted:?}")]
    Precision { last_trusted: Option<usize> },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("outside operation domain: {0}")]
    Domain(String),

    #[error("inconsistent residue class: {0}")]
    InvalidClass(String),

    #[error("budget exhausted for {what}: best achieved {achieved:e}")]
    Budget { what: String, achieved: f64 },

    #[error("quadrature did not converge: residual {residual:e}")]
    Quadrature { residual: f64 },

    #[error("hypothesis fails at j = {j}")]
    Hypothesis { j: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Budget-type failures (resource caps, unconverged quadrature) as opposed
    /// to malformed requests.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::Budget { .. } | Error::Quadrature { .. } | Error::Precision { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
