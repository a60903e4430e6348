use num_complex::Complex64;
use thiserror::Error;

/// Every fallible operation in the crate returns this.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("variable `{0}` absent from both inputs")]
    MissingVariable(String),
    #[error("degenerate leading coefficient")]
    DegenerateLeading,
    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        last: Vec<Complex64>,
    },
    #[error("evaluation at/near turning point (|6ζ²+x₂| = {0:e})")]
    NearTurningPoint(f64),
    #[error("turning point: labels undefined at {0}")]
    TurningPoint(String),
    #[error("near-discriminant passage at {0}")]
    NearDiscriminant(String),
    #[error("ambiguous sheet match: {0}")]
    AmbiguousMatch(String),
    #[error("outside validated chart: |t| = {0} exceeds {1}")]
    OutsideChart(f64, f64),
    #[error("evaluation on branch cut: {0}")]
    OnCut(String),
    #[error("undecidable dominance: {0}")]
    Dominance(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// Input-shaped failures as opposed to numeric ones; drives CLI exit codes.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation(_)
                | Error::MissingVariable(_)
                | Error::OutsideChart(..)
                | Error::TurningPoint(_)
                | Error::OnCut(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
