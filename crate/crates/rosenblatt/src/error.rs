use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Gamma pole at argument {0}")]
    Pole(f64),
    #[error("series diverges: convergence margin {margin} is not positive")]
    Divergent { margin: f64 },
    #[error("no convergence after {terms} terms (value {value}, error estimate {error})")]
    NonConvergence {
        value: f64,
        error: f64,
        terms: usize,
    },
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("parameter pattern mismatch: {0}")]
    PatternMismatch(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("closed form truncated near x = {x}; fall back to the operator route")]
    Truncated { x: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
