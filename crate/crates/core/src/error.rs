use thiserror::Error;

/// Errors produced while building or solving stencil systems.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid signal: wavelength must be positive and finite, got {0}")]
    InvalidSignal(f64),

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("invalid boundary data: {0}")]
    InvalidBoundary(String),

    #[error("interior dimensions must be even, got n_x - 1 = {interior} and n_t = {steps}")]
    OddDimension { interior: usize, steps: usize },

    #[error("three-level scheme requires a startup row u^1")]
    MissingStartup,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("matrix is singular to working precision (pivot {pivot:e})")]
    Singular { pivot: f64 },

    #[error(
        "Sylvester operator is near-singular: spectra gap {gap:e} below tolerance {tolerance:e}"
    )]
    NearSingular { gap: f64, tolerance: f64 },

    #[error("explicit advance needs alpha != 0")]
    UnsupportedExplicitAdvance,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate pair at ({i}, {j}): both diagonal weights vanish")]
    DegeneratePair { i: usize, j: usize },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("problem too large for dense Kronecker solve: {unknowns} unknowns (limit {limit})")]
    TooLarge { unknowns: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
