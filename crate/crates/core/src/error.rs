use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("representation mismatch: j1 = {left} vs j1 = {right}")]
    RepMismatch { left: u32, right: u32 },

    #[error("state is not coherent: reconstruction distance {distance:e} exceeds {tolerance:e}")]
    NotCoherent { distance: f64, tolerance: f64 },

    #[error("inversion basepoint amplitude at (j2, j3) = {at:?} vanishes")]
    ZeroLeadingAmplitude { at: (u32, u32) },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("hypergeometric series does not terminate: {0}")]
    NonTerminating(String),

    #[error("state has zero norm")]
    NormZero,

    #[error("alpha = {re} + {im}i is degenerate (alpha = +-1); the operator is nilpotent")]
    DegenerateAlpha { re: f64, im: f64 },

    #[error("Delta_i = {0:e} is below the degeneracy threshold; variance ordering undefined")]
    DegenerateDelta(f64),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
