//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by mesh construction, assembly and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid dimensions {0:?}: each of I, J, K must be at least 2")]
    InvalidDims((usize, usize, usize)),

    #[error("perturbation amplitude {0} out of range [0, 0.5)")]
    InvalidAmplitude(f64),

    #[error("degenerate face {face}: |det(s, t°, t□)| = {det:.3e} below threshold")]
    DegenerateFace { face: usize, det: f64 },

    #[error("splitting breakdown on face {face}: |det(V, t°, t□)| = {det:.3e}; the oblique field is too tangential")]
    SplittingBreakdown { face: usize, det: f64 },

    #[error("zero conormal cross product on face {face}")]
    ZeroConormal { face: usize },

    #[error("degenerate cell {cell}: volume = {volume:.3e}")]
    DegenerateCell { cell: usize, volume: f64 },

    #[error("representative point lies on an edge line of face {face} (d⊥ = {dist:.3e})")]
    PointOnEdgeLine { face: usize, dist: f64 },

    #[error("oblique field is tangential or inward on Γ: V·n = {vdotn:.3e} at {at:?}")]
    TangentialObliqueField { vdotn: f64, at: [f64; 3] },

    #[error("parameter R must be positive, got {0}")]
    NonPositiveR(f64),

    #[error("BiCGStab breakdown after {iterations} iterations (rho = {rho:.3e})")]
    SolverBreakdown { iterations: usize, rho: f64 },

    #[error("BiCGStab did not converge in {max_iter} iterations (relative residual {residual:.3e})")]
    SolverMaxIter { max_iter: usize, residual: f64 },

    #[error("singular matrix in dense solve")]
    SingularMatrix,

    #[error("dense oracle limited to 5000 unknowns, system has {0}")]
    DenseTooLarge(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
