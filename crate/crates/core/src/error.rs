//! Error types.

use crate::scalar::ScalarKind;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BandError {
    #[error("window mismatch: {left} vs {right}")]
    WindowMismatch { left: usize, right: usize },
    #[error("scalar kind mismatch: {left:?} vs {right:?}")]
    ScalarKindMismatch { left: ScalarKind, right: ScalarKind },
    #[error("expected dimension {expected}, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("diagonal {offset} has {found} entries, expected {expected}")]
    DiagonalLength {
        offset: isize,
        expected: usize,
        found: usize,
    },
    #[error("offset {offset} does not fit window {window}")]
    OffsetOutOfWindow { offset: isize, window: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is singular (zero pivot at site {site})")]
    Singular { site: isize },
    #[error("pivot at site {site} has no inverse in this scalar field")]
    UnsupportedPivot { site: isize },
}

/// Failure of the banded Cholesky factorization.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CholeskyError {
    #[error("not positive definite: non-positive pivot at site {site}")]
    NotPositiveDefinite { site: isize },
    #[error(transparent)]
    Band(#[from] BandError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("window {window} too small, need at least {required}")]
    WindowTooSmall { window: usize, required: usize },
    #[error("two-center separation M must be at least 1, got {0}")]
    BadSeparation(usize),
    #[error("at least one coupling parameter is required")]
    NoParameters,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("R must be at least 1")]
    ZeroRange,
    #[error("window {window} too small for R = {range}, need at least {required}")]
    WindowTooSmall {
        window: usize,
        range: usize,
        required: usize,
    },
    #[error("|g| >= 1: closed-form metric undefined at or beyond the spectral singularity")]
    SpectralSingularity,
    #[error("Hamiltonian must be tridiagonal (bandwidth {0})")]
    NotTridiagonal(usize),
    #[error("quasi-Hermiticity system is inconsistent (equation at ({row}, {col}))")]
    Inconsistent { row: isize, col: isize },
    #[error("quasi-Hermiticity system is rank deficient: rank {rank} < {unknowns} unknowns")]
    RankDeficient { rank: usize, unknowns: usize },
    #[error("superposition needs at least one term")]
    EmptySuperposition,
    #[error("table index k must be at least 1")]
    ZeroIndex,
    #[error(transparent)]
    Band(#[from] BandError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DysonError {
    #[error("metric is not diagonal")]
    NotDiagonal,
    #[error("metric entry at site {site} is not positive")]
    NonPositiveEntry { site: isize },
    #[error("coupling g = 0 makes the tridiagonal map singular")]
    DegenerateCoupling,
    #[error("|g| >= 1: at or beyond the spectral singularity")]
    SpectralSingularity,
    #[error("Hermiticity violated on the interior: deficit {deficit:e}")]
    HermiticityViolation { deficit: f64 },
    #[error(transparent)]
    Cholesky(#[from] CholeskyError),
    #[error(transparent)]
    Band(#[from] BandError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScatteringError {
    #[error("wavenumber {0} outside the open band (0, pi)")]
    BandEdge(f64),
    #[error("Hamiltonian must be tridiagonal (bandwidth {0})")]
    NotTridiagonal(usize),
    #[error("window {window} too small for matching sites up to {required}")]
    WindowTooSmall { window: usize, required: usize },
    #[error("matching system is singular (spectral singularity or bound state)")]
    Singular,
    #[error("hopping H({row}, {col}) vanishes; transfer step undefined")]
    ZeroHopping { row: isize, col: isize },
    #[error("transfer matrix overflowed")]
    Overflow,
}
