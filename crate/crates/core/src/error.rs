use thiserror::Error;

/// Errors produced by the geometric kernel, the measure engine and the solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be 2 or 3, got {0}")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("need at least {needed} halfspaces, got {found}")]
    TooFewHalfspaces { needed: usize, found: usize },
    #[error("halfspace intersection is empty")]
    EmptyIntersection,
    #[error("halfspace intersection is unbounded")]
    Unbounded,
    #[error("halfspace intersection is not full-dimensional")]
    Degenerate,
    #[error("zero or non-finite vector cannot be normalized")]
    ZeroVector,

    #[error("generators do not span a pointed cone")]
    NotPointed,
    #[error("generators are not full-dimensional")]
    NotFullDim,
    #[error("atom {index} lies outside the open window of the cone (margin {margin:e})")]
    AtomOutsideOmega { index: usize, margin: f64 },
    #[error("direction lies outside the closed window of the cone (margin {margin:e})")]
    DirectionOutsideClosure { margin: f64 },

    #[error("support number {index} is positive ({value})")]
    PositiveSupportNumber { index: usize, value: f64 },
    #[error("{normals} normals but {support} support numbers")]
    LengthMismatch { normals: usize, support: usize },
    #[error("truncation certificate failed: {0}")]
    CertificationFailed(String),
    #[error("sets live in different cones")]
    ConeMismatch,
    #[error("bound {bound} is smaller than the total surface area {total}")]
    InsufficientBound { bound: f64, total: f64 },
    #[error("surface area atom {index} is not covered by the supplied window atoms")]
    WindowMissesAtom { index: usize },

    #[error("atom {index} has non-positive or non-finite mass {mass}")]
    NonpositiveMass { index: usize, mass: f64 },
    #[error("atom {index} is not a unit vector (norm {norm})")]
    NonUnitAtom { index: usize, norm: f64 },
    #[error("oracle limited to {limit} atoms in total, got {found}")]
    TooManyAtoms { limit: usize, found: usize },
    #[error("function has no value at atom {index}")]
    MissingValue { index: usize },

    #[error("solver did not converge (residual {residual:e} after {iterations} steps)")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("chain endpoint parameter is negative (s = {s}, t = {t})")]
    NegativeEndpoint { s: f64, t: f64 },
    #[error("atom {index} has boundary margin {margin} below the required {required}")]
    MarginTooSmall {
        index: usize,
        margin: f64,
        required: f64,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
