use thiserror::Error;

/// Failures of the numerical routines. Soft conditions (aliasing, slow series
/// tails) are reported as warnings inside results instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("symbol comes within {min_abs:e} of zero on the circle; the index is undefined")]
    NearZeroOnCircle { min_abs: f64 },

    #[error("argument jump of {jump:.6} rad between grid points; refine the grid")]
    BranchAmbiguity { jump: f64 },

    #[error("winding number {value} is not close to an integer")]
    NonIntegerWinding { value: f64 },

    #[error("symbol has Cauchy index {index}; a logarithm needs index zero")]
    NonzeroIndex { index: i64 },

    #[error("factorization residual {residual:e} exceeds tolerance {tol:e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("G(b) or G(c) disagree between routes: relative gap {gap:e}")]
    InconsistentRoutes { gap: f64 },

    #[error("argument {x} outside the tabulated range [0, {max}]")]
    OutOfRange { x: f64, max: f64 },

    #[error("density is constant on its whole range; the complementary density is unbounded")]
    DegenerateDensity,

    #[error("weight sequence `{which}` is not in class W: {reason}")]
    WeightNotInW { which: &'static str, reason: String },

    #[error("matrix of order {order} is numerically singular")]
    SingularMatrix { order: usize },

    #[error("Neumann series stopped contracting after {terms} terms")]
    SeriesDiverging { terms: usize },

    #[error("factor radius {have} is below the required {needed}")]
    RadiusTooSmall { needed: usize, have: usize },

    #[error("all {points} remainders are below the noise floor; no fit possible")]
    AllBelowNoiseFloor { points: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
