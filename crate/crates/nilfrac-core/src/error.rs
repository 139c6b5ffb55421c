//! Error types shared across the crate.

use thiserror::Error;

/// Errors from polynomial and series arithmetic.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum PolyError {
    #[error("truncation degrees differ: {0} vs {1}")]
    TruncationMismatch(u32, u32),
    #[error("series step must be positive, got {0}")]
    NonPositiveStep(String),
    #[error("series leading coefficient must be nonzero")]
    ZeroLeadingCoefficient,
    #[error("series has nonpositive leading exponent {0}")]
    NonPositiveLeadingExponent(String),
    #[error("exponent ladder overflow while truncating at order {0}")]
    ExponentOverflow(String),
    #[error("value is not representable in the working coefficient field: {0}")]
    NotRepresentable(String),
}

/// Errors from the classification procedure.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ClassifyError {
    #[error("x-component is not of the form y + higher order terms")]
    NotNormalShape,
    #[error("linear part at the origin is not nilpotent")]
    NotNilpotent,
    #[error("origin is not a singular point")]
    NotSingular,
    #[error("F(x) is identically zero at truncation order {0}; type undecidable at this jet")]
    UndecidableJet(u32),
}

/// Errors from unit-time map computation and orbit generation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum UnitMapError {
    #[error("requested jet order {requested} exceeds field truncation {available}")]
    OrderExceedsTruncation { requested: u32, available: u32 },
    #[error("exact Picard jet requires a nilpotent linear part")]
    LinearPartNotNilpotent,
    #[error("step size underflow at t={t}, |h|={h}")]
    StepUnderflow { t: f64, h: f64 },
    #[error("trajectory escaped the integration domain (|p| > {bound})")]
    LeftDomain { bound: f64 },
    #[error("initial point must not be the origin")]
    SeedAtOrigin,
}

/// Errors from separatrix/branch computations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum BranchError {
    #[error("model is monodromic (center or focus); no separatrix branches exist")]
    MonodromicInput,
    #[error("branches lie in the half-plane x <= 0, which is outside the supported chart")]
    NegativeAxisBranch,
    #[error("coefficient recursion is non-triangular at order {order} (resonant and inconsistent)")]
    NonTriangular { order: usize },
    #[error("leading coefficient is not representable: {0}")]
    Leading(String),
    #[error("no branch with the requested index {0}")]
    NoSuchBranch(usize),
}

/// Errors from dimension estimation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EstimateError {
    #[error("sequence too short: need at least {need}, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("sequence is not strictly decreasing and positive at index {0}")]
    NonMonotone(usize),
    #[error("scaling exponent must exceed 1, got {0}")]
    ExponentAtMostOne(f64),
    #[error("insufficient scale range: {decades:.2} decades available, need {need:.2}")]
    InsufficientScaleRange { decades: f64, need: f64 },
    #[error("point set is empty or degenerate")]
    DegenerateInput,
    #[error("gamma must lie in (1, m): gamma={gamma}, m={m}")]
    GammaOutOfRange { gamma: String, m: u32 },
    #[error("uncovered regime: {0}")]
    UncoveredRegime(String),
}

/// Errors surfaced by the CLI and the verification driver.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum DriverError {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("input parse error: {0}")]
    Parse(String),
    #[error("empty data set for plotting")]
    EmptyPlot,
}
