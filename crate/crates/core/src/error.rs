use thiserror::Error;

pub type Result<T, E = FifError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FifError {
    #[error("map is singular (p = 0 or q = 0)")]
    SingularMap,

    #[error("generator index {index} out of range 1..={count}")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("not contractive: {0}")]
    NotContractive(String),

    #[error("strips do not cover the interval: gap ({gap_start}, {gap_end})")]
    NotCovering { gap_start: f64, gap_end: f64 },

    #[error("attractor is not a function graph: branches disagree by {discrepancy:e} at x = {x} (tolerance {tolerance:e})")]
    NotAFunctionGraph {
        x: f64,
        discrepancy: f64,
        tolerance: f64,
    },

    #[error("requested work of {requested} exceeds the budget of {budget}")]
    DepthTooLarge { requested: u128, budget: u128 },

    #[error("abscissa {x} lies outside the interval")]
    OutOfDomain { x: f64 },

    #[error("sampling cannot certify a positive delta for eps = {eps}")]
    ResolutionInsufficient { eps: f64 },

    #[error("fixed point of the projected map lies inside the interval")]
    FixedPointInside,

    #[error("step {step:e} is not below delta {delta:e}")]
    StepTooLarge { step: f64, delta: f64 },

    #[error("orbit is not an eps-net: a sample point is {distance:e} away (eps {eps:e})")]
    NotAnEpsilonNet { distance: f64, eps: f64 },

    #[error("curve classification needs p > 0 and q > 0")]
    NonpositiveRatio,

    #[error("denominator {0} vanishes exactly")]
    DegenerateDenominator(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
