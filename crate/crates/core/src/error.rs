use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("measure space must have at least one point")]
    EmptySpace,
    #[error("weight {value} at point {index} is not a positive finite real")]
    BadWeight { index: usize, value: f64 },
    #[error("field has {got} values but the space has {expected} points")]
    LengthMismatch { expected: usize, got: usize },
    #[error("field value {value} at point {index} is not finite")]
    NonFiniteValue { index: usize, value: f64 },
    #[error("fields live on different measure spaces")]
    SpaceMismatch,
    #[error("breakpoints are not strictly increasing at index {index}")]
    NotIncreasing { index: usize },
    #[error("invalid piecewise-linear function: {0}")]
    BadPiecewise(String),
    #[error("function is not in any alternating family F_k")]
    NotAlternating,
    #[error("envelope samples are inconsistent: {0}")]
    InconsistentSamples(String),
    #[error("band parameter {0} must be finite and nonnegative")]
    BadAlpha(f64),
    #[error("invalid form descriptor: {0}")]
    BadSpec(String),
    #[error("invalid flow configuration: {0}")]
    BadConfig(String),
    #[error("proximal solve did not converge after {iters} sweeps (gap {gap:e})")]
    NoConvergence { iters: usize, gap: f64 },
    #[error("step {step} of the flow failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("cannot replay witness: {0}")]
    BadWitness(String),
}
