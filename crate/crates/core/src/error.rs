use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("distance {d} is not above the core radius {d_b}")]
    CoreViolation { d: f64, d_b: f64 },

    #[error("newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("no spot found: iteration converged to the homogeneous state")]
    NoSpot,

    #[error("kernel support exceeded: d = {d} but the truncated profiles only overlap up to {limit}")]
    SupportExceeded { d: f64, limit: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("branch {branch} is not realizable for N = {n}")]
    BranchNotRealizable { n: usize, branch: usize },

    #[error("no traveling or rotating ring below the drift bifurcation (M1 = {m1:e})")]
    BelowBifurcation { m1: f64 },

    #[error("spots {i} and {j} are {d} apart, inside the core radius")]
    Collision { i: usize, j: usize, d: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("ring radius {r0} leaves less than {clearance} to the domain edge at {l}")]
    Clearance { r0: f64, clearance: f64, l: f64 },

    #[error("field blow-up at t = {t}")]
    BlowUp { t: f64 },

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Tag an error with the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
