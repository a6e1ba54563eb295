use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integrator exceeded {max_steps} steps at lambda = {lambda_re} + {lambda_im}i")]
    StepLimit {
        max_steps: usize,
        lambda_re: f64,
        lambda_im: f64,
    },

    #[error("eigenvalue {n}: bracketing failed ({diagnostic})")]
    BracketFailure { n: u32, diagnostic: String },

    #[error("expected {expected} eigenvalues, found {found} ({diagnostic})")]
    CountMismatch {
        expected: usize,
        found: usize,
        diagnostic: String,
    },

    #[error("continuation for eigenvalue {n} diverged at t = {t}")]
    ContinuationDiverged { n: u32, t: f64 },

    #[error("kappa_{n} is not well defined: |(-1)^n y1 - 1| = {distance}")]
    InvalidKappa { n: u32, distance: f64 },

    #[error("inconsistent result: {0}")]
    Inconsistency(String),

    #[error("z = {re} + {im}i lies outside the closed strip [{a}, {b}]")]
    OutsideStrip { re: f64, im: f64, a: f64, b: f64 },

    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
