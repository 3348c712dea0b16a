use thiserror::Error;

/// Errors produced by the analysis and simulation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown weight name `{0}` for this connectivity scheme")]
    UnknownWeightName(String),

    #[error("missing weight for slot `{0}`")]
    MissingWeight(String),

    #[error("unknown preset `{0}` (expected one of: wang-baseline, pfc-bla-a, pfc-bla-b)")]
    UnknownPreset(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weight matrix has a nonzero entry outside the {scheme} slots at ({row}, {col})")]
    SchemeMismatch {
        scheme: String,
        row: usize,
        col: usize,
    },

    #[error("no equilibrium converged from {starts} starts (best residual {best_residual:.3e})")]
    NoConvergence { starts: usize, best_residual: f64 },

    #[error("kernel transform vanishes at z = {re} + {im}i")]
    KernelSingularity { re: f64, im: f64 },

    #[error("point (alpha = {alpha}, beta = {beta}) is outside the zone required here: {reason}")]
    ZoneMismatch {
        alpha: f64,
        beta: f64,
        reason: String,
    },

    #[error("transversality expression vanishes at omega = {omega} (|value| = {value:.3e})")]
    OnSignBoundary { omega: f64, value: f64 },

    #[error("step size dt = {dt} ms exceeds the limit {limit} ms")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("state overflow at t = {t_ms} ms")]
    Overflow { t_ms: f64 },

    #[error("horizon too long for direct quadrature: {ops} operations per step")]
    HorizonTooLong { ops: usize },

    #[error("no spectral peak found")]
    NoPeak,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by user input rather than numerical failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::UnknownWeightName(_)
                | Error::MissingWeight(_)
                | Error::UnknownPreset(_)
                | Error::InvalidParameter(_)
                | Error::SchemeMismatch { .. }
                | Error::StepTooLarge { .. }
                | Error::Config(_)
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
