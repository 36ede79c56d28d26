use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown unit label `{0}`")]
    UnknownUnit(String),

    #[error("cannot convert `{from}` ({from_dim}) to `{to}` ({to_dim})")]
    DimensionMismatch {
        from: String,
        from_dim: &'static str,
        to: String,
        to_dim: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("ill-conditioned kernel system (condition estimate {condition:.3e}): {reason}")]
    IllConditioned { condition: f64, reason: String },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("no interior minimum found: {0}")]
    NoMinimum(String),

    #[error("potential supports no bound well")]
    NoWell,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("matching radius not converged: phase drift {drift:.3e} rad exceeds {tolerance:.1e}")]
    Unconverged { drift: f64, tolerance: f64 },

    #[error("scattering length diverges (bound state at threshold), 1/a = {inverse_length:.3e}")]
    Pole { inverse_length: f64 },

    #[error("no open channel at this energy")]
    NoOpenChannel,

    #[error("entrance channel {0} is closed")]
    ClosedChannel(usize),

    #[error("empty channel basis")]
    EmptyBasis,

    #[error("fit did not converge: {0}")]
    FitFailed(String),

    #[error("no resonance feature in the phase series: {0}")]
    FeatureAbsent(String),

    #[error("phase branch discontinuity between E = {left:.6e} and {right:.6e}")]
    BranchDiscontinuity { left: f64, right: f64 },

    #[error("pole of the scattering length inside bracket [{lo}, {hi}]")]
    PoleInBracket { lo: f64, hi: f64 },

    #[error("target not bracketed: {0}")]
    NotBracketed(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
