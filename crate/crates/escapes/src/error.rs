//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong while building or analysing a system.
#[derive(Debug, Error)]
pub enum Error {
    /// The transition matrix is not a valid subshift presentation.
    #[error("invalid subshift: {0}")]
    InvalidSubshift(String),

    /// A word contains a forbidden transition or an out-of-range symbol.
    #[error("inadmissible word {word:?}: {reason}")]
    InadmissibleWord { word: String, reason: String },

    /// The branch data does not describe an expanding Markov interval map.
    #[error("invalid map: {0}")]
    InvalidMap(String),

    /// Cylinder enumeration at the requested depth would exceed the state cap.
    #[error("state cap exceeded: {count} cylinders at depth {depth} (cap {cap})")]
    StateCapExceeded {
        depth: usize,
        count: usize,
        cap: usize,
    },

    /// Exhaustive enumeration would visit more words than the enumeration cap.
    #[error("enumeration cap exceeded: more than {cap} words visited")]
    EnumerationCapExceeded { cap: usize },

    /// A potential has no value (and no default) for an admissible word.
    #[error("potential has no value for admissible word {word:?}")]
    MissingPotentialValue { word: String },

    /// The digraph of the matrix is not strongly connected and aperiodic, so a
    /// single leading eigentriple does not exist.
    #[error("matrix digraph is not primitive: {0}")]
    NotMixing(String),

    /// Power iteration did not reach the residual tolerance in the allotted
    /// number of iterations.
    #[error("power iteration did not converge: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { iterations: usize, residual: f64 },

    /// A hole word is longer than the matrix depth, so deleting columns cannot
    /// express it.
    #[error("hole word of length {hole_len} cannot be expressed at matrix depth {depth}")]
    DepthMismatch { hole_len: usize, depth: usize },

    /// A symbolic point does not carry enough digits for the requested prefix.
    #[error("point provides {available} digits but {needed} are needed")]
    InsufficientDigits { needed: usize, available: usize },

    /// The orbit of a point leaves the union of the branch intervals.
    #[error("point escapes the repeller at step {step} (value {value})")]
    NotInRepeller { step: usize, value: f64 },

    /// The requested ball approximation slack cannot be met within the state
    /// cap; `best_eta` is the smallest slack achieved before giving up.
    #[error("depth cap exceeded while refining ball cover: best slack {best_eta} at depth {depth}")]
    DepthCapExceeded { depth: usize, best_eta: f64 },

    /// The pressure at t = 0 is already negative, so t -> log lambda_t has no
    /// root in [0, infinity).
    #[error("no root: leading eigenvalue at t = 0 is {lambda_at_zero} < 1")]
    NoRoot { lambda_at_zero: f64 },

    /// A survival curve has too few positive tail points for a rate fit.
    #[error("insufficient tail: {points} positive points in the fit window, need at least {needed}")]
    InsufficientTail { points: usize, needed: usize },

    /// An experiment configuration is malformed or internally inconsistent.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line tool: 2 for configuration
    /// problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Json(_)
            | Error::Io(_)
            | Error::InvalidSubshift(_)
            | Error::InvalidMap(_)
            | Error::InadmissibleWord { .. }
            | Error::MissingPotentialValue { .. }
            | Error::InsufficientDigits { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
