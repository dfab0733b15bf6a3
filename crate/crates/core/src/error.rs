use thiserror::Error;

/// Errors raised by every module of the crate.
///
/// The CLI maps the variants onto process exit codes, so the grouping here is
/// by *kind of failure* rather than by module.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The working precision cannot certify the requested accuracy.
    #[error("precision infeasible: certified error {achieved:e} exceeds target {target:e} at {bits} bits")]
    PrecisionInfeasible {
        bits: u32,
        achieved: f64,
        target: f64,
    },

    /// A window is too wide for the point count (its scaled support would wrap).
    #[error("window too wide: {0}")]
    Width(String),

    /// Not enough data for the requested statistic.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A matrix or node set is singular.
    #[error("singular input: {0}")]
    Singular(String),

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A root could not be isolated to the required width.
    #[error("root isolation failed: {0}")]
    Tolerance(String),

    /// An adaptive algorithm ran out of its work budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// The window has no certified Fourier decay rate.
    #[error("decay unknown: {0}")]
    DecayUnknown(String),

    /// A file did not match the expected format.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
