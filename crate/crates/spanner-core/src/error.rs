use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad argument or configuration (invalid vertex ID, out-of-range
    /// parameter, unsatisfiable hitting-set instance, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Malformed graph file; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A configured limit (oracle size, enumeration space) was exceeded.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// A node tried to send or receive more than the per-round budget
    /// allows.
    #[error("bandwidth violation: {0}")]
    Bandwidth(String),

    /// The simulation did not halt within the configured round limit.
    #[error("round limit reached: {0}")]
    RoundLimit(String),

    /// A constructed spanner failed a correctness check.
    #[error("verification failed: {0}")]
    Verification(String),

    /// An internal invariant did not hold; indicates a bug in this crate.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
