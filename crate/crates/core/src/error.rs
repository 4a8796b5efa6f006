use thiserror::Error;

/// Errors produced by network construction, generation and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range (network has {n} nodes)")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("link ({i}, {j}) has invalid weight {weight}: weights must be finite and > 0")]
    InvalidWeight { i: usize, j: usize, weight: f64 },

    #[error("duplicate link ({0}, {1})")]
    DuplicateLink(usize, usize),

    #[error("zero strength at node {0}")]
    ZeroStrength(usize),

    #[error("network is disconnected")]
    Disconnected,

    #[error("state vector has length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },

    #[error("non-finite state entry at index {0}")]
    NonFiniteState(usize),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("generation failed: no connected network after {0} attempts")]
    GenerationExhausted(usize),

    #[error("rewiring needs at least 2 non-loop links, found {0}")]
    TooFewLinks(usize),

    #[error("correlation undefined: zero variance")]
    ZeroVariance,

    #[error("degenerate fit: fewer than 2 distinct abscissae")]
    DegenerateFit,

    #[error("scale constant must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("state diverged (non-finite value) at t = {0}")]
    Diverged(f64),

    #[error("strength fell below floor at node {node} at t = {t}")]
    StrengthCollapsed { node: usize, t: f64 },

    #[error("decay fit window [{0}, {1}] contains fewer than 2 usable samples")]
    EmptyFitWindow(f64, f64),

    #[error("distance underflowed to zero inside the fit window at t = {0}")]
    DistanceUnderflow(f64),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
