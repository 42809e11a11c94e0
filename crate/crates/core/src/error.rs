use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("graph has no cycle")]
    NoCycle,
    #[error("{what}: {requested} exceeds the configured cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: String,
        cap: String,
    },
    #[error("complexity guard: {what} needs {requested} operations, budget is {budget}")]
    ComplexityGuard {
        what: &'static str,
        requested: String,
        budget: String,
    },
    #[error("epsilon {epsilon} too large: needs epsilon * max(1/k, 1/(r-k)) <= 1/r (k = {k}, r = {r})")]
    EpsilonTooLarge { epsilon: String, r: usize, k: usize },
    #[error("no split k in [1, {}] gives a positive cycle weight (r = {r}, s = {s})", r - 1)]
    NoPositiveK { r: usize, s: usize },
    #[error("no epsilon in the trial ladder gives a positive gap")]
    NotFound,
    #[error("gap at the requested epsilon is not positive: {gap}")]
    GapNotPositive { gap: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid coloring: {0}")]
    InvalidColoring(String),
    #[error("invalid graphon: {0}")]
    InvalidGraphon(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn cap_exceeded(what: &'static str, requested: impl ToString, cap: impl ToString) -> Error {
    Error::CapExceeded {
        what,
        requested: requested.to_string(),
        cap: cap.to_string(),
    }
}
