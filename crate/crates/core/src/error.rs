use thiserror::Error;

/// Errors raised by graph construction, the numerical kernels and the front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge ({x}, {y}) has nonpositive weight {weight}")]
    NonPositiveWeight { x: String, y: String, weight: f64 },

    #[error("edge ({x}, {y}) is listed more than once")]
    DuplicateEdge { x: String, y: String },

    #[error("vertex {0} has zero degree")]
    IsolatedVertex(String),

    #[error("no edges")]
    NoEdges,

    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("interior set is empty")]
    EmptyDomain,

    #[error("interior set contains every vertex, so there is no Dirichlet boundary")]
    NoBoundary,

    #[error("vertex {0} is listed twice in the interior set")]
    RepeatedVertex(String),

    #[error("interior set is not m-connected")]
    NotMConnected,

    #[error("no mass leaks from the interior set into its boundary")]
    NoLeak,

    #[error("vertex {0} sends no mass inside the closure")]
    DeadRow(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("matrix is not symmetric (max deviation {0:e})")]
    Asymmetric(f64),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("ground state changes sign; interior set is not m-connected")]
    NotPositiveGroundState,

    #[error("{what}: argument {value} outside the domain")]
    OutOfDomain { what: &'static str, value: f64 },

    #[error("nonlinearity is not strictly convex")]
    NotStrictlyConvex,

    #[error("nonlinearity is not admissible: {0}")]
    NotAdmissible(String),

    #[error("nonlinearity is not superlinear, s/f(s) has no interior maximum")]
    NoCriticalPoint,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("extremal parameter is unbounded (sublinear nonlinearity)")]
    Unbounded,

    #[error("solvability predicate is not monotone at lambda = {0}")]
    NonMonotonePredicate(f64),

    #[error("minimal iteration diverged at lambda = {0}")]
    DivergedAt(f64),

    #[error("invalid kernel: {0}")]
    Kernel(String),

    #[error("invalid nonlinearity: {0}")]
    Nonlinearity(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
