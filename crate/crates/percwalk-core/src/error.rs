//! Crate-wide error type.

use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Lattice parameters out of range (`d >= 2`, `L` even and `>= 4`).
    InvalidLattice(&'static str),
    /// Probability outside `[0, 1]`.
    InvalidProbability(f64),
    /// Solver options out of range.
    InvalidSolverOptions(&'static str),
    /// Vertex index outside the box.
    VertexOutOfRange { vertex: usize, count: usize },
    /// Time horizon must be positive.
    NonPositiveHorizon(f64),
    /// Evaluation time outside `[0, t_max]`.
    TimeOutOfRange { t: f64, t_max: f64 },
    /// Gradient requested across a closed edge; fields are only determined
    /// on open edges.
    ClosedEdge { vertex: usize, direction: u8 },
    /// Divergence requested at a vertex with no open edges.
    IsolatedVertex(usize),
    /// Operation needs a cluster of at least `need` vertices.
    ClusterTooSmall { size: usize, need: usize },
    /// Requested box does not fit in the periodic torus.
    BoxExceedsTorus { half_width: f64, side: usize },
    /// Test-function support too close to the box boundary for the
    /// requested scale.
    SupportViolation { radius: f64, eps: f64 },
    /// Invalid box-chopping geometry.
    BadGeometry(&'static str),
    /// Iterative solver did not reach the requested residual.
    NonConvergence { iterations: usize, residual: f64 },
    /// Sample smaller than the operation requires.
    SampleTooSmall { n: usize, need: usize },
    /// Sample with (numerically) zero variance.
    DegenerateSample,
    /// Broken internal invariant; indicates a bug, not bad input.
    Internal(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidLattice(msg) => write!(f, "invalid lattice: {msg}"),
            Error::InvalidProbability(p) => write!(f, "probability {p} outside [0, 1]"),
            Error::InvalidSolverOptions(msg) => write!(f, "invalid solver options: {msg}"),
            Error::VertexOutOfRange { vertex, count } => {
                write!(f, "vertex {vertex} outside box of {count} vertices")
            }
            Error::NonPositiveHorizon(t) => write!(f, "time horizon {t} must be positive"),
            Error::TimeOutOfRange { t, t_max } => {
                write!(f, "time {t} outside trajectory range [0, {t_max}]")
            }
            Error::ClosedEdge { vertex, direction } => {
                write!(f, "edge ({vertex}, dir {direction}) is closed")
            }
            Error::IsolatedVertex(v) => write!(f, "vertex {v} has no open edges"),
            Error::ClusterTooSmall { size, need } => {
                write!(f, "cluster has {size} vertices, need at least {need}")
            }
            Error::BoxExceedsTorus { half_width, side } => {
                write!(f, "box half-width {half_width} exceeds torus of side {side}")
            }
            Error::SupportViolation { radius, eps } => {
                write!(
                    f,
                    "test-function support {radius} too wide for eps {eps} on this torus"
                )
            }
            Error::BadGeometry(msg) => write!(f, "bad geometry: {msg}"),
            Error::NonConvergence { iterations, residual } => {
                write!(
                    f,
                    "no convergence after {iterations} iterations (residual {residual:e})"
                )
            }
            Error::SampleTooSmall { n, need } => {
                write!(f, "sample of {n} points, need at least {need}")
            }
            Error::DegenerateSample => write!(f, "sample is degenerate (zero variance)"),
            Error::Internal(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
