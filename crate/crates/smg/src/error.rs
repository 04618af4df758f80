//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the geometry kernel, graph model, solvers and file IO.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector expected to be unit-norm deviated too far from norm 1.
    #[error("vector ({x}, {y}, {z}) has norm {norm}, more than {tol} away from 1")]
    NotUnit {
        x: f64,
        y: f64,
        z: f64,
        norm: f64,
        tol: f64,
    },

    /// A vector with (near-)zero norm cannot be normalized.
    #[error("cannot normalize a vector of norm {0:.3e}")]
    ZeroNorm(f64),

    /// Tangent direction is undefined for coincident or antipodal points.
    #[error("tangent direction undefined: points are coincident or antipodal (separation {0:.3e} rad)")]
    DegenerateDirection(f64),

    /// Arc endpoints must be distinct and non-antipodal.
    #[error("arc endpoints separated by {0:.6} rad; a minor arc needs separation strictly in (0, pi)")]
    DegenerateArc(f64),

    /// A closed boundary walk needs at least three corners.
    #[error("boundary walk has {0} corners; at least 3 are required")]
    WalkTooShort(usize),

    /// A corner angle fell outside the open interval (0, 2*pi).
    #[error("angle {0} rad is outside (0, 2*pi)")]
    AngleOutOfRange(f64),

    /// An edge refers to a vertex index that does not exist.
    #[error("edge ({i}, {j}) out of range for {vertex_count} vertices")]
    EdgeOutOfRange {
        i: usize,
        j: usize,
        vertex_count: usize,
    },

    /// A loop edge (i, i) was supplied.
    #[error("loop edge ({0}, {0}) is not allowed in a simple graph")]
    LoopEdge(usize),

    /// The same undirected edge was supplied twice.
    #[error("duplicate edge ({i}, {j})")]
    DuplicateEdge { i: usize, j: usize },

    /// The common edge length must be a minor-arc length.
    #[error("edge length lambda = {0} rad is outside (0, pi)")]
    LambdaOutOfRange(f64),

    /// Face tracing requires minimum degree 2.
    #[error("vertex {vertex} has degree {degree}; face tracing requires degree >= 2")]
    DegreeTooLow { vertex: usize, degree: usize },

    /// Two edges at a vertex start in indistinguishable directions.
    #[error("degenerate embedding at vertex {vertex}: incident edges separated by only {gap:.3e} rad in azimuth")]
    DegenerateRotation { vertex: usize, gap: f64 },

    /// Group generation failed to close, indicating bad generators.
    #[error("group closure not reached after {0} rounds")]
    ClosureNotReached(usize),

    /// A point set expected to be group-invariant is not.
    #[error("point set is not invariant under the group: worst image deviation {0:.3e} rad")]
    NotInvariant(f64),

    /// The tangency Jacobian is numerically rank deficient.
    #[error("tangency system is singular at the start point (condition estimate {0:.3e})")]
    SingularSystem(f64),

    /// The tangency polish did not reach the residual target.
    #[error("polish did not converge after {iterations} iterations; residual history tail {history:?}")]
    NoConvergence {
        iterations: usize,
        history: Vec<f64>,
    },

    /// Phase A produced a contact structure the polish cannot accept.
    #[error("contact structure after search is not usable: {0}")]
    WrongContactStructure(String),

    /// No multi-start candidate survived certification.
    #[error("no certified configuration found after {starts} starts; retry with more starts or another seed")]
    SearchExhausted { starts: usize },

    /// Underlying file-system failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// The file is not valid JSON.
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    /// The file parsed but violates the smg-1 schema.
    #[error("invalid smg-1 file: {0}")]
    InvalidFile(String),
}
