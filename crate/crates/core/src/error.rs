use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh file: {0}")]
    Parse(String),
    #[error("face {face} references vertex {vertex} which is out of range")]
    VertexOutOfRange { face: usize, vertex: usize },
    #[error("face {0} is degenerate (fewer than 3 vertices or a repeated vertex)")]
    DegenerateFace(usize),
    #[error("face {0} is not counterclockwise")]
    ClockwiseFace(usize),
    #[error("edge ({0}, {1}) has more than two incident faces")]
    NonManifoldEdge(usize, usize),
    #[error("vertex {0} has a non-manifold face fan")]
    NonManifoldVertex(usize),
    #[error("faces {0} and {1} traverse their shared edge in the same direction")]
    InconsistentOrientation(usize, usize),
    #[error("polygons must not touch each other or the boundary (face {0})")]
    SeparationViolated(usize),
    #[error("polygon {0} is not star-shaped")]
    NotStarShaped(usize),
    #[error("star-shape merging failed: {0}")]
    MergeFailed(String),
    #[error("cell {0} is not spline-compatible")]
    NotCompatible(usize),
    #[error("kernel center placement failed for polygon {0}")]
    CenterInsidePolygon(usize),
    #[error("rank-deficient system: {0}")]
    RankDeficient(String),
    #[error("infeasible polygon constraints: {rows} rows, {unknowns} unknowns")]
    InfeasibleConstraints { rows: usize, unknowns: usize },
    #[error("geometric map fit is singular")]
    SingularFit,
    #[error("degenerate Jacobian in cell {cell} (det = {det:e})")]
    DegenerateJacobian { cell: usize, det: f64 },
    #[error("conjugate gradients did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("matrix is not symmetric positive definite")]
    NotSpd,
    #[error("matrix too large for a dense eigen-decomposition ({0} > 3000)")]
    TooLarge(usize),
    #[error("unknown {kind} `{name}`")]
    UnknownStrategy { kind: &'static str, name: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
