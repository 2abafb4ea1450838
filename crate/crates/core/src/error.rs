use thiserror::Error;

/// Errors raised while building meshes, local spaces or global systems.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex index {index} out of range ({count} vertices)")]
    VertexOutOfRange { index: usize, count: usize },
    #[error("cell {cell} has fewer than 3 distinct vertices")]
    TooFewVertices { cell: usize },
    #[error("edge ({0}, {1}) is shared by more than two cells")]
    NonManifoldEdge(usize, usize),
    #[error("edge ({0}, {1}) is traversed twice in the same direction")]
    InconsistentOrientation(usize, usize),
    #[error("cell {cell} is self-intersecting")]
    SelfIntersectingCell { cell: usize },
    #[error("cell {cell} has zero area")]
    DegenerateCell { cell: usize },
    #[error("polynomial decomposition is singular (condition {condition:.3e})")]
    SingularDecomposition { condition: f64 },
    #[error("monomial mass matrix is singular on element {element}")]
    SingularMass { element: usize },
    #[error("projection system is rank deficient on element {element}")]
    RankDeficiency { element: usize },
    #[error("inconsistent boundary conditions: {0}")]
    InconsistentBc(String),
    #[error("linear system is singular: {0}")]
    SingularSystem(String),
    #[error("relative residual {residual:.3e} exceeds {limit:.1e}")]
    ResidualTooLarge { residual: f64, limit: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("Oseen iteration did not converge in {iterations} iterations (last increment {increment:.3e})")]
    NoConvergence { iterations: usize, increment: f64, state: Box<crate::system::SolverState> },
    #[error("invalid mesh file: {0}")]
    MeshFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
