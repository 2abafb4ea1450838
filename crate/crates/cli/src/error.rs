use std::fmt;

/// Failure of one CLI invocation, reported as a single `error[tag]: message` line.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Io(String),
    Solver(mhd_vem::Error),
}

impl CliError {
    pub fn tag(&self) -> &'static str {
        use mhd_vem::Error as E;
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Solver(e) => match e {
                E::NoConvergence { .. } => "convergence",
                E::InvalidParameter(_) | E::InconsistentBc(_) => "config",
                E::Io(_) | E::Csv(_) => "io",
                E::VertexOutOfRange { .. }
                | E::TooFewVertices { .. }
                | E::NonManifoldEdge(..)
                | E::InconsistentOrientation(..)
                | E::SelfIntersectingCell { .. }
                | E::DegenerateCell { .. }
                | E::MeshFormat(_) => "mesh",
                E::SingularDecomposition { .. }
                | E::SingularMass { .. }
                | E::RankDeficiency { .. }
                | E::SingularSystem(_)
                | E::ResidualTooLarge { .. }
                | E::DimensionMismatch(_) => "numerical",
            },
        }
    }

    /// 1 for usage, configuration and input problems, 2 when the nonlinear
    /// iteration does not converge, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self.tag() {
            "convergence" => 2,
            "numerical" => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Config(m) | CliError::Io(m) => f.write_str(m),
            CliError::Solver(e) => write!(f, "{e}"),
        }
    }
}

impl From<mhd_vem::Error> for CliError {
    fn from(e: mhd_vem::Error) -> Self {
        CliError::Solver(e)
    }
}
