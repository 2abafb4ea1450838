//! Global numbering, boundary conditions, assembly of the Oseen-linearized
//! saddle-point system, sparse solve and the nonlinear driver.
//!
//! Unknowns are ordered `u | b | p | λ`, where `λ` is the multiplier for the
//! zero-mean pressure constraint (present only when the velocity is
//! prescribed on the whole boundary). Constrained DOFs are eliminated:
//! every raw DOF is an affine combination of free unknowns, see [`DofExpansion`].

mod assembly;
mod dofmap;
mod oseen;
mod solve;

use std::fmt;
use std::sync::Arc;

use crate::Point;

pub use assembly::{assemble_oseen, Discretization, SparseSystem};
pub use dofmap::{build_dofmap, DofExpansion, DofMap};
pub use oseen::{oseen_iterate, state_norm, OseenOptions, SolverState};
pub use solve::{solve_linear, solve_triplets};

pub type ScalarField = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;

/// Which boundary edges a segment applies to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selector {
    All,
    /// Edges with both endpoints on the line `x[axis] = value`.
    Line {
        axis: usize,
        value: f64,
    },
}

impl Selector {
    pub fn matches(&self, a: Point, b: Point) -> bool {
        match *self {
            Selector::All => true,
            Selector::Line { axis, value } => {
                let tol = 1e-10 * value.abs().max(1.0);
                (a[axis] - value).abs() <= tol && (b[axis] - value).abs() <= tol
            }
        }
    }
}

#[derive(Clone)]
pub enum VelocityBc {
    DirichletZero,
    /// Traction `(pI - R_ν⁻¹∇u)n = p_d n`.
    NaturalPressure(ScalarField),
}

#[derive(Clone, Default)]
pub struct MagneticBc {
    /// `b·n = 0`.
    pub normal_zero: bool,
    /// `n × b = n × b_d`.
    pub tangential: Option<VectorField>,
}

#[derive(Clone)]
pub struct BcSegment {
    pub selector: Selector,
    pub velocity: VelocityBc,
    pub magnetic: MagneticBc,
}

/// Boundary conditions as a list of segments; every boundary edge must be
/// selected by exactly one segment.
#[derive(Clone, Default)]
pub struct BcSpec {
    pub segments: Vec<BcSegment>,
}

impl BcSpec {
    pub fn new(segments: Vec<BcSegment>) -> Self {
        BcSpec { segments }
    }

    /// `u = 0` and `b·n = 0` on the whole boundary.
    pub fn no_slip_insulating() -> Self {
        BcSpec::new(vec![BcSegment {
            selector: Selector::All,
            velocity: VelocityBc::DirichletZero,
            magnetic: MagneticBc { normal_zero: true, tangential: None },
        }])
    }

    /// True when every segment prescribes the velocity, so the pressure is
    /// fixed only up to a constant.
    pub fn velocity_fully_prescribed(&self) -> bool {
        self.segments.iter().all(|s| matches!(s.velocity, VelocityBc::DirichletZero))
    }
}

impl fmt::Debug for VelocityBc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VelocityBc::DirichletZero => write!(f, "DirichletZero"),
            VelocityBc::NaturalPressure(_) => write!(f, "NaturalPressure(..)"),
        }
    }
}

impl fmt::Debug for MagneticBc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MagneticBc")
            .field("normal_zero", &self.normal_zero)
            .field("tangential", &self.tangential.as_ref().map(|_| ".."))
            .finish()
    }
}

impl fmt::Debug for BcSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BcSegment")
            .field("selector", &self.selector)
            .field("velocity", &self.velocity)
            .field("magnetic", &self.magnetic)
            .finish()
    }
}

impl fmt::Debug for BcSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.segments).finish()
    }
}
