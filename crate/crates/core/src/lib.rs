//! Nonconforming virtual element discretization of the two-dimensional
//! stationary incompressible MHD equations on polygonal meshes.
//!
//! The velocity lives in an enhanced nonconforming space whose discrete
//! divergence is an elementwise polynomial, so the computed velocity is
//! divergence free element by element. Each magnetic component uses an
//! enhanced H¹-conforming nodal space and the pressure is discontinuous
//! piecewise polynomial. The nonlinear problem is solved by Oseen
//! iteration on top of a sparse direct solver.
//!
//! Module map:
//! - [`mesh`]: polygonal meshes, generators, geometry caches, quality report, file I/O
//! - [`polybasis`]: scaled monomials, the `[P_k]² = ∇P_{k+1} ⊕ x⊥P_{k-1}` split, quadrature
//! - [`velocity_space`] / [`magnetic_space`]: DOF layouts and computable projections
//! - [`forms`]: elementwise discrete forms with dof-dof stabilization
//! - [`system`]: DOF numbering, boundary conditions, assembly, sparse solve, Oseen driver
//! - [`experiments`]: manufactured solution, Hartmann flow, error norms, rate tables

pub mod error;
pub mod experiments;
pub mod forms;
pub mod magnetic_space;
pub mod mesh;
pub mod polybasis;
pub mod system;
pub mod velocity_space;

pub use error::{Error, Result};
pub use forms::ModelParams;
pub use mesh::{ElementGeometry, GeomCache, MeshFamily, PolyMesh, QualityReport};
pub use system::{BcSpec, Discretization, DofMap, OseenOptions, SolverState, SparseSystem};

/// A point or vector in the plane.
pub type Point = [f64; 2];
