//! Shared fixtures for the benchmarks.

use mhd_vem::experiments::{ExactSolution, ManufacturedCase};
use mhd_vem::mesh::gen_family;
use mhd_vem::{Discretization, MeshFamily, ModelParams, PolyMesh};

pub fn mesh(family: MeshFamily, n: usize) -> PolyMesh {
    gen_family(family, n, 1)
}

/// Manufactured problem with unit parameters on a generated mesh.
pub fn manufactured(family: MeshFamily, n: usize, k: usize) -> (Discretization, ManufacturedCase) {
    let params = ModelParams::default();
    let case = ManufacturedCase::new(params);
    let disc = Discretization::new(mesh(family, n), k, params, case.bc()).expect("benchmark mesh is valid");
    (disc, case)
}

pub fn loads(disc: &Discretization, case: &ManufacturedCase) -> (Vec<f64>, Vec<f64>) {
    disc.loads(&|x| case.f(x), &|x| case.g(x))
}
