use mhd_vem::experiments::{compute_errors, run_hartmann, ExactSolution, HartmannCase, ManufacturedCase};
use mhd_vem::mesh::{gen_family, io};
use mhd_vem::system::oseen_iterate;
use mhd_vem::{Discretization, Error, MeshFamily, ModelParams, OseenOptions, SolverState};

const FAMILIES: [MeshFamily; 4] = [MeshFamily::Tri, MeshFamily::Quad, MeshFamily::PerturbedQuad, MeshFamily::Voronoi];

fn solve(family: MeshFamily, n: usize, k: usize, params: ModelParams) -> (Discretization, SolverState) {
    let case = ManufacturedCase::new(params);
    let disc = Discretization::new(gen_family(family, n, 5), k, params, case.bc()).unwrap();
    let state = oseen_iterate(&disc, &|x| case.f(x), &|x| case.g(x), &OseenOptions::default()).unwrap();
    (disc, state)
}

#[test]
fn mesh_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for family in FAMILIES {
        let mesh = gen_family(family, 5, 9);
        assert_eq!(io::from_json(&io::to_json(&mesh)).unwrap(), mesh, "{family}");
        let path = dir.path().join(format!("{family}.json"));
        io::write_mesh(&mesh, &path).unwrap();
        assert_eq!(io::read_mesh(&path).unwrap(), mesh, "{family}");
    }
}

#[test]
fn malformed_mesh_files() {
    assert!(matches!(io::from_json("{\"vertices\": 3}"), Err(Error::MeshFormat(_))));
    let out_of_range = r#"{"vertices": [[0,0],[1,0],[0,1]], "cells": [[0,1,3]]}"#;
    assert!(matches!(io::from_json(out_of_range), Err(Error::VertexOutOfRange { .. })));
}

#[test]
fn manufactured_solution_on_every_family() {
    let params = ModelParams::default();
    let case = ManufacturedCase::new(params);
    for family in FAMILIES {
        let coarse = {
            let (disc, state) = solve(family, 4, 1, params);
            compute_errors(&disc, &state, &case)
        };
        let (disc, state) = solve(family, 8, 1, params);
        let fine = compute_errors(&disc, &state, &case);
        assert!(fine.div_norm < 1e-10, "{family}: div {}", fine.div_norm);
        assert!(state.increment < 1e-7);
        for (c, f) in [(coarse.e_u0, fine.e_u0), (coarse.e_b0, fine.e_b0), (coarse.e_u1, fine.e_u1)] {
            assert!(f < 0.75 * c, "{family}: {c} -> {f}");
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| solve(MeshFamily::Voronoi, 6, 2, ModelParams::new(2.0, 0.5, 3.0).unwrap()).1)
    };
    let (a, b) = (run(1), run(4));
    assert_eq!((a.u, a.b, a.p, a.iterations), (b.u, b.b, b.p, b.iterations));
}

#[test]
fn hartmann_error_decreases_under_refinement() {
    let case = HartmannCase::ha5();
    let opts = OseenOptions::default();
    let coarse = run_hartmann(&case, 4, 1, &opts).unwrap();
    let fine = run_hartmann(&case, 8, 1, &opts).unwrap();
    assert!(fine.rel_err_u < coarse.rel_err_u);
    assert!(fine.rel_err_b < coarse.rel_err_b);
    assert_eq!(fine.samples.len(), 21);
}

#[test]
fn iteration_cap_reports_the_last_state() {
    let params = ModelParams::default();
    let case = ManufacturedCase::new(params);
    let disc = Discretization::new(gen_family(MeshFamily::Quad, 4, 0), 1, params, case.bc()).unwrap();
    let opts = OseenOptions { max_iter: 1, ..OseenOptions::default() };
    match oseen_iterate(&disc, &|x| case.f(x), &|x| case.g(x), &opts) {
        Err(Error::NoConvergence { iterations, state, .. }) => {
            assert_eq!(iterations, 1);
            assert!(state.u.iter().any(|v| *v != 0.0));
        }
        other => panic!("expected NoConvergence, got {other:?}"),
    }
}
