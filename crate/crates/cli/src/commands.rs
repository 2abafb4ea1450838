use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use mhd_vem::experiments::{
    cell_samples, compute_errors, convergence_study, format_table, run_hartmann, write_cell_samples, write_profile,
    write_report, ExactSolution, HartmannCase, ManufacturedCase,
};
use mhd_vem::mesh::{gen_family, io, quality_report};
use mhd_vem::system::{oseen_iterate, Discretization};
use mhd_vem::{ModelParams, PolyMesh};

use crate::config::{Preset, RunConfig};
use crate::error::CliError;

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::Io(format!("stdout: {e}"))
}

fn fmt_params(p: &ModelParams) -> String {
    format!("Rnu={} Rm={} Sc={}", p.r_nu, p.r_m, p.s_c)
}

fn load_mesh(cfg: &RunConfig) -> Result<PolyMesh, CliError> {
    match &cfg.mesh {
        Some(path) => io::read_mesh(path).map_err(|e| match e {
            mhd_vem::Error::Io(io) => CliError::Io(format!("{}: {io}", path.display())),
            other => CliError::Solver(other),
        }),
        None => Ok(gen_family(cfg.family, cfg.n, cfg.seed)),
    }
}

pub fn convergence(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    if cfg.mesh.is_some() {
        return Err(CliError::Config("convergence runs on generated families; --mesh is not accepted".into()));
    }
    let params = cfg.params.unwrap_or_default();
    let sizes = cfg.level_sizes();
    let table = convergence_study(cfg.family, &sizes, cfg.k, params, cfg.seed, &cfg.oseen())?;
    let rows = table.report_rows();
    let list: Vec<String> = sizes.iter().map(usize::to_string).collect();
    writeln!(out, "family={} k={} {} n={}", cfg.family, cfg.k, fmt_params(&params), list.join(","))
        .map_err(stdout_err)?;
    write!(out, "{}", format_table(&rows)).map_err(stdout_err)?;
    if let Some(path) = &cfg.out {
        write_report(&rows, create(path)?)?;
    }
    Ok(())
}

pub fn hartmann(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let preset = match cfg.preset {
        Preset::Ha1 => HartmannCase::ha1(),
        Preset::Ha5 => HartmannCase::ha5(),
    };
    let case = HartmannCase::new(cfg.params.unwrap_or(preset.params), cfg.g);
    let r = run_hartmann(&case, cfg.ny, cfg.k, &cfg.oseen())?;
    writeln!(out, "Ha={} {} G={} k={} ny={}", case.ha(), fmt_params(&case.params), case.g, cfg.k, cfg.ny)
        .map_err(stdout_err)?;
    writeln!(
        out,
        "rel_err_u={:.6e} rel_err_b={:.6e} e_u0={:.6e} e_b0={:.6e} iterations={}",
        r.rel_err_u, r.rel_err_b, r.errors.e_u0, r.errors.e_b0, r.errors.iterations
    )
    .map_err(stdout_err)?;
    if let Some(path) = &cfg.out {
        write_profile(&r.samples, create(path)?)?;
    }
    Ok(())
}

/// Manufactured problem on a single mesh.
pub fn solve(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let mesh = load_mesh(cfg)?;
    let params = cfg.params.unwrap_or_default();
    let case = ManufacturedCase::new(params);
    let cells = mesh.num_cells();
    let h = mesh.mesh_size();
    let disc = Discretization::new(mesh, cfg.k, params, case.bc())?;
    let state = oseen_iterate(&disc, &|x| case.f(x), &|x| case.g(x), &cfg.oseen())?;
    let e = compute_errors(&disc, &state, &case);
    writeln!(out, "cells={cells} h={h:.6} k={} {}", cfg.k, fmt_params(&params)).map_err(stdout_err)?;
    writeln!(out, "iterations={} increment={:.3e}", state.iterations, state.increment).map_err(stdout_err)?;
    writeln!(
        out,
        "e_u0={:.6e} e_u1={:.6e} e_b0={:.6e} e_b1={:.6e} e_p0={:.6e} div={:.3e}",
        e.e_u0, e.e_u1, e.e_b0, e.e_b1, e.e_p0, e.div_norm
    )
    .map_err(stdout_err)?;
    if let Some(path) = &cfg.out {
        write_cell_samples(&cell_samples(&disc, &state), create(path)?)?;
    }
    Ok(())
}

pub fn mesh_info(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let mesh = load_mesh(cfg)?;
    let q = quality_report(&mesh);
    writeln!(out, "cells={} h={:.6}", mesh.num_cells(), mesh.mesh_size()).map_err(stdout_err)?;
    writeln!(
        out,
        "vertices={} edges={} boundary_edges={}",
        mesh.num_vertices(),
        mesh.num_edges(),
        mesh.num_boundary_edges()
    )
    .map_err(stdout_err)?;
    writeln!(
        out,
        "rho={:.6} min_ball_ratio={:.6} min_vertex_ratio={:.6} warnings={}",
        q.rho(),
        q.min_ball_ratio,
        q.min_vertex_ratio,
        q.warnings.len()
    )
    .map_err(stdout_err)?;
    if let Some(path) = &cfg.out {
        create(path)?
            .write_all(io::to_json(&mesh).as_bytes())
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Options;

    fn run(f: fn(&RunConfig, &mut dyn Write) -> Result<(), CliError>, o: Options) -> String {
        let cfg = RunConfig::from_options(o).unwrap();
        let mut buf = Vec::new();
        f(&cfg, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn mesh_info_of_the_unit_quad_grid() {
        let text = run(mesh_info, Options { n: Some(4), ..Default::default() });
        assert_eq!(text.lines().next(), Some("cells=16 h=0.353553"));
        assert!(text.contains("vertices=25 edges=40 boundary_edges=16"));
    }

    #[test]
    fn solve_reports_errors() {
        let text = run(solve, Options { n: Some(4), ..Default::default() });
        assert!(text.starts_with("cells=16 h=0.353553 k=1 Rnu=1 Rm=1 Sc=1\n"));
        assert!(text.lines().nth(2).unwrap().starts_with("e_u0="));
    }

    #[test]
    fn explicit_parameters_replace_the_preset() {
        let o = Options { r_nu: Some(2.0), r_m: Some(2.0), s_c: Some(2.0), ny: Some(2), ..Default::default() };
        let text = run(hartmann, o);
        assert!(text.starts_with("Ha=2.8284271247461903 Rnu=2 Rm=2 Sc=2 G=0.1"), "{text}");
    }

    #[test]
    fn convergence_rejects_mesh_files() {
        let cfg = RunConfig::from_options(Options { mesh: Some("m.json".into()), ..Default::default() }).unwrap();
        let err = convergence(&cfg, &mut Vec::new()).unwrap_err();
        assert_eq!(err.tag(), "config");
    }
}
