use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mhd_vem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhd-vem")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn mesh_info_first_line() {
    let o = mhd_vem(&["mesh-info", "--family", "quad", "--n", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("cells=16 h=0.353553"));
}

#[test]
fn zero_degree_is_a_config_error() {
    let o = mhd_vem(&["solve", "--k", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr(&o).trim_end(), "error[config]: k must be ≥ 1");
    assert!(o.stdout.is_empty());
}

#[test]
fn convergence_writes_one_row_per_level() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rates.csv");
    let o = mhd_vem(&["convergence", "--k", "1", "--levels", "4", "--base", "2", "--out", path(&csv)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "{text}");
    assert!(lines[0].starts_with("h,"));
}

#[test]
fn identical_configs_give_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = mhd_vem(&[
            "solve",
            "--family",
            "voronoi",
            "--n",
            "4",
            "--seed",
            "3",
            "--threads",
            "2",
            "--out",
            path(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        (o.stdout, fs::read(out).unwrap())
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn hartmann_without_forcing_is_at_rest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("profile.csv");
    let o = mhd_vem(&["hartmann", "--ny", "4", "--G", "0", "--out", path(&csv)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    let mut rows = text.lines();
    let header: Vec<&str> = rows.next().unwrap().split(',').collect();
    let mut n = 0;
    for row in rows {
        for (i, v) in row.split(',').enumerate() {
            if header[i] != "x2" {
                assert!(v.parse::<f64>().unwrap().abs() < 1e-12, "{row}");
            }
        }
        n += 1;
    }
    assert_eq!(n, 21);
}

#[test]
fn ha5_preset() {
    let o = mhd_vem(&["hartmann", "--preset", "ha5", "--ny", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("Ha=5 "), "{}", stdout(&o));
}

#[test]
fn mesh_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("mesh.json");
    let first = mhd_vem(&["mesh-info", "--family", "voronoi", "--n", "5", "--seed", "11", "--out", path(&file)]);
    assert!(first.status.success(), "{}", stderr(&first));
    let second = mhd_vem(&["mesh-info", "--mesh", path(&file)]);
    assert!(second.status.success(), "{}", stderr(&second));
    assert_eq!(stdout(&first), stdout(&second));
    let solved = mhd_vem(&["solve", "--mesh", path(&file)]);
    assert!(solved.status.success(), "{}", stderr(&solved));
}

#[test]
fn malformed_mesh_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    fs::write(&file, r#"{"vertices": [[0,0],[1,0],[1,1]], "cells": [[0,1,7]]}"#).unwrap();
    let o = mhd_vem(&["mesh-info", "--mesh", path(&file)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[mesh]: "), "{}", stderr(&o));
    let missing = mhd_vem(&["mesh-info", "--mesh", path(&dir.path().join("none.json"))]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).starts_with("error[io]: "));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.toml");
    fs::write(&file, "family = \"tri\"\nn = 3\nk = 2\n").unwrap();
    let o = mhd_vem(&["mesh-info", "--config", path(&file), "--n", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("cells=8 "), "{}", stdout(&o));

    fs::write(&file, "degree = 2\n").unwrap();
    let o = mhd_vem(&["mesh-info", "--config", path(&file)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[config]: "));
}

#[test]
fn unknown_family_and_flag() {
    let o = mhd_vem(&["mesh-info", "--family", "hex"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[config]: "));
    let o = mhd_vem(&["solve", "--degree", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[usage]: "));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn iteration_cap_is_a_convergence_error() {
    let o = mhd_vem(&["solve", "--n", "4", "--max-iter", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[convergence]: "));
}

#[test]
fn help_goes_to_stdout() {
    let o = mhd_vem(&["--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("mesh-info"));
}
