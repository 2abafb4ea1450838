//! JSON mesh files: `{"vertices": [[x, y], ...], "cells": [[i0, i1, ...], ...]}`.
//!
//! Coordinates are written with the shortest decimal representation that
//! parses back to the same `f64`, so write → read is bit-exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{build_mesh, PolyMesh};
use crate::{Error, Point, Result};

#[derive(Debug, Serialize, Deserialize)]
struct MeshFile {
    vertices: Vec<Point>,
    cells: Vec<Vec<usize>>,
}

pub fn to_json(mesh: &PolyMesh) -> String {
    let file = MeshFile { vertices: mesh.vertices().to_vec(), cells: mesh.cells().to_vec() };
    serde_json::to_string(&file).expect("mesh serializes")
}

pub fn from_json(text: &str) -> Result<PolyMesh> {
    let file: MeshFile = serde_json::from_str(text).map_err(|e| Error::MeshFormat(e.to_string()))?;
    build_mesh(file.vertices, file.cells)
}

pub fn write_mesh(mesh: &PolyMesh, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json(mesh))?;
    Ok(())
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<PolyMesh> {
    from_json(&fs::read_to_string(path)?)
}
