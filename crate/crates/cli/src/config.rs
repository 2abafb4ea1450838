use std::path::{Path, PathBuf};

use clap::Args;
use mhd_vem::{MeshFamily, ModelParams};
use serde::Deserialize;

use crate::error::CliError;

/// Flags shared by every subcommand. Each one may also come from the
/// `--config` file; a flag given on the command line wins.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// TOML file with any of these options (flags override it)
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Polynomial degree
    #[arg(long)]
    pub k: Option<usize>,
    /// Mesh family: tri, quad, perturbed_quad or voronoi
    #[arg(long)]
    pub family: Option<String>,
    /// Number of refinement levels
    #[arg(long)]
    pub levels: Option<usize>,
    /// Cells per side on the coarsest level
    #[arg(long)]
    pub base: Option<usize>,
    /// Cells per side for single-mesh commands
    #[arg(long)]
    pub n: Option<usize>,
    /// Cells across the channel height for the Hartmann run
    #[arg(long)]
    pub ny: Option<usize>,
    /// Mesh file (JSON) instead of a generated family
    #[arg(long, value_name = "FILE")]
    pub mesh: Option<PathBuf>,
    /// Fluid Reynolds number
    #[arg(long = "Rnu")]
    #[serde(rename = "Rnu")]
    pub r_nu: Option<f64>,
    /// Magnetic Reynolds number
    #[arg(long = "Rm")]
    #[serde(rename = "Rm")]
    pub r_m: Option<f64>,
    /// Coupling number
    #[arg(long = "Sc")]
    #[serde(rename = "Sc")]
    pub s_c: Option<f64>,
    /// Relative increment tolerance of the Oseen iteration
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Seed for randomized mesh families
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for element computations
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output file
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Hartmann parameter preset: ha1 or ha5
    #[arg(long)]
    pub preset: Option<String>,
    /// Hartmann pressure gradient
    #[arg(long = "G")]
    #[serde(rename = "G")]
    pub g: Option<f64>,
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($field:ident),*) => {
        Options { config: $top.config, $($field: $top.$field.or($base.$field)),* }
    };
}

impl Options {
    /// Fills every option missing here from `base`.
    pub fn over(self, base: Options) -> Options {
        overlay!(
            self, base, k, family, levels, base, n, ny, mesh, r_nu, r_m, s_c, tol, max_iter, seed, threads, out,
            preset, g
        )
    }

    pub fn from_file(path: &Path) -> Result<Options, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))
    }

    /// Merges the config file, if any, under the flags.
    pub fn resolve(self) -> Result<Options, CliError> {
        match &self.config {
            Some(path) => {
                let file = Options::from_file(path)?;
                Ok(self.over(file))
            }
            None => Ok(self),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Ha1,
    Ha5,
}

/// Validated settings with defaults applied.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub k: usize,
    pub family: MeshFamily,
    pub levels: usize,
    pub base: usize,
    pub n: usize,
    pub ny: usize,
    pub mesh: Option<PathBuf>,
    /// Explicit model parameters; `None` means unit values or the preset.
    pub params: Option<ModelParams>,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub preset: Preset,
    pub g: f64,
}

fn at_least_one(name: &str, v: Option<usize>, default: usize) -> Result<usize, CliError> {
    let v = v.unwrap_or(default);
    if v == 0 {
        return Err(CliError::Config(format!("{name} must be ≥ 1")));
    }
    Ok(v)
}

impl RunConfig {
    pub fn from_options(o: Options) -> Result<RunConfig, CliError> {
        let k = at_least_one("k", o.k, 1)?;
        let family = match o.family.as_deref() {
            None => MeshFamily::Quad,
            Some(s) => s.parse().map_err(CliError::Config)?,
        };
        let params = match (o.r_nu, o.r_m, o.s_c) {
            (None, None, None) => None,
            (a, b, c) => Some(
                ModelParams::new(a.unwrap_or(1.0), b.unwrap_or(1.0), c.unwrap_or(1.0))
                    .map_err(|e| CliError::Config(e.to_string()))?,
            ),
        };
        let tol = o.tol.unwrap_or(1e-7);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Config(format!("tol must be positive, got {tol}")));
        }
        let preset = match o.preset.as_deref() {
            None | Some("ha1") => Preset::Ha1,
            Some("ha5") => Preset::Ha5,
            Some(other) => return Err(CliError::Config(format!("unknown preset '{other}' (expected ha1 or ha5)"))),
        };
        let g = o.g.unwrap_or(mhd_vem::experiments::cases::HartmannCase::DEFAULT_G);
        if !g.is_finite() {
            return Err(CliError::Config(format!("G must be finite, got {g}")));
        }
        Ok(RunConfig {
            k,
            family,
            levels: at_least_one("levels", o.levels, 3)?,
            base: at_least_one("base", o.base, 4)?,
            n: at_least_one("n", o.n, 4)?,
            ny: at_least_one("ny", o.ny, 8)?,
            mesh: o.mesh,
            params,
            tol,
            max_iter: at_least_one("max-iter", o.max_iter, 100)?,
            seed: o.seed.unwrap_or(0),
            threads: at_least_one("threads", o.threads, 1)?,
            out: o.out,
            preset,
            g,
        })
    }

    /// Cells per side on each level: `base · 2^i`.
    pub fn level_sizes(&self) -> Vec<usize> {
        (0..self.levels).map(|i| self.base << i).collect()
    }

    pub fn oseen(&self) -> mhd_vem::OseenOptions {
        mhd_vem::OseenOptions { tol: self.tol, max_iter: self.max_iter }
    }
}
