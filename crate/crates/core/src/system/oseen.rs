use rayon::prelude::*;

use crate::{Error, Point, Result};

use super::assembly::{assemble_oseen, Discretization};
use super::dofmap::DofMap;
use super::solve::solve_linear;

/// Discrete fields as raw DOF vectors (constrained values included).
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub u: Vec<f64>,
    pub b: Vec<f64>,
    /// Pressure coefficients, `n_{k-1}` scaled monomials per cell.
    pub p: Vec<f64>,
    pub multiplier: f64,
    pub iterations: usize,
    /// Last relative increment.
    pub increment: f64,
    pub history: Vec<f64>,
}

impl SolverState {
    pub fn zero(dofmap: &DofMap) -> Self {
        SolverState {
            u: vec![0.0; dofmap.vel.len()],
            b: vec![0.0; dofmap.mag.len()],
            p: vec![0.0; dofmap.n_pres],
            multiplier: 0.0,
            iterations: 0,
            increment: 0.0,
            history: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OseenOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for OseenOptions {
    fn default() -> Self {
        OseenOptions { tol: 1e-7, max_iter: 100 }
    }
}

/// `sqrt(|Π∇u|²_{1,h} + ‖Π⁰b‖² + |Π∇b|²_{1,h} + ‖p‖²)`, summed over elements.
pub fn state_norm(disc: &Discretization, u: &[f64], b: &[f64], p: &[f64]) -> f64 {
    let k = disc.k as isize;
    (0..disc.num_cells())
        .into_par_iter()
        .map(|cell| {
            let sp = &disc.spaces[cell];
            let ctx = &sp.ctx;
            let ul = disc.local_vel(cell, u);
            let bl = disc.local_mag(cell, b);
            let pl = disc.local_pres(cell, p);
            let gu = &sp.vel.pnabla * &ul;
            let gb = &sp.mag.pnabla * &bl;
            let b0 = &sp.mag.p0 * &bl;
            let stiff = ctx.vector_stiffness();
            let mass = ctx.vector_mass(k);
            let mp = ctx.mass_block(k - 1);
            gu.dot(&(&stiff * &gu)) + gb.dot(&(&stiff * &gb)) + b0.dot(&(&mass * &b0)) + pl.dot(&(&mp * &pl))
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

/// Oseen iteration from the zero state: the previous iterate fills the
/// convective and coupling slots, the new one solves the linear system.
/// Stops when the increment in [`state_norm`] falls below `tol` relative to
/// the new state.
pub fn oseen_iterate(
    disc: &Discretization,
    f: &(dyn Fn(Point) -> [f64; 2] + Sync),
    g: &(dyn Fn(Point) -> [f64; 2] + Sync),
    opts: &OseenOptions,
) -> Result<SolverState> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", opts.tol)));
    }
    let dm = &disc.dofmap;
    let loads = disc.loads(f, g);
    let mut state = SolverState::zero(dm);
    for it in 1..=opts.max_iter {
        let sys = assemble_oseen(disc, &state, &loads)?;
        let x = solve_linear(&sys)?;
        let u = dm.expand_vel(&x);
        let b = dm.expand_mag(&x);
        let op = dm.p_offset();
        let p = x[op..op + dm.n_pres].to_vec();
        let du: Vec<f64> = u.iter().zip(&state.u).map(|(a, b)| a - b).collect();
        let db: Vec<f64> = b.iter().zip(&state.b).map(|(a, b)| a - b).collect();
        let dp: Vec<f64> = p.iter().zip(&state.p).map(|(a, b)| a - b).collect();
        let inc = state_norm(disc, &du, &db, &dp);
        let nrm = state_norm(disc, &u, &b, &p);
        let rel = if inc == 0.0 { 0.0 } else { inc / nrm };
        state.u = u;
        state.b = b;
        state.p = p;
        state.multiplier = dm.multiplier_index().map_or(0.0, |i| x[i]);
        state.iterations = it;
        state.increment = rel;
        state.history.push(rel);
        if rel <= opts.tol {
            return Ok(state);
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, increment: state.increment, state: Box::new(state) })
}
