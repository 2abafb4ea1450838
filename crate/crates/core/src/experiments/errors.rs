//! Error norms between discrete and exact fields.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::magnetic_space::MagneticElement;
use crate::polybasis::{dim, polygon_quadrature};
use crate::system::{Discretization, SolverState};
use crate::velocity_space::VelocityElement;

use super::cases::ExactSolution;

/// Error quantities on one mesh.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorReport {
    pub h: f64,
    /// `sqrt(Σ ‖u - Π⁰u_h‖²)`
    pub e_u0: f64,
    /// `sqrt(Σ |u - Π∇u_h|²_1)`
    pub e_u1: f64,
    pub e_b0: f64,
    /// `sqrt(e_b0² + Σ |b - Π∇b_h|²_1)`
    pub e_b1: f64,
    pub e_p0: f64,
    /// `L²` norm of the elementwise discrete divergence of `u_h`.
    pub div_norm: f64,
    pub iterations: usize,
}

/// Quadrature exactness used against analytic fields.
fn error_degree(k: usize) -> usize {
    2 * k + 4
}

pub fn compute_errors(disc: &Discretization, state: &SolverState, exact: &dyn ExactSolution) -> ErrorReport {
    let k = disc.k;
    let nk = dim(k as isize);
    let nkm1 = dim(k as isize - 1);
    let parts: Vec<[f64; 6]> = (0..disc.num_cells())
        .into_par_iter()
        .map(|cell| {
            let sp = &disc.spaces[cell];
            let basis = &sp.ctx.basis;
            let ul = disc.local_vel(cell, &state.u);
            let bl = disc.local_mag(cell, &state.b);
            let pl = disc.local_pres(cell, &state.p);
            let u0 = &sp.vel.p0 * &ul;
            let u1 = &sp.vel.pnabla * &ul;
            let b0 = &sp.mag.p0 * &bl;
            let b1 = &sp.mag.pnabla * &bl;
            let div = &sp.vel.div_rep * &ul;
            let q = polygon_quadrature(&sp.ctx.geom, error_degree(k));
            let mut acc = [0.0; 6];
            for (&x, &w) in q.points.iter().zip(&q.weights) {
                let m = basis.values(x);
                let g = basis.gradients(x);
                let eval = |c: &DVector<f64>, comp: usize| -> f64 { (0..nk).map(|a| c[comp * nk + a] * m[a]).sum() };
                let eval_grad = |c: &DVector<f64>, comp: usize, d: usize| -> f64 {
                    (0..nk).map(|a| c[comp * nk + a] * g[a][d]).sum()
                };
                let (u, gu, b, gb, p) = (exact.u(x), exact.grad_u(x), exact.b(x), exact.grad_b(x), exact.p(x));
                for c in 0..2 {
                    acc[0] += w * (u[c] - eval(&u0, c)).powi(2);
                    acc[2] += w * (b[c] - eval(&b0, c)).powi(2);
                    for d in 0..2 {
                        acc[1] += w * (gu[c][d] - eval_grad(&u1, c, d)).powi(2);
                        acc[3] += w * (gb[c][d] - eval_grad(&b1, c, d)).powi(2);
                    }
                }
                let ph: f64 = (0..nkm1).map(|a| pl[a] * m[a]).sum();
                acc[4] += w * (p - ph).powi(2);
                let dh: f64 = (0..nkm1).map(|a| div[a] * m[a]).sum();
                acc[5] += w * dh * dh;
            }
            acc
        })
        .collect();
    let mut s = [0.0; 6];
    for a in parts {
        for i in 0..6 {
            s[i] += a[i];
        }
    }
    ErrorReport {
        h: disc.mesh.mesh_size(),
        e_u0: s[0].sqrt(),
        e_u1: s[1].sqrt(),
        e_b0: s[2].sqrt(),
        e_b1: (s[2] + s[3]).sqrt(),
        e_p0: s[4].sqrt(),
        div_norm: s[5].sqrt(),
        iterations: state.iterations,
    }
}

/// DOF interpolant of the exact fields, with the pressure `L²`-projected per cell.
pub fn interpolate_exact(disc: &Discretization, exact: &dyn ExactSolution) -> SolverState {
    let dm = &disc.dofmap;
    let mut state = SolverState::zero(dm);
    let np = dm.n_pres_local();
    for (cell, sp) in disc.spaces.iter().enumerate() {
        let ul = VelocityElement::interpolate(&sp.ctx, |x| exact.u(x));
        let bl = MagneticElement::interpolate(&sp.ctx, |x| exact.b(x));
        for (i, &r) in dm.vel_cells[cell].iter().enumerate() {
            state.u[r] = ul[i];
        }
        for (i, &r) in dm.mag_cells[cell].iter().enumerate() {
            state.b[r] = bl[i];
        }
        let pl = sp.ctx.l2_project(disc.k - 1, |x| exact.p(x)).expect("mass matrix checked at setup");
        state.p[dm.pres_cell(cell)].copy_from_slice(&pl.as_slice()[..np]);
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::cases::ManufacturedCase;
    use crate::forms::ModelParams;
    use crate::mesh::{gen_family, MeshFamily};
    use crate::system::BcSpec;

    struct Zero;

    impl ExactSolution for Zero {
        fn u(&self, _: crate::Point) -> [f64; 2] {
            [0.0; 2]
        }
        fn grad_u(&self, _: crate::Point) -> [[f64; 2]; 2] {
            [[0.0; 2]; 2]
        }
        fn p(&self, _: crate::Point) -> f64 {
            0.0
        }
        fn b(&self, _: crate::Point) -> [f64; 2] {
            [0.0; 2]
        }
        fn grad_b(&self, _: crate::Point) -> [[f64; 2]; 2] {
            [[0.0; 2]; 2]
        }
        fn f(&self, _: crate::Point) -> [f64; 2] {
            [0.0; 2]
        }
        fn g(&self, _: crate::Point) -> [f64; 2] {
            [0.0; 2]
        }
    }

    fn disc(n: usize, k: usize) -> Discretization {
        Discretization::new(gen_family(MeshFamily::Quad, n, 0), k, ModelParams::default(), BcSpec::no_slip_insulating())
            .unwrap()
    }

    #[test]
    fn zero_state_against_zero_solution() {
        let d = disc(2, 1);
        let r = compute_errors(&d, &SolverState::zero(&d.dofmap), &Zero);
        assert_eq!((r.e_u0, r.e_u1, r.e_b0, r.e_b1, r.e_p0, r.div_norm), (0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn interpolant_errors_decay_at_optimal_rates() {
        let case = ManufacturedCase::default();
        for k in 1..=2 {
            let r: Vec<ErrorReport> = [4, 8, 16]
                .iter()
                .map(|&n| {
                    let d = disc(n, k);
                    compute_errors(&d, &interpolate_exact(&d, &case), &case)
                })
                .collect();
            let rate = |a: f64, b: f64| (a / b).log2();
            let kk = k as f64;
            assert!((rate(r[1].e_u0, r[2].e_u0) - (kk + 1.0)).abs() < 0.25, "k={k}");
            assert!((rate(r[1].e_u1, r[2].e_u1) - kk).abs() < 0.25);
            assert!((rate(r[1].e_b0, r[2].e_b0) - (kk + 1.0)).abs() < 0.25);
            assert!((rate(r[1].e_b1, r[2].e_b1) - kk).abs() < 0.25);
            assert!(r.iter().all(|e| e.div_norm < 1e-12));
        }
    }
}
