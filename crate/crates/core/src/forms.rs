//! Elementwise discrete forms.
//!
//! For trial DOF vectors `u, b, p` and test DOF vectors `v, c, q` on one element:
//! - `a0(u, v) = R_ν⁻¹ [ (∇Π∇u, ∇Π∇v) + S(u - Π∇u, v - Π∇v) ]`
//! - `a1(b, c) = R_m⁻¹ S_c [ (curl b, curl c) + (div b, div c) + S(b - Π∇b, c - Π∇c) ]`
//!   with curl and divergence replaced by their `P_{k-1}` projections
//! - `c2(w; u, v) = ½ [ ((∇u) w, v) - ((∇v) w, u) ]` using `Π⁰` for
//!   `u, v, w` and the `P_{k-1}` projection of the gradients
//! - `c3(w; b, v) = -S_c (curl b × w, v)` coupling the induction and momentum
//!   equations; its transpose with opposite sign tests the induction equation
//! - `d(v, q) = (div v, q)`
//!
//! `S` is the dof-dof stabilization `Σ_i dof_i(·) dof_i(·)`.

use nalgebra::{DMatrix, DVector};

use crate::magnetic_space::MagneticElement;
use crate::mesh::ElementGeometry;
use crate::polybasis::{dim, polygon_quadrature, ElementContext, Pk2Decomposition, QuadRule};
use crate::velocity_space::VelocityElement;
use crate::{Error, Point, Result};

/// Fluid and magnetic Reynolds numbers and the coupling number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub r_nu: f64,
    pub r_m: f64,
    pub s_c: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { r_nu: 1.0, r_m: 1.0, s_c: 1.0 }
    }
}

impl ModelParams {
    pub fn new(r_nu: f64, r_m: f64, s_c: f64) -> Result<Self> {
        for (name, v) in [("Rnu", r_nu), ("Rm", r_m), ("Sc", s_c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(ModelParams { r_nu, r_m, s_c })
    }

    /// `Ha = sqrt(R_ν R_m S_c)`.
    pub fn hartmann_number(&self) -> f64 {
        (self.r_nu * self.r_m * self.s_c).sqrt()
    }
}

/// Everything the local forms need on one element.
#[derive(Debug, Clone)]
pub struct ElementSpaces {
    pub ctx: ElementContext,
    pub vel: VelocityElement,
    pub mag: MagneticElement,
    /// DOFs of the vector monomials of `[P_k]²` in the velocity space.
    pub vel_dofs_of_poly: DMatrix<f64>,
    pub mag_dofs_of_poly: DMatrix<f64>,
    /// Rule exact to degree `3k` for the trilinear terms.
    pub quad3: QuadRule,
}

impl ElementSpaces {
    pub fn new(geom: &ElementGeometry, k: usize, decomp: &Pk2Decomposition) -> Result<Self> {
        let ctx = ElementContext::new(geom, k);
        let vel = VelocityElement::new(&ctx, decomp)?;
        let mag = MagneticElement::new(&ctx)?;
        let nk = dim(k as isize);
        let mut vel_dofs_of_poly = DMatrix::zeros(vel.layout.ndof(), 2 * nk);
        let mut mag_dofs_of_poly = DMatrix::zeros(mag.layout.ndof(), 2 * nk);
        for c in 0..2 {
            for i in 0..nk {
                let f = |x: Point| {
                    let m = ctx.basis.values(x)[i];
                    if c == 0 {
                        [m, 0.0]
                    } else {
                        [0.0, m]
                    }
                };
                vel_dofs_of_poly.set_column(c * nk + i, &VelocityElement::interpolate(&ctx, f));
                mag_dofs_of_poly.set_column(c * nk + i, &MagneticElement::interpolate(&ctx, f));
            }
        }
        let quad3 = polygon_quadrature(geom, 3 * k);
        Ok(ElementSpaces { ctx, vel, mag, vel_dofs_of_poly, mag_dofs_of_poly, quad3 })
    }

    pub fn k(&self) -> usize {
        self.ctx.k
    }

    pub fn n_vel(&self) -> usize {
        self.vel.layout.ndof()
    }

    pub fn n_mag(&self) -> usize {
        self.mag.layout.ndof()
    }

    pub fn n_pres(&self) -> usize {
        dim(self.k() as isize - 1)
    }

    /// Evaluates a stacked vector polynomial at `x`.
    pub fn eval_vec(&self, coeffs: &[f64], x: Point) -> [f64; 2] {
        let n = coeffs.len() / 2;
        [self.ctx.basis.eval(&coeffs[..n], x), self.ctx.basis.eval(&coeffs[n..], x)]
    }
}

fn stabilization(dofs_of_poly: &DMatrix<f64>, pnabla: &DMatrix<f64>) -> DMatrix<f64> {
    let n = dofs_of_poly.nrows();
    let r = DMatrix::identity(n, n) - dofs_of_poly * pnabla;
    r.transpose() * r
}

pub fn local_a0(sp: &ElementSpaces, params: &ModelParams) -> DMatrix<f64> {
    let p = &sp.vel.pnabla;
    let consistency = p.transpose() * sp.ctx.vector_stiffness() * p;
    (consistency + stabilization(&sp.vel_dofs_of_poly, p)) / params.r_nu
}

pub fn local_a1(sp: &ElementSpaces, params: &ModelParams) -> DMatrix<f64> {
    let m = sp.ctx.mass_block(sp.k() as isize - 1);
    let curl = &sp.mag.curl_rep;
    let div = &sp.mag.div_rep;
    let total =
        curl.transpose() * &m * curl + div.transpose() * &m * div + stabilization(&sp.mag_dofs_of_poly, &sp.mag.pnabla);
    total * (params.s_c / params.r_m)
}

/// `d[q, v] = ∫ div v m_q`.
pub fn local_d(sp: &ElementSpaces) -> DMatrix<f64> {
    sp.ctx.mass_block(sp.k() as isize - 1) * &sp.vel.div_rep
}

/// Per quadrature point: `Π⁰φ_i(x)` as a `2 × n` matrix.
fn p0_values(sp: &ElementSpaces, p0: &DMatrix<f64>, m: &[f64]) -> DMatrix<f64> {
    let nk = dim(sp.k() as isize);
    let n = p0.ncols();
    let mut out = DMatrix::zeros(2, n);
    for c in 0..2 {
        for a in 0..nk {
            if m[a] == 0.0 {
                continue;
            }
            for j in 0..n {
                out[(c, j)] += m[a] * p0[(c * nk + a, j)];
            }
        }
    }
    out
}

/// Skew-symmetrized convection with frozen advecting velocity `w` (velocity DOFs).
pub fn local_c2(sp: &ElementSpaces, w: &DVector<f64>) -> DMatrix<f64> {
    let n = sp.n_vel();
    let nkm1 = dim(sp.k() as isize - 1);
    let wc = &sp.vel.p0 * w;
    let mut t = DMatrix::zeros(n, n);
    for (&x, &wt) in sp.quad3.points.iter().zip(&sp.quad3.weights) {
        let m = sp.ctx.basis.values(x);
        let wx = sp.eval_vec(wc.as_slice(), x);
        let vals = p0_values(sp, &sp.vel.p0, &m);
        // (∇φ_j) w at x
        let mut conv = DMatrix::zeros(2, n);
        for c in 0..2 {
            for d in 0..2 {
                if wx[d] == 0.0 {
                    continue;
                }
                let blk = (2 * c + d) * nkm1;
                for g in 0..nkm1 {
                    let s = wx[d] * m[g];
                    for j in 0..n {
                        conv[(c, j)] += s * sp.vel.pgrad[(blk + g, j)];
                    }
                }
            }
        }
        t += wt * vals.transpose() * conv;
    }
    (&t - t.transpose()) * 0.5
}

/// Coupling blocks with frozen magnetic field `bw` (magnetic DOFs).
/// Returns `(c3a, c3b)` with `c3b = -c3aᵀ`.
pub fn local_c3(sp: &ElementSpaces, bw: &DVector<f64>, params: &ModelParams) -> (DMatrix<f64>, DMatrix<f64>) {
    let nv = sp.n_vel();
    let nb = sp.n_mag();
    let nkm1 = dim(sp.k() as isize - 1);
    let bc = &sp.mag.p0 * bw;
    let mut c3a = DMatrix::zeros(nv, nb);
    for (&x, &wt) in sp.quad3.points.iter().zip(&sp.quad3.weights) {
        let m = sp.ctx.basis.values(x);
        let bx = sp.eval_vec(bc.as_slice(), x);
        let vals = p0_values(sp, &sp.vel.p0, &m);
        // (curl b × B)·v = curl b · (-B_2 v_1 + B_1 v_2)
        let cross = vals.row(0) * (-bx[1]) + vals.row(1) * bx[0];
        let mut curl = DVector::zeros(nb);
        for g in 0..nkm1 {
            for j in 0..nb {
                curl[j] += m[g] * sp.mag.curl_rep[(g, j)];
            }
        }
        c3a -= (wt * params.s_c) * cross.transpose() * curl.transpose();
    }
    let c3b = -c3a.transpose();
    (c3a, c3b)
}

/// `∫ f · Π⁰v` for each velocity basis function, or against the magnetic
/// `Π⁰` when `magnetic` is set.
pub fn local_load(sp: &ElementSpaces, f: &dyn Fn(Point) -> [f64; 2], magnetic: bool) -> DVector<f64> {
    let p0 = if magnetic { &sp.mag.p0 } else { &sp.vel.p0 };
    let q = polygon_quadrature(&sp.ctx.geom, 2 * sp.k() + 4);
    let mut out = DVector::zeros(p0.ncols());
    for (&x, &w) in q.points.iter().zip(&q.weights) {
        let m = sp.ctx.basis.values(x);
        let vals = p0_values(sp, p0, &m);
        let fx = f(x);
        out += w * (vals.row(0).transpose() * fx[0] + vals.row(1).transpose() * fx[1]);
    }
    out
}

/// Linear element blocks: `a0`, `a1`, `d`.
pub fn linear_blocks(sp: &ElementSpaces, params: &ModelParams) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    (local_a0(sp, params), local_a1(sp, params), local_d(sp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;

    fn hexagon() -> ElementGeometry {
        let m = build_mesh(
            vec![[0.0, 0.0], [0.9, -0.1], [1.4, 0.6], [1.1, 1.3], [0.3, 1.2], [-0.3, 0.5]],
            vec![(0..6).collect()],
        )
        .unwrap();
        m.geometry().elements[0].clone()
    }

    fn spaces(k: usize) -> ElementSpaces {
        ElementSpaces::new(&hexagon(), k, &Pk2Decomposition::new(k).unwrap()).unwrap()
    }

    fn u_poly(x: Point) -> [f64; 2] {
        [x[0] * x[0] - x[1], 0.5 * x[0] * x[1] + 1.0]
    }

    fn v_poly(x: Point) -> [f64; 2] {
        [x[1] * x[1] + 2.0 * x[0], x[0] - x[1] * x[0]]
    }

    fn grad(f: impl Fn(Point) -> [f64; 2], x: Point) -> [[f64; 2]; 2] {
        let h = 1e-6;
        let mut g = [[0.0; 2]; 2];
        for d in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[d] += h;
            xm[d] -= h;
            let (fp, fm) = (f(xp), f(xm));
            for c in 0..2 {
                g[c][d] = (fp[c] - fm[c]) / (2.0 * h);
            }
        }
        g
    }

    #[test]
    fn a0_is_consistent_on_polynomials() {
        let sp = spaces(2);
        let params = ModelParams::new(2.0, 1.0, 1.0).unwrap();
        let a0 = local_a0(&sp, &params);
        let u = VelocityElement::interpolate(&sp.ctx, u_poly);
        let v = VelocityElement::interpolate(&sp.ctx, v_poly);
        let disc = (v.transpose() * &a0 * &u)[0];
        let q = polygon_quadrature(&sp.ctx.geom, 6);
        let exact = q.integrate(|x| {
            let (gu, gv) = (grad(u_poly, x), grad(v_poly, x));
            (0..2).flat_map(|c| (0..2).map(move |d| (c, d))).map(|(c, d)| gu[c][d] * gv[c][d]).sum::<f64>()
        }) / 2.0;
        assert!((disc - exact).abs() < 1e-7, "{disc} vs {exact}");
    }

    #[test]
    fn a0_and_a1_are_symmetric_positive_semidefinite() {
        for k in 1..=3 {
            let sp = spaces(k);
            let (a0, a1, _) = linear_blocks(&sp, &ModelParams::default());
            for a in [a0, a1] {
                assert!((&a - a.transpose()).amax() < 1e-12 * a.amax());
                let ev = a.symmetric_eigen().eigenvalues;
                assert!(ev.min() > -1e-10 * ev.max());
            }
        }
    }

    #[test]
    fn a0_kernel_is_constants() {
        let sp = spaces(2);
        let a0 = local_a0(&sp, &ModelParams::default());
        let ev = a0.symmetric_eigen().eigenvalues;
        let small = ev.iter().filter(|&&e| e.abs() < 1e-10 * ev.max()).count();
        assert_eq!(small, 2);
    }

    #[test]
    fn c2_is_skew_and_consistent() {
        let sp = spaces(2);
        let w = VelocityElement::interpolate(&sp.ctx, |x| [1.0 + x[1], 0.5 - x[0]]);
        let c2 = local_c2(&sp, &w);
        assert!((&c2 + c2.transpose()).amax() < 1e-13);
        let u = VelocityElement::interpolate(&sp.ctx, u_poly);
        let v = VelocityElement::interpolate(&sp.ctx, v_poly);
        let disc = (v.transpose() * &c2 * &u)[0];
        let q = polygon_quadrature(&sp.ctx.geom, 8);
        let wf = |x: Point| [1.0 + x[1], 0.5 - x[0]];
        let exact = 0.5
            * q.integrate(|x| {
                let (gu, gv, wx, ux, vx) = (grad(u_poly, x), grad(v_poly, x), wf(x), u_poly(x), v_poly(x));
                let mut s = 0.0;
                for c in 0..2 {
                    for d in 0..2 {
                        s += gu[c][d] * wx[d] * vx[c] - gv[c][d] * wx[d] * ux[c];
                    }
                }
                s
            });
        assert!((disc - exact).abs() < 1e-7, "{disc} vs {exact}");
    }

    #[test]
    fn coupling_blocks_are_negative_transposes() {
        let sp = spaces(1);
        let b = MagneticElement::interpolate(&sp.ctx, |x| [x[1], 1.0 - x[0]]);
        let params = ModelParams::new(1.0, 1.0, 3.0).unwrap();
        let (c3a, c3b) = local_c3(&sp, &b, &params);
        assert_eq!(c3a.shape(), (sp.n_vel(), sp.n_mag()));
        assert!((&c3b + c3a.transpose()).amax() == 0.0);
        // curl of (x², 0)... use b = (-y, x) with curl 2 and B = (1, 0): (2 × B)·v = 2 v_2
        let trial = MagneticElement::interpolate(&sp.ctx, |x| [-x[1], x[0]]);
        let bw = MagneticElement::interpolate(&sp.ctx, |_| [1.0, 0.0]);
        let (c3a, _) = local_c3(&sp, &bw, &params);
        let v = VelocityElement::interpolate(&sp.ctx, |x| [0.0, 1.0 + x[0]]);
        let disc = (v.transpose() * &c3a * &trial)[0];
        let q = polygon_quadrature(&sp.ctx.geom, 4);
        let exact = -3.0 * q.integrate(|x| 2.0 * (1.0 + x[0]));
        assert!((disc - exact).abs() < 1e-12, "{disc} vs {exact}");
    }

    #[test]
    fn divergence_form_matches_integral() {
        let sp = spaces(2);
        let d = local_d(&sp);
        let u = VelocityElement::interpolate(&sp.ctx, u_poly);
        let du = &d * &u;
        let q = polygon_quadrature(&sp.ctx.geom, 6);
        for i in 0..sp.n_pres() {
            let exact = q.integrate(|x| (2.0 * x[0] + 0.5 * x[0]) * sp.ctx.basis.values(x)[i]);
            assert!((du[i] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn load_of_polynomial_data() {
        let sp = spaces(1);
        let v = VelocityElement::interpolate(&sp.ctx, |x| [x[0], x[1]]);
        let load = local_load(&sp, &|_| [1.0, 2.0], false);
        let q = polygon_quadrature(&sp.ctx.geom, 2);
        let exact = q.integrate(|x| x[0] + 2.0 * x[1]);
        assert!((load.dot(&v) - exact).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters() {
        assert!(ModelParams::new(0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, f64::NAN, 1.0).is_err());
        assert!((ModelParams::new(5.0, 1.0, 5.0).unwrap().hartmann_number() - 5.0).abs() < 1e-15);
    }
}
