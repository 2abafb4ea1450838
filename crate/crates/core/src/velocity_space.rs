//! Local enhanced nonconforming velocity space of degree `k`.
//!
//! Degrees of freedom, per element:
//! - on each edge `e` and component `c`: `(1/|e|) ∫_e v_c L_j ds`, `j < k`,
//!   with `L_j` the Legendre polynomial in the edge's global orientation;
//! - inside: `(1/|E|) ∫_E v_c m_β`, `|β| <= k-2`.
//!
//! Local numbering: edge `le` (position in the element's edge list) owns
//! `le·2k + c·k + j`; interior moments follow at `2k·N_e + c·n_{k-2} + β`.
//!
//! All operators are returned as dense matrices acting on the local DOF
//! vector. Polynomial outputs are coefficient vectors in the element's
//! scaled monomials; vector polynomials stack both components.

use nalgebra::{DMatrix, DVector};

use crate::polybasis::{dim, edge_legendre_coeffs, index, polygon_quadrature, ElementContext, Pk2Decomposition};
use crate::{Error, Point, Result};

/// Local DOF layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VelocityLayout {
    pub k: usize,
    pub n_edges: usize,
}

impl VelocityLayout {
    pub fn new(k: usize, n_edges: usize) -> Self {
        VelocityLayout { k, n_edges }
    }

    pub fn per_edge(&self) -> usize {
        2 * self.k
    }

    pub fn n_interior(&self) -> usize {
        2 * dim(self.k as isize - 2)
    }

    pub fn ndof(&self) -> usize {
        self.per_edge() * self.n_edges + self.n_interior()
    }

    pub fn edge_dof(&self, le: usize, c: usize, j: usize) -> usize {
        le * 2 * self.k + c * self.k + j
    }

    pub fn interior_dof(&self, c: usize, beta: usize) -> usize {
        self.per_edge() * self.n_edges + c * dim(self.k as isize - 2) + beta
    }
}

/// Computable projections of one element.
#[derive(Debug, Clone)]
pub struct VelocityElement {
    pub layout: VelocityLayout,
    /// Componentwise elliptic projection onto `[P_k]²`, `2 n_k × ndof`.
    pub pnabla: DMatrix<f64>,
    /// Divergence as a polynomial in `P_{k-1}`, `n_{k-1} × ndof`.
    pub div_rep: DMatrix<f64>,
    /// `L²` projection onto `[P_k]²`, `2 n_k × ndof`.
    pub p0: DMatrix<f64>,
    /// `L²` projection of `∇v` onto `[P_{k-1}]^{2×2}`; block `2c + d` holds `∂_d v_c`.
    pub pgrad: DMatrix<f64>,
    /// Legendre coefficients `a_0..a_k` of `v·n` on each edge, `(k+1) × ndof`.
    pub normal_trace: Vec<DMatrix<f64>>,
}

impl VelocityElement {
    pub fn new(ctx: &ElementContext, decomp: &Pk2Decomposition) -> Result<Self> {
        let k = ctx.k;
        assert_eq!(decomp.k, k);
        let geom = &ctx.geom;
        let layout = VelocityLayout::new(k, geom.num_edges());
        let ndof = layout.ndof();
        let nk = dim(k as isize);
        let nkm1 = dim(k as isize - 1);
        let nkp1 = dim(k as isize + 1);
        let area = geom.area;
        let basis = &ctx.basis;

        // elliptic projection, componentwise
        let mut g = DMatrix::zeros(nk, nk);
        g.view_mut((1, 0), (nk - 1, nk)).copy_from(&ctx.stiffness.view((1, 0), (nk - 1, nk)));
        for e in &geom.edges {
            for (i, v) in edge_mean_integrals(ctx, e, k).into_iter().enumerate().take(nk) {
                g[(0, i)] += v;
            }
        }
        let g_lu = g.lu();
        let mut pnabla = DMatrix::zeros(2 * nk, ndof);
        for c in 0..2 {
            let mut b = DMatrix::zeros(nk, ndof);
            for (le, e) in geom.edges.iter().enumerate() {
                b[(0, layout.edge_dof(le, c, 0))] += e.length;
                for alpha in 1..nk {
                    let coef = edge_legendre_coeffs(e, k - 1, k, |x| {
                        let gr = basis.gradients(x)[alpha];
                        gr[0] * e.normal[0] + gr[1] * e.normal[1]
                    });
                    for (j, cj) in coef.iter().enumerate() {
                        b[(alpha, layout.edge_dof(le, c, j))] += e.length * cj;
                    }
                }
            }
            for alpha in 1..nk {
                for (beta, v) in basis.laplacian(alpha) {
                    b[(alpha, layout.interior_dof(c, beta))] -= area * v;
                }
            }
            let sol = g_lu.solve(&b).ok_or(Error::RankDeficiency { element: geom.index })?;
            pnabla.view_mut((c * nk, 0), (nk, ndof)).copy_from(&sol);
        }

        // divergence: ∫ div v m_γ = -∫ v·∇m_γ + ∮ (v·n) m_γ
        let m_km1 = ctx.mass_block(k as isize - 1);
        let m_km1_chol = m_km1.clone().cholesky().ok_or(Error::SingularMass { element: geom.index })?;
        let mut r = DMatrix::zeros(nkm1, ndof);
        for gamma in 0..nkm1 {
            for d in 0..2 {
                for (beta, v) in basis.partial(gamma, d) {
                    r[(gamma, layout.interior_dof(d, beta))] -= area * v;
                }
            }
        }
        for (le, e) in geom.edges.iter().enumerate() {
            for gamma in 0..nkm1 {
                let coef = edge_legendre_coeffs(e, k - 1, k - 1, |x| basis.values(x)[gamma]);
                for c in 0..2 {
                    for (j, cj) in coef.iter().enumerate() {
                        r[(gamma, layout.edge_dof(le, c, j))] += e.normal[c] * cj * e.length;
                    }
                }
            }
        }
        let div_rep = m_km1_chol.solve(&r);

        // normal traces: low modes from DOFs, top mode from the elliptic projection
        let mut normal_trace = Vec::with_capacity(geom.num_edges());
        for (le, e) in geom.edges.iter().enumerate() {
            let mut a = DMatrix::zeros(k + 1, ndof);
            for j in 0..k {
                for c in 0..2 {
                    a[(j, layout.edge_dof(le, c, j))] = (2 * j + 1) as f64 * e.normal[c];
                }
            }
            for i in 0..nk {
                let top = edge_legendre_coeffs(e, k, k, |x| basis.values(x)[i])[k];
                if top == 0.0 {
                    continue;
                }
                for c in 0..2 {
                    let w = e.normal[c] * top;
                    for col in 0..ndof {
                        a[(k, col)] += w * pnabla[(c * nk + i, col)];
                    }
                }
            }
            normal_trace.push(a);
        }

        // L² projection through the ∇P_{k+1} ⊕ x⊥P_{k-1} split
        let n2 = 2 * nk;
        let mut mu = DMatrix::zeros(n2, ndof);
        let h = geom.diameter;
        let mass_low_high = ctx.mass.view((0, 0), (nkm1, nkp1)).into_owned();
        for alpha in 1..nkp1 {
            let row = alpha - 1;
            // -∫ div v m_α
            for gamma in 0..nkm1 {
                let w = -h * mass_low_high[(gamma, alpha)];
                for col in 0..ndof {
                    mu[(row, col)] += w * div_rep[(gamma, col)];
                }
            }
            for (le, e) in geom.edges.iter().enumerate() {
                let coef = edge_legendre_coeffs(e, k, k + 1, |x| basis.values(x)[alpha]);
                let a = &normal_trace[le];
                for (j, cj) in coef.iter().enumerate() {
                    let w = h * cj * e.length / (2 * j + 1) as f64;
                    if w == 0.0 {
                        continue;
                    }
                    for col in 0..ndof {
                        mu[(row, col)] += w * a[(j, col)];
                    }
                }
            }
        }
        let vm = ctx.vector_mass(k as isize);
        let enhanced = decomp.to_monomial.transpose() * &vm * &pnabla;
        let nkm2 = dim(k as isize - 2);
        for (bi, beta) in crate::polybasis::exponents(k - 1).into_iter().enumerate() {
            let row = decomp.n_grad + bi;
            if bi < dim(k as isize - 3) {
                let (a, b) = beta;
                let i1 = index(a, b + 1);
                let i2 = index(a + 1, b);
                debug_assert!(i1 < nkm2 && i2 < nkm2);
                mu[(row, layout.interior_dof(0, i1))] -= area;
                mu[(row, layout.interior_dof(1, i2))] += area;
            } else {
                mu.row_mut(row).copy_from(&enhanced.row(row));
            }
        }
        let vm_chol = vm.cholesky().ok_or(Error::SingularMass { element: geom.index })?;
        let p0 = vm_chol.solve(&(decomp.to_split.transpose() * mu));

        // L² projection of the gradient
        let mut pgrad = DMatrix::zeros(4 * nkm1, ndof);
        for c in 0..2 {
            for d in 0..2 {
                let mut rr = DMatrix::zeros(nkm1, ndof);
                for gamma in 0..nkm1 {
                    for (beta, v) in basis.partial(gamma, d) {
                        rr[(gamma, layout.interior_dof(c, beta))] -= area * v;
                    }
                }
                for (le, e) in geom.edges.iter().enumerate() {
                    for gamma in 0..nkm1 {
                        let coef = edge_legendre_coeffs(e, k - 1, k - 1, |x| basis.values(x)[gamma]);
                        for (j, cj) in coef.iter().enumerate() {
                            rr[(gamma, layout.edge_dof(le, c, j))] += e.normal[d] * cj * e.length;
                        }
                    }
                }
                let sol = m_km1_chol.solve(&rr);
                pgrad.view_mut(((2 * c + d) * nkm1, 0), (nkm1, ndof)).copy_from(&sol);
            }
        }

        Ok(VelocityElement { layout, pnabla, div_rep, p0, pgrad, normal_trace })
    }

    /// DOF vector of an analytic field.
    pub fn interpolate(ctx: &ElementContext, f: impl Fn(Point) -> [f64; 2]) -> DVector<f64> {
        let k = ctx.k;
        let geom = &ctx.geom;
        let layout = VelocityLayout::new(k, geom.num_edges());
        let mut dofs = DVector::zeros(layout.ndof());
        for (le, e) in geom.edges.iter().enumerate() {
            for c in 0..2 {
                let coef = edge_legendre_coeffs(e, k - 1, 2 * k + 8, |x| f(x)[c]);
                for (j, cj) in coef.iter().enumerate() {
                    dofs[layout.edge_dof(le, c, j)] = cj / (2 * j + 1) as f64;
                }
            }
        }
        let nkm2 = dim(k as isize - 2);
        if nkm2 > 0 {
            let q = polygon_quadrature(geom, 2 * k + 8);
            for (&x, &w) in q.points.iter().zip(&q.weights) {
                let v = f(x);
                let m = ctx.basis.values(x);
                for c in 0..2 {
                    for beta in 0..nkm2 {
                        dofs[layout.interior_dof(c, beta)] += w * v[c] * m[beta] / geom.area;
                    }
                }
            }
        }
        dofs
    }
}

/// `∫_e m_i ds` for all monomials of degree `<= deg`.
pub(crate) fn edge_mean_integrals(ctx: &ElementContext, e: &crate::mesh::EdgeGeometry, deg: usize) -> Vec<f64> {
    let n = dim(deg as isize);
    let q = crate::polybasis::edge_quadrature(e, deg);
    let mut out = vec![0.0; n];
    for (&x, &w) in q.points.iter().zip(&q.weights) {
        let v = ctx.basis.values(x);
        for i in 0..n {
            out[i] += w * v[i];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, gen_family, ElementGeometry, MeshFamily};

    fn eval_vec(ctx: &ElementContext, coeffs: &DVector<f64>, x: Point) -> [f64; 2] {
        let n = coeffs.len() / 2;
        [ctx.basis.eval(&coeffs.as_slice()[..n], x), ctx.basis.eval(&coeffs.as_slice()[n..], x)]
    }

    fn hexagon() -> ElementGeometry {
        let m = build_mesh(
            vec![[0.0, 0.0], [0.9, -0.1], [1.4, 0.6], [1.1, 1.3], [0.3, 1.2], [-0.3, 0.5]],
            vec![(0..6).collect()],
        )
        .unwrap();
        m.geometry().elements[0].clone()
    }

    fn poly(k: usize, x: Point) -> [f64; 2] {
        let (a, b) = (x[0], x[1]);
        match k {
            1 => [1.0 + 2.0 * a - b, -0.5 + a + 3.0 * b],
            2 => [a * a - 2.0 * a * b + b, 0.3 * b * b + a * b - a],
            _ => [a * a * b - b * b * b + a, a.powi(3) - 0.5 * a * b * b + 1.0],
        }
    }

    #[test]
    fn dof_counts() {
        for k in 1..=3 {
            for ne in 3..=8 {
                let l = VelocityLayout::new(k, ne);
                assert_eq!(l.ndof(), 2 * k * ne + k * (k - 1));
            }
        }
    }

    #[test]
    fn projections_reproduce_polynomials() {
        for g in [hexagon(), gen_family(MeshFamily::PerturbedQuad, 3, 5).geometry().elements[4].clone()] {
            for k in 1..=3 {
                let ctx = ElementContext::new(&g, k);
                let dec = Pk2Decomposition::new(k).unwrap();
                let el = VelocityElement::new(&ctx, &dec).unwrap();
                let dofs = VelocityElement::interpolate(&ctx, |x| poly(k, x));
                let pn = &el.pnabla * &dofs;
                let p0 = &el.p0 * &dofs;
                for &x in &g.vertices {
                    let ex = poly(k, x);
                    let a = eval_vec(&ctx, &pn, x);
                    let b = eval_vec(&ctx, &p0, x);
                    for c in 0..2 {
                        assert!((a[c] - ex[c]).abs() < 1e-11, "pnabla k={k}");
                        assert!((b[c] - ex[c]).abs() < 1e-11, "p0 k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn divergence_and_gradient_of_polynomials() {
        let g = hexagon();
        let k = 2;
        let ctx = ElementContext::new(&g, k);
        let dec = Pk2Decomposition::new(k).unwrap();
        let el = VelocityElement::new(&ctx, &dec).unwrap();
        let dofs = VelocityElement::interpolate(&ctx, |x| poly(2, x));
        let div = &el.div_rep * &dofs;
        let grad = &el.pgrad * &dofs;
        let n = dim(1);
        let x = [0.7, 0.4];
        let (a, b) = (x[0], x[1]);
        let exact_grad = [[2.0 * a - 2.0 * b, -2.0 * a + 1.0], [b - 1.0, 0.6 * b + a]];
        let d = ctx.basis.eval(div.as_slice(), x);
        assert!((d - (exact_grad[0][0] + exact_grad[1][1])).abs() < 1e-12);
        for c in 0..2 {
            for dd in 0..2 {
                let blk = &grad.as_slice()[(2 * c + dd) * n..(2 * c + dd + 1) * n];
                assert!((ctx.basis.eval(blk, x) - exact_grad[c][dd]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn divergence_free_field_has_zero_discrete_divergence() {
        let g = hexagon();
        for k in 1..=3 {
            let ctx = ElementContext::new(&g, k);
            let dec = Pk2Decomposition::new(k).unwrap();
            let el = VelocityElement::new(&ctx, &dec).unwrap();
            // curl of a smooth stream function
            let dofs = VelocityElement::interpolate(&ctx, |x| [x[0].cos() * x[1].cos(), x[0].sin() * x[1].sin()]);
            let div = &el.div_rep * &dofs;
            assert!(div.amax() < 1e-12, "k={k}: {}", div.amax());
        }
    }

    #[test]
    fn normal_trace_low_modes_match_the_field() {
        let g = hexagon();
        let ctx = ElementContext::new(&g, 2);
        let dec = Pk2Decomposition::new(2).unwrap();
        let el = VelocityElement::new(&ctx, &dec).unwrap();
        let f = |x: Point| poly(2, x);
        let dofs = VelocityElement::interpolate(&ctx, f);
        for (le, e) in g.edges.iter().enumerate() {
            let a = &el.normal_trace[le] * &dofs;
            let exact = edge_legendre_coeffs(e, 2, 4, |x| {
                let v = f(x);
                v[0] * e.normal[0] + v[1] * e.normal[1]
            });
            for j in 0..=2 {
                assert!((a[j] - exact[j]).abs() < 1e-12);
            }
        }
    }
}
