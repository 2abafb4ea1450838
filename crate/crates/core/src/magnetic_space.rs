//! Local enhanced nodal space of degree `k` for each magnetic component.
//!
//! Degrees of freedom, per component `c`:
//! - vertex values;
//! - on each edge: `(1/|e|) ∫_e b_c L_j ds`, `j <= k-2`, Legendre in global orientation;
//! - inside: `(1/|E|) ∫_E b_c m_β`, `|β| <= k-2`.
//!
//! Local numbering: vertex `i` owns `2i + c`; edge `le` owns
//! `2N_v + le·2(k-1) + c(k-1) + j`; interior moments follow at
//! `2N_v + 2(k-1)N_e + c·n_{k-2} + β`.

use nalgebra::{DMatrix, DVector};

use crate::mesh::EdgeGeometry;
use crate::polybasis::{dim, edge_legendre_coeffs, legendre, polygon_quadrature, ElementContext};
use crate::velocity_space::edge_mean_integrals;
use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MagneticLayout {
    pub k: usize,
    pub n_vertices: usize,
    pub n_edges: usize,
}

impl MagneticLayout {
    pub fn new(k: usize, n_vertices: usize, n_edges: usize) -> Self {
        MagneticLayout { k, n_vertices, n_edges }
    }

    pub fn per_edge(&self) -> usize {
        2 * (self.k - 1)
    }

    pub fn n_interior(&self) -> usize {
        2 * dim(self.k as isize - 2)
    }

    pub fn ndof(&self) -> usize {
        2 * self.n_vertices + self.per_edge() * self.n_edges + self.n_interior()
    }

    pub fn vertex_dof(&self, i: usize, c: usize) -> usize {
        2 * i + c
    }

    pub fn edge_dof(&self, le: usize, c: usize, j: usize) -> usize {
        2 * self.n_vertices + le * self.per_edge() + c * (self.k - 1) + j
    }

    pub fn interior_dof(&self, c: usize, beta: usize) -> usize {
        2 * self.n_vertices + self.per_edge() * self.n_edges + c * dim(self.k as isize - 2) + beta
    }
}

#[derive(Debug, Clone)]
pub struct MagneticElement {
    pub layout: MagneticLayout,
    /// Componentwise elliptic projection onto `[P_k]²`.
    pub pnabla: DMatrix<f64>,
    /// Componentwise `L²` projection onto `[P_k]²`.
    pub p0: DMatrix<f64>,
    /// `L²` projection of `∂_1 b_2 - ∂_2 b_1` onto `P_{k-1}`.
    pub curl_rep: DMatrix<f64>,
    /// `L²` projection of `div b` onto `P_{k-1}`.
    pub div_rep: DMatrix<f64>,
    /// Legendre coefficients `a_0..a_k` of each component's trace on each edge:
    /// `traces[le][c]` is `(k+1) × ndof`.
    pub traces: Vec<[DMatrix<f64>; 2]>,
}

impl MagneticElement {
    pub fn new(ctx: &ElementContext) -> Result<Self> {
        let k = ctx.k;
        let geom = &ctx.geom;
        let layout = MagneticLayout::new(k, geom.num_vertices(), geom.num_edges());
        let ndof = layout.ndof();
        let nk = dim(k as isize);
        let nkm1 = dim(k as isize - 1);
        let nkm2 = dim(k as isize - 2);
        let area = geom.area;
        let basis = &ctx.basis;

        let traces: Vec<[DMatrix<f64>; 2]> =
            (0..geom.num_edges()).map(|le| [0, 1].map(|c| trace_matrix(&layout, &geom.edges[le], le, c))).collect();

        // ∫_e b_c g ds for g with Legendre coefficients `coef`
        let boundary_row = |row: &mut DMatrix<f64>, r: usize, le: usize, c: usize, coef: &[f64], scale: f64| {
            let e = &geom.edges[le];
            let t = &traces[le][c];
            for (j, cj) in coef.iter().enumerate() {
                let w = scale * cj * e.length / (2 * j + 1) as f64;
                if w == 0.0 {
                    continue;
                }
                for col in 0..ndof {
                    row[(r, col)] += w * t[(j, col)];
                }
            }
        };

        let mut g = DMatrix::zeros(nk, nk);
        g.view_mut((1, 0), (nk - 1, nk)).copy_from(&ctx.stiffness.view((1, 0), (nk - 1, nk)));
        for e in &geom.edges {
            for (i, v) in edge_mean_integrals(ctx, e, k).into_iter().enumerate() {
                g[(0, i)] += v;
            }
        }
        let g_lu = g.lu();
        let mut pnabla = DMatrix::zeros(2 * nk, ndof);
        for c in 0..2 {
            let mut b = DMatrix::zeros(nk, ndof);
            for (le, e) in geom.edges.iter().enumerate() {
                boundary_row(&mut b, 0, le, c, &[1.0], 1.0);
                for alpha in 1..nk {
                    let coef = edge_legendre_coeffs(e, k - 1, k, |x| {
                        let gr = basis.gradients(x)[alpha];
                        gr[0] * e.normal[0] + gr[1] * e.normal[1]
                    });
                    boundary_row(&mut b, alpha, le, c, &coef, 1.0);
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

        // L² projection: low moments from DOFs, degrees k-1 and k from the elliptic projection
        let mk = ctx.mass_block(k as isize);
        let mk_chol = mk.clone().cholesky().ok_or(Error::SingularMass { element: geom.index })?;
        let mut p0 = DMatrix::zeros(2 * nk, ndof);
        for c in 0..2 {
            let pn = pnabla.view((c * nk, 0), (nk, ndof));
            let mut mu = &mk * pn;
            for beta in 0..nkm2 {
                mu.row_mut(beta).fill(0.0);
                mu[(beta, layout.interior_dof(c, beta))] = area;
            }
            p0.view_mut((c * nk, 0), (nk, ndof)).copy_from(&mk_chol.solve(&mu));
        }

        // curl and divergence in P_{k-1}
        let mkm1_chol = ctx.mass_block(k as isize - 1).cholesky().ok_or(Error::SingularMass { element: geom.index })?;
        let mut rc = DMatrix::zeros(nkm1, ndof);
        let mut rd = DMatrix::zeros(nkm1, ndof);
        for gamma in 0..nkm1 {
            // ∫ b_1 ∂_2 m - b_2 ∂_1 m  and  -∫ b_1 ∂_1 m + b_2 ∂_2 m
            for (beta, v) in basis.partial(gamma, 1) {
                rc[(gamma, layout.interior_dof(0, beta))] += area * v;
                rd[(gamma, layout.interior_dof(1, beta))] -= area * v;
            }
            for (beta, v) in basis.partial(gamma, 0) {
                rc[(gamma, layout.interior_dof(1, beta))] -= area * v;
                rd[(gamma, layout.interior_dof(0, beta))] -= area * v;
            }
        }
        for (le, e) in geom.edges.iter().enumerate() {
            let tangent = [-e.normal[1], e.normal[0]];
            for gamma in 0..nkm1 {
                let coef = edge_legendre_coeffs(e, k - 1, k - 1, |x| basis.values(x)[gamma]);
                for c in 0..2 {
                    boundary_row(&mut rc, gamma, le, c, &coef, tangent[c]);
                    boundary_row(&mut rd, gamma, le, c, &coef, e.normal[c]);
                }
            }
        }
        let curl_rep = mkm1_chol.solve(&rc);
        let div_rep = mkm1_chol.solve(&rd);

        Ok(MagneticElement { layout, pnabla, p0, curl_rep, div_rep, traces })
    }

    pub fn interpolate(ctx: &ElementContext, f: impl Fn(Point) -> [f64; 2]) -> DVector<f64> {
        let k = ctx.k;
        let geom = &ctx.geom;
        let layout = MagneticLayout::new(k, geom.num_vertices(), geom.num_edges());
        let mut dofs = DVector::zeros(layout.ndof());
        for (i, &v) in geom.vertices.iter().enumerate() {
            let val = f(v);
            for c in 0..2 {
                dofs[layout.vertex_dof(i, c)] = val[c];
            }
        }
        if k >= 2 {
            for (le, e) in geom.edges.iter().enumerate() {
                for c in 0..2 {
                    let coef = edge_legendre_coeffs(e, k - 2, 2 * k + 8, |x| f(x)[c]);
                    for (j, cj) in coef.iter().enumerate() {
                        dofs[layout.edge_dof(le, c, j)] = cj / (2 * j + 1) as f64;
                    }
                }
            }
            let nkm2 = dim(k as isize - 2);
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

/// Legendre coefficients of the degree-`k` trace of component `c` on edge `le`.
///
/// Moments fix `a_j = (2j+1)·dof_j` for `j <= k-2`; the endpoint values
/// `Σ a_i L_i(±1)` fix the two top coefficients.
fn trace_matrix(layout: &MagneticLayout, e: &EdgeGeometry, le: usize, c: usize) -> DMatrix<f64> {
    let k = layout.k;
    let ndof = layout.ndof();
    let mut a = DMatrix::zeros(k + 1, ndof);
    for j in 0..k.saturating_sub(1) {
        a[(j, layout.edge_dof(le, c, j))] = (2 * j + 1) as f64;
    }
    let lp = legendre(k, 1.0);
    let lm = legendre(k, -1.0);
    // residuals R± = value± - Σ_{j<=k-2} a_j L_j(±1), as rows over the DOFs
    let mut rp = DVector::zeros(ndof);
    let mut rm = DVector::zeros(ndof);
    rp[layout.vertex_dof(e.end_local, c)] = 1.0;
    rm[layout.vertex_dof(e.start_local, c)] = 1.0;
    for j in 0..k.saturating_sub(1) {
        let col = layout.edge_dof(le, c, j);
        rp[col] -= (2 * j + 1) as f64 * lp[j];
        rm[col] -= (2 * j + 1) as f64 * lm[j];
    }
    // a_{k-1} + a_k = R+,  (-1)^{k-1} (a_{k-1} - a_k) = R-
    let s = lm[k - 1];
    for col in 0..ndof {
        a[(k - 1, col)] = 0.5 * (rp[col] + s * rm[col]);
        a[(k, col)] = 0.5 * (rp[col] - s * rm[col]);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, gen_family, ElementGeometry, MeshFamily};

    fn pentagon() -> ElementGeometry {
        let m =
            build_mesh(vec![[0.1, 0.0], [1.3, 0.2], [1.6, 1.1], [0.7, 1.8], [-0.2, 0.9]], vec![vec![0, 1, 2, 3, 4]])
                .unwrap();
        m.geometry().elements[0].clone()
    }

    fn poly(x: Point) -> [f64; 2] {
        let (a, b) = (x[0], x[1]);
        [1.0 - a + 2.0 * b + 0.5 * a * b, 0.3 + a * a - b * b]
    }

    #[test]
    fn dof_counts() {
        let l = MagneticLayout::new(1, 4, 4);
        assert_eq!(l.ndof(), 8);
        let l = MagneticLayout::new(2, 5, 5);
        assert_eq!(l.ndof(), 10 + 10 + 2);
    }

    #[test]
    fn trace_of_a_polynomial() {
        let g = pentagon();
        for k in 2..=3 {
            let ctx = ElementContext::new(&g, k);
            let el = MagneticElement::new(&ctx).unwrap();
            let dofs = MagneticElement::interpolate(&ctx, poly);
            for (le, e) in g.edges.iter().enumerate() {
                for c in 0..2 {
                    let a = &el.traces[le][c] * &dofs;
                    let exact = edge_legendre_coeffs(e, k, 2 * k, |x| poly(x)[c]);
                    for j in 0..=k {
                        assert!((a[j] - exact[j]).abs() < 1e-12, "k={k} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn projections_reproduce_polynomials() {
        let quad = gen_family(MeshFamily::PerturbedQuad, 3, 1).geometry().elements[4].clone();
        for g in [pentagon(), quad] {
            for k in 2..=3 {
                let ctx = ElementContext::new(&g, k);
                let el = MagneticElement::new(&ctx).unwrap();
                let dofs = MagneticElement::interpolate(&ctx, poly);
                let nk = dim(k as isize);
                for proj in [&el.pnabla, &el.p0] {
                    let p = proj * &dofs;
                    for &x in &g.vertices {
                        let ex = poly(x);
                        for c in 0..2 {
                            let v = ctx.basis.eval(&p.as_slice()[c * nk..(c + 1) * nk], x);
                            assert!((v - ex[c]).abs() < 1e-11);
                        }
                    }
                }
                let x = g.centroid;
                let (a, b) = (x[0], x[1]);
                let curl = ctx.basis.eval((&el.curl_rep * &dofs).as_slice(), x);
                let div = ctx.basis.eval((&el.div_rep * &dofs).as_slice(), x);
                assert!((curl - (2.0 * a - (2.0 + 0.5 * a))).abs() < 1e-11);
                assert!((div - (-1.0 + 0.5 * b - 2.0 * b)).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn linear_fields_for_k1() {
        let g = pentagon();
        let ctx = ElementContext::new(&g, 1);
        let el = MagneticElement::new(&ctx).unwrap();
        let f = |x: Point| [2.0 - x[0] + 3.0 * x[1], x[0] + 0.5 * x[1]];
        let dofs = MagneticElement::interpolate(&ctx, f);
        let p = &el.p0 * &dofs;
        let v = ctx.basis.eval(&p.as_slice()[..3], [0.4, 0.5]);
        assert!((v - f([0.4, 0.5])[0]).abs() < 1e-12);
        let curl = (&el.curl_rep * &dofs)[0];
        assert!((curl - (1.0 - 3.0)).abs() < 1e-12);
    }
}
