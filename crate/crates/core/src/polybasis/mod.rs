//! Scaled monomials on elements, Legendre polynomials on edges, the
//! vector-polynomial split `[P_k]² = ∇P_{k+1} ⊕ x⊥P_{k-1}` and L² projection
//! of analytic data.
//!
//! Monomials are `m_α(x) = ((x - x_b)/h_E)^α`, ordered by total degree and
//! then by the power of the second coordinate, so `P_{j}` is always a leading
//! block of `P_{k}` for `j <= k`. Vector polynomials store the first-component
//! coefficients followed by the second-component coefficients.

pub mod quadrature;

use nalgebra::{DMatrix, DVector};

use crate::mesh::{EdgeGeometry, ElementGeometry};
use crate::{Error, Point, Result};

pub use quadrature::{edge_quadrature, gauss_legendre, polygon_quadrature, QuadRule};

/// `dim P_k = (k+1)(k+2)/2`, zero for negative `k`.
pub const fn dim(k: isize) -> usize {
    if k < 0 {
        0
    } else {
        let k = k as usize;
        (k + 1) * (k + 2) / 2
    }
}

/// Position of `x^a y^b` in the monomial ordering.
pub const fn index(a: usize, b: usize) -> usize {
    let d = a + b;
    d * (d + 1) / 2 + b
}

/// Exponents `(a, b)` of all monomials of degree `<= k`, in basis order.
pub fn exponents(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(dim(k as isize));
    for d in 0..=k {
        for b in 0..=d {
            out.push((d - b, b));
        }
    }
    out
}

/// Sparse coefficient list `(monomial index, coefficient)`.
pub type SparsePoly = Vec<(usize, f64)>;

/// Scaled monomial basis of degree `degree` on one element.
#[derive(Debug, Clone)]
pub struct MonomialBasis {
    pub center: Point,
    pub h: f64,
    pub degree: usize,
    exps: Vec<(usize, usize)>,
}

impl MonomialBasis {
    pub fn new(geom: &ElementGeometry, degree: usize) -> Self {
        Self::with_scaling(geom.centroid, geom.diameter, degree)
    }

    pub fn with_scaling(center: Point, h: f64, degree: usize) -> Self {
        MonomialBasis { center, h, degree, exps: exponents(degree) }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[(usize, usize)] {
        &self.exps
    }

    pub fn scaled(&self, x: Point) -> Point {
        [(x[0] - self.center[0]) / self.h, (x[1] - self.center[1]) / self.h]
    }

    fn powers(&self, x: Point) -> (Vec<f64>, Vec<f64>) {
        let s = self.scaled(x);
        let mut px = vec![1.0; self.degree + 1];
        let mut py = vec![1.0; self.degree + 1];
        for i in 1..=self.degree {
            px[i] = px[i - 1] * s[0];
            py[i] = py[i - 1] * s[1];
        }
        (px, py)
    }

    pub fn values(&self, x: Point) -> Vec<f64> {
        let (px, py) = self.powers(x);
        self.exps.iter().map(|&(a, b)| px[a] * py[b]).collect()
    }

    /// Physical gradients of all basis members.
    pub fn gradients(&self, x: Point) -> Vec<Point> {
        let (px, py) = self.powers(x);
        let ih = 1.0 / self.h;
        self.exps
            .iter()
            .map(|&(a, b)| {
                let gx = if a > 0 { a as f64 * px[a - 1] * py[b] * ih } else { 0.0 };
                let gy = if b > 0 { b as f64 * px[a] * py[b - 1] * ih } else { 0.0 };
                [gx, gy]
            })
            .collect()
    }

    pub fn laplacians(&self, x: Point) -> Vec<f64> {
        let (px, py) = self.powers(x);
        let ih2 = 1.0 / (self.h * self.h);
        self.exps
            .iter()
            .map(|&(a, b)| {
                let mut v = 0.0;
                if a > 1 {
                    v += (a * (a - 1)) as f64 * px[a - 2] * py[b];
                }
                if b > 1 {
                    v += (b * (b - 1)) as f64 * px[a] * py[b - 2];
                }
                v * ih2
            })
            .collect()
    }

    /// Evaluates `Σ c_i m_i` using the leading `coeffs.len()` members.
    pub fn eval(&self, coeffs: &[f64], x: Point) -> f64 {
        let v = self.values(x);
        coeffs.iter().zip(&v).map(|(c, m)| c * m).sum()
    }

    pub fn eval_grad(&self, coeffs: &[f64], x: Point) -> Point {
        let g = self.gradients(x);
        let mut out = [0.0; 2];
        for (c, gi) in coeffs.iter().zip(&g) {
            out[0] += c * gi[0];
            out[1] += c * gi[1];
        }
        out
    }

    /// `∂m_i/∂x_dir` as a polynomial of degree one lower.
    pub fn partial(&self, i: usize, dir: usize) -> SparsePoly {
        let (a, b) = self.exps[i];
        let ih = 1.0 / self.h;
        match dir {
            0 if a > 0 => vec![(index(a - 1, b), a as f64 * ih)],
            1 if b > 0 => vec![(index(a, b - 1), b as f64 * ih)],
            _ => Vec::new(),
        }
    }

    pub fn laplacian(&self, i: usize) -> SparsePoly {
        let (a, b) = self.exps[i];
        let ih2 = 1.0 / (self.h * self.h);
        let mut out = Vec::new();
        if a > 1 {
            out.push((index(a - 2, b), (a * (a - 1)) as f64 * ih2));
        }
        if b > 1 {
            out.push((index(a, b - 2), (b * (b - 1)) as f64 * ih2));
        }
        out
    }
}

/// `x_E⊥ m_β = (-η m_β, ξ m_β)` in scaled coordinates, as two sparse polynomials.
pub fn xperp(beta: (usize, usize)) -> [SparsePoly; 2] {
    let (a, b) = beta;
    [vec![(index(a, b + 1), -1.0)], vec![(index(a + 1, b), 1.0)]]
}

/// Legendre polynomials `L_0 .. L_n` at `t`.
pub fn legendre(n: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(t);
    }
    for j in 2..=n {
        let v = ((2 * j - 1) as f64 * t * out[j - 1] - (j - 1) as f64 * out[j - 2]) / j as f64;
        out.push(v);
    }
    out
}

/// Legendre coefficients `ĝ_0 .. ĝ_nmax` of `f` restricted to an edge, using
/// the global-orientation parameter `t ∈ [-1, 1]`. `degree` bounds the
/// polynomial degree of `f` along the edge so the moments are exact.
pub fn edge_legendre_coeffs(edge: &EdgeGeometry, nmax: usize, degree: usize, f: impl Fn(Point) -> f64) -> Vec<f64> {
    let (ts, ws) = gauss_legendre(quadrature::gauss_points_for(degree + nmax));
    let mut out = vec![0.0; nmax + 1];
    for (&t, &w) in ts.iter().zip(ws) {
        let val = f(edge.point(t));
        let l = legendre(nmax, t);
        for j in 0..=nmax {
            out[j] += w * val * l[j];
        }
    }
    for (j, c) in out.iter_mut().enumerate() {
        *c *= (2 * j + 1) as f64 / 2.0;
    }
    out
}

/// Polynomial data shared by the local spaces on one element.
#[derive(Debug, Clone)]
pub struct ElementContext {
    pub geom: ElementGeometry,
    pub k: usize,
    /// Scaled monomials up to degree `k + 1`.
    pub basis: MonomialBasis,
    /// Element quadrature exact to degree `2k + 2`.
    pub quad: QuadRule,
    /// Scalar mass matrix of `P_{k+1}`; leading blocks give lower degrees.
    pub mass: DMatrix<f64>,
    /// Scalar stiffness `∫ ∇m_i · ∇m_j` on `P_k`.
    pub stiffness: DMatrix<f64>,
}

impl ElementContext {
    pub fn new(geom: &ElementGeometry, k: usize) -> Self {
        let basis = MonomialBasis::new(geom, k + 1);
        let quad = polygon_quadrature(geom, 2 * k + 2);
        let n1 = basis.len();
        let nk = dim(k as isize);
        let mut mass = DMatrix::zeros(n1, n1);
        let mut stiffness = DMatrix::zeros(nk, nk);
        for (&x, &w) in quad.points.iter().zip(&quad.weights) {
            let v = basis.values(x);
            let g = basis.gradients(x);
            for i in 0..n1 {
                for j in 0..=i {
                    mass[(i, j)] += w * v[i] * v[j];
                }
            }
            for i in 0..nk {
                for j in 0..=i {
                    stiffness[(i, j)] += w * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                }
            }
        }
        symmetrize_lower(&mut mass);
        symmetrize_lower(&mut stiffness);
        ElementContext { geom: geom.clone(), k, basis, quad, mass, stiffness }
    }

    /// Scalar mass matrix of `P_deg` (`deg <= k + 1`); empty for negative degree.
    pub fn mass_block(&self, deg: isize) -> DMatrix<f64> {
        let n = dim(deg);
        self.mass.view((0, 0), (n, n)).into_owned()
    }

    /// Block-diagonal mass matrix of `[P_deg]²`.
    pub fn vector_mass(&self, deg: isize) -> DMatrix<f64> {
        block_diag2(&self.mass_block(deg))
    }

    pub fn vector_stiffness(&self) -> DMatrix<f64> {
        block_diag2(&self.stiffness)
    }

    /// Scalar `L²` projection of analytic data onto `P_deg`.
    pub fn l2_project(&self, deg: usize, f: impl Fn(Point) -> f64) -> Result<DVector<f64>> {
        let n = dim(deg as isize);
        let mut rhs = DVector::zeros(n);
        for (&x, &w) in self.quad.points.iter().zip(&self.quad.weights) {
            let fx = f(x);
            let v = self.basis.values(x);
            for i in 0..n {
                rhs[i] += w * fx * v[i];
            }
        }
        let chol = self.mass_block(deg as isize).cholesky().ok_or(Error::SingularMass { element: self.geom.index })?;
        Ok(chol.solve(&rhs))
    }
}

fn symmetrize_lower(m: &mut DMatrix<f64>) {
    for i in 0..m.nrows() {
        for j in 0..i {
            m[(j, i)] = m[(i, j)];
        }
    }
}

/// `diag(a, a)`.
pub fn block_diag2(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (r, c) = a.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    out.view_mut((0, 0), (r, c)).copy_from(a);
    out.view_mut((r, c), (r, c)).copy_from(a);
    out
}

/// L² projection of analytic scalar data onto `P_k(E)` in scaled monomials.
pub fn l2_project_analytic(geom: &ElementGeometry, k: usize, f: impl Fn(Point) -> f64) -> Result<DVector<f64>> {
    ElementContext::new(geom, k).l2_project(k, f)
}

/// Scaled-monomial basis for the split `[P_k]² = ∇P_{k+1} ⊕ x⊥P_{k-1}`.
///
/// Column `j` of `to_monomial` holds the vector-monomial coefficients of the
/// `j`-th split function: first `h_E ∇m_α` for `1 <= |α| <= k+1`, then
/// `x_E⊥ m_β` for `|β| <= k-1`. In scaled coordinates the matrix does not
/// depend on the element.
#[derive(Debug, Clone)]
pub struct Pk2Decomposition {
    pub k: usize,
    pub to_monomial: DMatrix<f64>,
    pub to_split: DMatrix<f64>,
    pub n_grad: usize,
    pub condition: f64,
}

impl Pk2Decomposition {
    pub fn new(k: usize) -> Result<Self> {
        assert!(k >= 1, "decomposition requires k >= 1");
        let nk = dim(k as isize);
        let n = 2 * nk;
        let n_grad = dim(k as isize + 1) - 1;
        let mut c = DMatrix::zeros(n, n);
        let mut col = 0;
        for (a, b) in exponents(k + 1).into_iter().skip(1) {
            if a > 0 {
                c[(index(a - 1, b), col)] = a as f64;
            }
            if b > 0 {
                c[(nk + index(a, b - 1), col)] = b as f64;
            }
            col += 1;
        }
        for beta in exponents(k - 1) {
            let [p, q] = xperp(beta);
            for (i, v) in p {
                c[(i, col)] += v;
            }
            for (i, v) in q {
                c[(nk + i, col)] += v;
            }
            col += 1;
        }
        debug_assert_eq!(col, n);
        let sv = c.clone().singular_values();
        let smin = sv.min();
        let condition = if smin > 0.0 { sv.max() / smin } else { f64::INFINITY };
        if !(condition <= 1e12) {
            return Err(Error::SingularDecomposition { condition });
        }
        let to_split = c.clone().try_inverse().ok_or(Error::SingularDecomposition { condition })?;
        Ok(Pk2Decomposition { k, to_monomial: c, to_split, n_grad, condition })
    }

    pub fn n_perp(&self) -> usize {
        self.to_monomial.ncols() - self.n_grad
    }
}

/// `[P_k]²` split for element `E`; see [`Pk2Decomposition`].
pub fn decompose_pk2(_geom: &ElementGeometry, k: usize) -> Result<Pk2Decomposition> {
    Pk2Decomposition::new(k)
}
