//! Gauss rules on segments, collapsed-Gauss rules on triangles and fan rules on polygons.

use std::sync::OnceLock;

use crate::mesh::{EdgeGeometry, ElementGeometry};
use crate::Point;

/// Quadrature points and weights with a declared polynomial exactness.
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }
}

const MAX_CACHED: usize = 32;

/// Gauss–Legendre nodes and weights on `[-1, 1]` with `n` points (exact to degree `2n - 1`).
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: [OnceLock<(Vec<f64>, Vec<f64>)>; MAX_CACHED + 1] = [const { OnceLock::new() }; MAX_CACHED + 1];
    assert!((1..=MAX_CACHED).contains(&n), "Gauss rule with {n} points not supported");
    CACHE[n].get_or_init(|| compute_gauss_legendre(n))
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Number of Gauss points needed for exactness `degree`.
pub fn gauss_points_for(degree: usize) -> usize {
    degree / 2 + 1
}

/// Gauss rule on an edge, exact to `degree`; weights are in arclength units.
pub fn edge_quadrature(edge: &EdgeGeometry, degree: usize) -> QuadRule {
    let (t, w) = gauss_legendre(gauss_points_for(degree));
    let half = 0.5 * edge.length;
    QuadRule {
        points: t.iter().map(|&t| edge.point(t)).collect(),
        weights: w.iter().map(|&w| w * half).collect(),
        degree,
    }
}

/// Collapsed (Duffy) product rule on the triangle `abc`, exact to `degree`.
pub fn triangle_quadrature(a: Point, b: Point, c: Point, degree: usize) -> QuadRule {
    let na = gauss_points_for(degree);
    let nb = gauss_points_for(degree + 1);
    let (ta, wa) = gauss_legendre(na);
    let (tb, wb) = gauss_legendre(nb);
    let twice_area = ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs();
    let mut points = Vec::with_capacity(na * nb);
    let mut weights = Vec::with_capacity(na * nb);
    for (&s, &ws) in tb.iter().zip(wb) {
        let v = 0.5 * (s + 1.0);
        for (&r, &wr) in ta.iter().zip(wa) {
            let u = 0.5 * (r + 1.0);
            let xi = u * (1.0 - v);
            let eta = v;
            points.push([
                a[0] + xi * (b[0] - a[0]) + eta * (c[0] - a[0]),
                a[1] + xi * (b[1] - a[1]) + eta * (c[1] - a[1]),
            ]);
            weights.push(0.25 * wr * ws * (1.0 - v) * twice_area);
        }
    }
    QuadRule { points, weights, degree }
}

/// Fan triangulation from the centroid with a triangle rule on each piece.
pub fn polygon_quadrature(geom: &ElementGeometry, degree: usize) -> QuadRule {
    let n = geom.num_vertices();
    let mut rule = QuadRule { points: Vec::new(), weights: Vec::new(), degree };
    for i in 0..n {
        let t = triangle_quadrature(geom.centroid, geom.vertices[i], geom.vertices[(i + 1) % n], degree);
        rule.points.extend(t.points);
        rule.weights.extend(t.weights);
    }
    rule
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, gen_family, MeshFamily};

    #[test]
    fn gauss_exactness() {
        for n in 1..=12 {
            let (t, w) = gauss_legendre(n);
            for p in 0..(2 * n) {
                let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
                let q: f64 = t.iter().zip(w).map(|(&t, &w)| w * t.powi(p as i32)).sum();
                assert!((q - exact).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn unit_square_integrals() {
        let m = gen_family(MeshFamily::Quad, 1, 0);
        let g = &m.geometry().elements[0];
        let q = polygon_quadrature(g, 4);
        assert!((q.integrate(|_| 1.0) - 1.0).abs() < 1e-15);
        assert!((q.integrate(|p| p[0] * p[0] * p[1] * p[1]) - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn edge_rule() {
        let m = gen_family(MeshFamily::Quad, 1, 0);
        let g = &m.geometry().elements[0];
        let e = &g.edges[0]; // (0,0) -> (1,0)
        let q = edge_quadrature(e, 3);
        assert!((q.integrate(|_| 1.0) - e.length).abs() < 1e-15);
        assert!((q.integrate(|p| p[0].powi(3)) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pentagon_weights_sum_to_area() {
        let m =
            build_mesh(vec![[0.0, 0.0], [2.0, 0.1], [2.5, 1.4], [1.0, 2.2], [-0.3, 1.1]], vec![vec![0, 1, 2, 3, 4]])
                .unwrap();
        let g = &m.geometry().elements[0];
        for d in 0..10 {
            let q = polygon_quadrature(g, d);
            assert!((q.weights.iter().sum::<f64>() - g.area).abs() < 1e-13 * g.area);
        }
    }
}
