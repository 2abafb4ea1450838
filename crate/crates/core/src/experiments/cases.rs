//! Closed-form reference solutions.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::forms::ModelParams;
use crate::mesh::Rectangle;
use crate::system::{BcSegment, BcSpec, MagneticBc, Selector, VelocityBc};
use crate::Point;

/// `[c][d] = ∂_d w_c`.
pub type Grad = [[f64; 2]; 2];

/// Exact fields with the body forces they induce.
pub trait ExactSolution: Sync {
    fn u(&self, x: Point) -> [f64; 2];
    fn grad_u(&self, x: Point) -> Grad;
    fn p(&self, x: Point) -> f64;
    fn b(&self, x: Point) -> [f64; 2];
    fn grad_b(&self, x: Point) -> Grad;
    fn f(&self, x: Point) -> [f64; 2];
    fn g(&self, x: Point) -> [f64; 2];
}

/// Smooth solution on the unit square with `u = 0` and `b·n = 0` on the boundary:
/// `u = (sin²(πx)sin(πy)cos(πy), -sin(πx)cos(πx)sin²(πy))`, `p = cos(πx)cos(πy)`,
/// `b = (sin(πx)cos(πy), -sin(πy)cos(πx))`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ManufacturedCase {
    pub params: ModelParams,
}

struct Trig {
    sx: f64,
    cx: f64,
    sy: f64,
    cy: f64,
}

fn trig(x: Point) -> Trig {
    let (sx, cx) = (PI * x[0]).sin_cos();
    let (sy, cy) = (PI * x[1]).sin_cos();
    Trig { sx, cx, sy, cy }
}

impl ManufacturedCase {
    pub fn new(params: ModelParams) -> Self {
        ManufacturedCase { params }
    }

    pub fn bc(&self) -> BcSpec {
        BcSpec::no_slip_insulating()
    }

    pub fn domain(&self) -> Rectangle {
        Rectangle::UNIT
    }

    fn laplace_u(&self, x: Point) -> [f64; 2] {
        let t = trig(x);
        let s2y = 2.0 * t.sy * t.cy;
        let s2x = 2.0 * t.sx * t.cx;
        [PI * PI * s2y * (1.0 - 4.0 * t.sx * t.sx), -PI * PI * s2x * (1.0 - 4.0 * t.sy * t.sy)]
    }

    fn curl_b(&self, x: Point) -> f64 {
        let t = trig(x);
        2.0 * PI * t.sx * t.sy
    }

    /// `(∂_2 s, -∂_1 s)` for `s = curl b`.
    fn curl_curl_b(&self, x: Point) -> [f64; 2] {
        let t = trig(x);
        [2.0 * PI * PI * t.sx * t.cy, -2.0 * PI * PI * t.cx * t.sy]
    }
}

/// `(∂_2 w, -∂_1 w)` for `w = u × b = u_1 b_2 - u_2 b_1`, by the product rule.
fn curl_of_cross(u: [f64; 2], gu: Grad, b: [f64; 2], gb: Grad) -> [f64; 2] {
    let dw = |d: usize| gu[0][d] * b[1] + u[0] * gb[1][d] - gu[1][d] * b[0] - u[1] * gb[0][d];
    [dw(1), -dw(0)]
}

fn convection(u: [f64; 2], gu: Grad) -> [f64; 2] {
    [gu[0][0] * u[0] + gu[0][1] * u[1], gu[1][0] * u[0] + gu[1][1] * u[1]]
}

impl ExactSolution for ManufacturedCase {
    fn u(&self, x: Point) -> [f64; 2] {
        let t = trig(x);
        [t.sx * t.sx * t.sy * t.cy, -t.sx * t.cx * t.sy * t.sy]
    }

    fn grad_u(&self, x: Point) -> Grad {
        let t = trig(x);
        let s2x = 2.0 * t.sx * t.cx;
        let s2y = 2.0 * t.sy * t.cy;
        let c2x = t.cx * t.cx - t.sx * t.sx;
        let c2y = t.cy * t.cy - t.sy * t.sy;
        [[0.5 * PI * s2x * s2y, PI * t.sx * t.sx * c2y], [-PI * c2x * t.sy * t.sy, -0.5 * PI * s2x * s2y]]
    }

    fn p(&self, x: Point) -> f64 {
        let t = trig(x);
        t.cx * t.cy
    }

    fn b(&self, x: Point) -> [f64; 2] {
        let t = trig(x);
        [t.sx * t.cy, -t.sy * t.cx]
    }

    fn grad_b(&self, x: Point) -> Grad {
        let t = trig(x);
        [[PI * t.cx * t.cy, -PI * t.sx * t.sy], [PI * t.sy * t.sx, -PI * t.cy * t.cx]]
    }

    fn f(&self, x: Point) -> [f64; 2] {
        let ModelParams { r_nu, s_c, .. } = self.params;
        let t = trig(x);
        let lap = self.laplace_u(x);
        let conv = convection(self.u(x), self.grad_u(x));
        let gp = [-PI * t.sx * t.cy, -PI * t.cx * t.sy];
        let s = self.curl_b(x);
        let b = self.b(x);
        let lorentz = [-b[1] * s, b[0] * s];
        [0, 1].map(|c| -lap[c] / r_nu + conv[c] + gp[c] - s_c * lorentz[c])
    }

    fn g(&self, x: Point) -> [f64; 2] {
        let ModelParams { r_m, s_c, .. } = self.params;
        let cc = self.curl_curl_b(x);
        let ind = curl_of_cross(self.u(x), self.grad_u(x), self.b(x), self.grad_b(x));
        [0, 1].map(|c| s_c / r_m * cc[c] - s_c * ind[c])
    }
}

/// Fully developed channel flow on `[0, 6] × [-1, 1]` under a transverse field:
/// `u = (u(y), 0)`, `b = (b(y), 1)`, `p = -Gx - S_c b(y)²/2`, with
/// `u(y) = G R_ν/(Ha tanh Ha)·(1 - cosh(Ha y)/cosh Ha)` and
/// `b(y) = G/S_c·(sinh(Ha y)/sinh Ha - y)`.
#[derive(Debug, Clone, Copy)]
pub struct HartmannCase {
    pub params: ModelParams,
    pub g: f64,
}

impl HartmannCase {
    pub const LENGTH: f64 = 6.0;
    pub const DEFAULT_G: f64 = 0.1;

    pub fn new(params: ModelParams, g: f64) -> Self {
        HartmannCase { params, g }
    }

    /// `Ha = 1`: `(R_ν, R_m, S_c) = (1, 0.1, 10)`.
    pub fn ha1() -> Self {
        HartmannCase::new(ModelParams { r_nu: 1.0, r_m: 0.1, s_c: 10.0 }, Self::DEFAULT_G)
    }

    /// `Ha = 5`: `(R_ν, R_m, S_c) = (5, 1, 5)`.
    pub fn ha5() -> Self {
        HartmannCase::new(ModelParams { r_nu: 5.0, r_m: 1.0, s_c: 5.0 }, Self::DEFAULT_G)
    }

    pub fn ha(&self) -> f64 {
        self.params.hartmann_number()
    }

    pub fn domain(&self) -> Rectangle {
        Rectangle { x0: 0.0, y0: -1.0, x1: Self::LENGTH, y1: 1.0 }
    }

    pub fn u_profile(&self, y: f64) -> f64 {
        let ha = self.ha();
        self.g * self.params.r_nu / (ha * ha.tanh()) * (1.0 - (ha * y).cosh() / ha.cosh())
    }

    pub fn b_profile(&self, y: f64) -> f64 {
        let ha = self.ha();
        self.g / self.params.s_c * ((ha * y).sinh() / ha.sinh() - y)
    }

    fn du_profile(&self, y: f64) -> f64 {
        let ha = self.ha();
        -self.g * self.params.r_nu / (ha * ha.tanh()) * ha * (ha * y).sinh() / ha.cosh()
    }

    fn db_profile(&self, y: f64) -> f64 {
        let ha = self.ha();
        self.g / self.params.s_c * (ha * (ha * y).cosh() / ha.sinh() - 1.0)
    }

    /// No-slip walls at `y = ±1`, prescribed pressure at `x = 0, 6`, and
    /// `n × b = n × (0, 1)` on the whole boundary.
    pub fn bc(&self) -> BcSpec {
        let this = *self;
        let pd = Arc::new(move |x: Point| this.p(x));
        let magnetic = MagneticBc { normal_zero: false, tangential: Some(Arc::new(|_| [0.0, 1.0])) };
        let mut segments = Vec::new();
        for value in [-1.0, 1.0] {
            segments.push(BcSegment {
                selector: Selector::Line { axis: 1, value },
                velocity: VelocityBc::DirichletZero,
                magnetic: magnetic.clone(),
            });
        }
        for value in [0.0, Self::LENGTH] {
            segments.push(BcSegment {
                selector: Selector::Line { axis: 0, value },
                velocity: VelocityBc::NaturalPressure(pd.clone()),
                magnetic: magnetic.clone(),
            });
        }
        BcSpec::new(segments)
    }
}

impl ExactSolution for HartmannCase {
    fn u(&self, x: Point) -> [f64; 2] {
        [self.u_profile(x[1]), 0.0]
    }

    fn grad_u(&self, x: Point) -> Grad {
        [[0.0, self.du_profile(x[1])], [0.0, 0.0]]
    }

    fn p(&self, x: Point) -> f64 {
        let b = self.b_profile(x[1]);
        -self.g * x[0] - 0.5 * self.params.s_c * b * b
    }

    fn b(&self, x: Point) -> [f64; 2] {
        [self.b_profile(x[1]), 1.0]
    }

    fn grad_b(&self, x: Point) -> Grad {
        [[0.0, self.db_profile(x[1])], [0.0, 0.0]]
    }

    fn f(&self, _: Point) -> [f64; 2] {
        [0.0, 0.0]
    }

    fn g(&self, _: Point) -> [f64; 2] {
        [0.0, 0.0]
    }
}
