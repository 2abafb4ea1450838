//! Convergence studies and the Hartmann benchmark.

use crate::forms::ModelParams;
use crate::mesh::{gen_rectangle, MeshFamily};
use crate::polybasis::dim;
use crate::system::{oseen_iterate, Discretization, OseenOptions, SolverState};
use crate::{Error, Point, Result};

use super::cases::{ExactSolution, HartmannCase, ManufacturedCase};
use super::errors::{compute_errors, ErrorReport};

/// Observed order between two levels: `log(e_a/e_b) / log(h_a/h_b)`.
pub fn rate(e_a: f64, e_b: f64, h_a: f64, h_b: f64) -> f64 {
    (e_a / e_b).ln() / (h_a / h_b).ln()
}

/// Error rows of a refinement sequence.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ErrorReport>,
}

/// Rates of one row against its predecessor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub u0: f64,
    pub u1: f64,
    pub b0: f64,
    pub b1: f64,
    pub p0: f64,
}

impl ConvergenceTable {
    /// Rates of row `i` against row `i - 1`; `None` for the first row.
    pub fn rates(&self, i: usize) -> Option<Rates> {
        if i == 0 || i >= self.rows.len() {
            return None;
        }
        let (a, b) = (&self.rows[i - 1], &self.rows[i]);
        let r = |x: f64, y: f64| rate(x, y, a.h, b.h);
        Some(Rates {
            u0: r(a.e_u0, b.e_u0),
            u1: r(a.e_u1, b.e_u1),
            b0: r(a.e_b0, b.e_b0),
            b1: r(a.e_b1, b.e_b1),
            p0: r(a.e_p0, b.e_p0),
        })
    }

    pub fn finest_rates(&self) -> Option<Rates> {
        self.rates(self.rows.len().checked_sub(1)?)
    }
}

/// Solves the manufactured problem on `family` meshes with `n × n` cells for
/// each `n` in `levels`.
pub fn convergence_study(
    family: MeshFamily,
    levels: &[usize],
    k: usize,
    params: ModelParams,
    seed: u64,
    opts: &OseenOptions,
) -> Result<ConvergenceTable> {
    if levels.is_empty() {
        return Err(Error::InvalidParameter("levels must be ≥ 1".into()));
    }
    let case = ManufacturedCase::new(params);
    let mut table = ConvergenceTable::default();
    for &n in levels {
        let mesh = gen_rectangle(family, case.domain(), n, n, seed);
        let disc = Discretization::new(mesh, k, params, case.bc())?;
        let state = oseen_iterate(&disc, &|x| case.f(x), &|x| case.g(x), opts)?;
        table.rows.push(compute_errors(&disc, &state, &case));
    }
    Ok(table)
}

/// One sample of the profiles along `x = 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub x2: f64,
    pub u1_numeric: f64,
    pub u1_analytic: f64,
    pub b1_numeric: f64,
    pub b1_analytic: f64,
}

#[derive(Debug, Clone)]
pub struct HartmannResult {
    pub samples: Vec<ProfileSample>,
    pub errors: ErrorReport,
    /// `max |u1_h - u1| / max |u1|` over the samples (absolute when `u1 ≡ 0`).
    pub rel_err_u: f64,
    pub rel_err_b: f64,
    pub state: SolverState,
}

impl HartmannResult {
    pub fn rel_err(&self) -> f64 {
        self.rel_err_u.max(self.rel_err_b)
    }
}

pub const PROFILE_SAMPLES: usize = 21;

/// Solves the channel problem on a `3ny × ny` quad grid and samples `u_1`,
/// `b_1` along the centre line `x = 3`.
pub fn run_hartmann(case: &HartmannCase, ny: usize, k: usize, opts: &OseenOptions) -> Result<HartmannResult> {
    let mesh = gen_rectangle(MeshFamily::Quad, case.domain(), 3 * ny, ny, 0);
    let disc = Discretization::new(mesh, k, case.params, case.bc())?;
    let state = oseen_iterate(&disc, &|x| case.f(x), &|x| case.g(x), opts)?;
    let errors = compute_errors(&disc, &state, case);
    let x1 = 0.5 * HartmannCase::LENGTH;
    let samples: Vec<ProfileSample> = (0..PROFILE_SAMPLES)
        .map(|i| {
            let x2 = -1.0 + 2.0 * i as f64 / (PROFILE_SAMPLES - 1) as f64;
            let p = [x1, x2];
            let u = sample(&disc, &state, p, false);
            let b = sample(&disc, &state, p, true);
            ProfileSample {
                x2,
                u1_numeric: u[0],
                u1_analytic: case.u_profile(x2),
                b1_numeric: b[0],
                b1_analytic: case.b_profile(x2),
            }
        })
        .collect();
    let rel = |num: fn(&ProfileSample) -> f64, ana: fn(&ProfileSample) -> f64| {
        let err = samples.iter().map(|s| (num(s) - ana(s)).abs()).fold(0.0, f64::max);
        let scale = samples.iter().map(|s| ana(s).abs()).fold(0.0, f64::max);
        if scale > 0.0 {
            err / scale
        } else {
            err
        }
    };
    let rel_err_u = rel(|s| s.u1_numeric, |s| s.u1_analytic);
    let rel_err_b = rel(|s| s.b1_numeric, |s| s.b1_analytic);
    Ok(HartmannResult { samples, errors, rel_err_u, rel_err_b, state })
}

/// `Π⁰` of the discrete field at `p`, averaged over all cells containing `p`.
pub fn sample(disc: &Discretization, state: &SolverState, p: Point, magnetic: bool) -> [f64; 2] {
    let nk = dim(disc.k as isize);
    let mut sum = [0.0; 2];
    let mut count = 0;
    for (cell, sp) in disc.spaces.iter().enumerate() {
        if !sp.ctx.geom.contains(p, 1e-10 * sp.ctx.geom.diameter) {
            continue;
        }
        let coeffs = if magnetic {
            &sp.mag.p0 * disc.local_mag(cell, &state.b)
        } else {
            &sp.vel.p0 * disc.local_vel(cell, &state.u)
        };
        let v = sp.eval_vec(coeffs.as_slice(), p);
        debug_assert_eq!(coeffs.len(), 2 * nk);
        sum[0] += v[0];
        sum[1] += v[1];
        count += 1;
    }
    if count == 0 {
        return [f64::NAN; 2];
    }
    [sum[0] / count as f64, sum[1] / count as f64]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_of_exact_powers() {
        assert!((rate(4.0, 1.0, 0.2, 0.1) - 2.0).abs() < 1e-15);
        let t = ConvergenceTable {
            rows: vec![
                ErrorReport { h: 0.5, e_u0: 1.0, e_u1: 1.0, e_b0: 1.0, e_b1: 1.0, e_p0: 1.0, ..Default::default() },
                ErrorReport { h: 0.25, e_u0: 0.25, e_u1: 0.5, e_b0: 0.25, e_b1: 0.5, e_p0: 0.5, ..Default::default() },
            ],
        };
        assert!(t.rates(0).is_none());
        let r = t.finest_rates().unwrap();
        assert!((r.u0 - 2.0).abs() < 1e-15 && (r.u1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_levels_rejected() {
        let r = convergence_study(MeshFamily::Quad, &[], 1, ModelParams::default(), 0, &OseenOptions::default());
        assert!(r.is_err());
    }

    #[test]
    fn zero_pressure_gradient_gives_zero_flow() {
        let case = HartmannCase { g: 0.0, ..HartmannCase::ha1() };
        let r = run_hartmann(&case, 2, 1, &OseenOptions::default()).unwrap();
        assert!(r.state.u.iter().all(|v| v.abs() < 1e-12));
        assert!(r.samples.iter().all(|s| s.u1_analytic == 0.0 && s.u1_numeric.abs() < 1e-12));
        // the field is the uniform (0, 1)
        assert!(r.samples.iter().all(|s| s.b1_numeric.abs() < 1e-12));
    }
}
