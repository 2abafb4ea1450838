//! CSV output of rate tables and profiles.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::system::{Discretization, SolverState};
use crate::Result;

use super::errors::ErrorReport;
use super::study::{ConvergenceTable, ProfileSample};

/// One CSV row of a rate table; rates are empty on the first row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub h: f64,
    pub e_u0: f64,
    pub rate_u0: Option<f64>,
    pub e_u1: f64,
    pub rate_u1: Option<f64>,
    pub e_b0: f64,
    pub rate_b0: Option<f64>,
    pub e_b1: f64,
    pub rate_b1: Option<f64>,
    pub e_p0: f64,
    pub rate_p0: Option<f64>,
    pub div_norm: f64,
}

pub const REPORT_HEADER: &str = "h,e_u0,rate_u0,e_u1,rate_u1,e_b0,rate_b0,e_b1,rate_b1,e_p0,rate_p0,div_norm";

impl ConvergenceTable {
    pub fn report_rows(&self) -> Vec<ReportRow> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, e): (usize, &ErrorReport)| {
                let r = self.rates(i);
                ReportRow {
                    h: e.h,
                    e_u0: e.e_u0,
                    rate_u0: r.map(|r| r.u0),
                    e_u1: e.e_u1,
                    rate_u1: r.map(|r| r.u1),
                    e_b0: e.e_b0,
                    rate_b0: r.map(|r| r.b0),
                    e_b1: e.e_b1,
                    rate_b1: r.map(|r| r.b1),
                    e_p0: e.e_p0,
                    rate_p0: r.map(|r| r.p0),
                    div_norm: e.div_norm,
                }
            })
            .collect()
    }
}

pub fn write_report<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(REPORT_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_report<R: Read>(input: R) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<std::result::Result<Vec<ReportRow>, _>>()?;
    Ok(rows)
}

pub fn write_profile<W: Write>(samples: &[ProfileSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x2", "u1_numeric", "u1_analytic", "b1_numeric", "b1_analytic"])?;
    for s in samples {
        w.write_record([s.x2, s.u1_numeric, s.u1_analytic, s.b1_numeric, s.b1_analytic].iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Projected discrete fields at one cell centroid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellSample {
    pub cell: usize,
    pub x: f64,
    pub y: f64,
    pub u1: f64,
    pub u2: f64,
    pub b1: f64,
    pub b2: f64,
    pub p: f64,
}

pub fn cell_samples(disc: &Discretization, state: &SolverState) -> Vec<CellSample> {
    disc.spaces
        .iter()
        .enumerate()
        .map(|(cell, sp)| {
            let x = sp.ctx.geom.centroid;
            let u = sp.eval_vec((&sp.vel.p0 * disc.local_vel(cell, &state.u)).as_slice(), x);
            let b = sp.eval_vec((&sp.mag.p0 * disc.local_mag(cell, &state.b)).as_slice(), x);
            let p = sp.ctx.basis.eval(disc.local_pres(cell, &state.p).as_slice(), x);
            CellSample { cell, x: x[0], y: x[1], u1: u[0], u2: u[1], b1: b[0], b2: b[1], p }
        })
        .collect()
}

pub fn write_cell_samples<W: Write>(samples: &[CellSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if samples.is_empty() {
        w.write_record(["cell", "x", "y", "u1", "u2", "b1", "b2", "p"])?;
    }
    for s in samples {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

/// Fixed-width text rendering of a rate table.
pub fn format_table(rows: &[ReportRow]) -> String {
    let mut s = format!(
        "{:>9} {:>11} {:>5} {:>11} {:>5} {:>11} {:>5} {:>11} {:>5} {:>11} {:>5} {:>10}\n",
        "h", "e_u0", "rate", "e_u1", "rate", "e_b0", "rate", "e_b1", "rate", "e_p0", "rate", "div"
    );
    let rate = |r: Option<f64>| r.map_or("-".to_string(), |v| format!("{v:.2}"));
    for r in rows {
        s.push_str(&format!(
            "{:>9.6} {:>11.4e} {:>5} {:>11.4e} {:>5} {:>11.4e} {:>5} {:>11.4e} {:>5} {:>11.4e} {:>5} {:>10.2e}\n",
            r.h,
            r.e_u0,
            rate(r.rate_u0),
            r.e_u1,
            rate(r.rate_u1),
            r.e_b0,
            rate(r.rate_b0),
            r.e_b1,
            rate(r.rate_b1),
            r.e_p0,
            rate(r.rate_p0),
            r.div_norm
        ));
    }
    s
}
