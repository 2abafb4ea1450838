use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::forms::{local_c2, local_c3, local_load, ElementSpaces, ModelParams};
use crate::mesh::{GeomCache, PolyMesh};
use crate::polybasis::{edge_legendre_coeffs, Pk2Decomposition};
use crate::{Point, Result};

use super::dofmap::{build_dofmap, DofExpansion, DofMap};
use super::oseen::SolverState;
use super::{BcSpec, VelocityBc};

/// Mesh, spaces, numbering and the state-independent element blocks.
pub struct Discretization {
    pub mesh: PolyMesh,
    pub geom: GeomCache,
    pub k: usize,
    pub params: ModelParams,
    pub bc: BcSpec,
    pub dofmap: DofMap,
    pub spaces: Vec<ElementSpaces>,
    pub a0: Vec<DMatrix<f64>>,
    pub a1: Vec<DMatrix<f64>>,
    pub d: Vec<DMatrix<f64>>,
}

impl Discretization {
    pub fn new(mesh: PolyMesh, k: usize, params: ModelParams, bc: BcSpec) -> Result<Self> {
        let dofmap = build_dofmap(&mesh, k, &bc)?;
        let decomp = Pk2Decomposition::new(k)?;
        let geom = mesh.geometry();
        let built: Vec<Result<(ElementSpaces, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)>> = geom
            .elements
            .par_iter()
            .map(|g| {
                let sp = ElementSpaces::new(g, k, &decomp)?;
                let (a0, a1, d) = crate::forms::linear_blocks(&sp, &params);
                Ok((sp, a0, a1, d))
            })
            .collect();
        let mut spaces = Vec::with_capacity(built.len());
        let (mut a0, mut a1, mut d) = (Vec::new(), Vec::new(), Vec::new());
        for r in built {
            let (sp, x0, x1, xd) = r?;
            spaces.push(sp);
            a0.push(x0);
            a1.push(x1);
            d.push(xd);
        }
        Ok(Discretization { mesh, geom, k, params, bc, dofmap, spaces, a0, a1, d })
    }

    pub fn num_cells(&self) -> usize {
        self.spaces.len()
    }

    pub fn local_vel(&self, cell: usize, raw: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.dofmap.vel_cells[cell].len(), self.dofmap.vel_cells[cell].iter().map(|&i| raw[i]))
    }

    pub fn local_mag(&self, cell: usize, raw: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.dofmap.mag_cells[cell].len(), self.dofmap.mag_cells[cell].iter().map(|&i| raw[i]))
    }

    pub fn local_pres(&self, cell: usize, raw: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(&raw[self.dofmap.pres_cell(cell)])
    }

    /// Raw load vectors `(velocity, magnetic)` from body forces and natural
    /// pressure data.
    pub fn loads(
        &self,
        f: &(dyn Fn(Point) -> [f64; 2] + Sync),
        g: &(dyn Fn(Point) -> [f64; 2] + Sync),
    ) -> (Vec<f64>, Vec<f64>) {
        let local: Vec<(DVector<f64>, DVector<f64>)> =
            self.spaces.par_iter().map(|sp| (local_load(sp, f, false), local_load(sp, g, true))).collect();
        let mut lu = vec![0.0; self.dofmap.vel.len()];
        let mut lb = vec![0.0; self.dofmap.mag.len()];
        for (cell, (fu, gb)) in local.iter().enumerate() {
            for (i, &r) in self.dofmap.vel_cells[cell].iter().enumerate() {
                lu[r] += fu[i];
            }
            for (i, &r) in self.dofmap.mag_cells[cell].iter().enumerate() {
                lb[r] += gb[i];
            }
        }
        // -∮ p_d n·v, with p_d replaced by its P_{k-1}(e) projection
        let k = self.k;
        for (ei, seg) in self.dofmap.edge_segment.iter().enumerate() {
            let Some(s) = seg else { continue };
            let VelocityBc::NaturalPressure(pd) = &self.bc.segments[*s].velocity else { continue };
            let cell = self.mesh.edges()[ei].cells[0].expect("boundary edge has a cell");
            let eg = self.geom.elements[cell].edges.iter().find(|e| e.global == ei).expect("edge in its cell");
            let coef = edge_legendre_coeffs(eg, k - 1, 2 * k + 8, |x| pd(x));
            for c in 0..2 {
                for j in 0..k {
                    lu[ei * 2 * k + c * k + j] -= eg.normal[c] * coef[j] * eg.length;
                }
            }
        }
        (lu, lb)
    }
}

/// Assembled system in compressed triplet form.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub n: usize,
    /// `(row, col, value)`, sorted by column then row, without duplicates or zeros.
    pub triplets: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
    /// Start of the `u`, `b`, `p`, multiplier blocks and the total size.
    pub offsets: [usize; 5],
}

impl SparseSystem {
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for &(i, j, v) in &self.triplets {
            y[i] += v * x[j];
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for &(i, j, v) in &self.triplets {
            m[(i, j)] += v;
        }
        m
    }
}

/// Sorts by `(col, row)`, sums duplicates and drops exact zeros.
pub(crate) fn compress(mut t: Vec<(usize, usize, f64)>) -> Vec<(usize, usize, f64)> {
    t.sort_by_key(|a| (a.1, a.0));
    let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(t.len());
    for (i, j, v) in t {
        match out.last_mut() {
            Some(last) if last.0 == i && last.1 == j => last.2 += v,
            _ => out.push((i, j, v)),
        }
    }
    out.retain(|e| e.2 != 0.0);
    out
}

struct Scatter<'a> {
    triplets: Vec<(usize, usize, f64)>,
    rhs: &'a mut [f64],
}

impl Scatter<'_> {
    /// Adds `local` with rows/cols given by expansions shifted by the block offsets.
    fn add(
        &mut self,
        local: &DMatrix<f64>,
        rows: &[&DofExpansion],
        row_off: usize,
        cols: &[&DofExpansion],
        col_off: usize,
    ) {
        for (i, re) in rows.iter().enumerate() {
            if re.terms.is_empty() {
                continue;
            }
            for (j, ce) in cols.iter().enumerate() {
                let a = local[(i, j)];
                if a == 0.0 {
                    continue;
                }
                for &(ui, ci) in &re.terms {
                    for &(uj, cj) in &ce.terms {
                        self.triplets.push((row_off + ui, col_off + uj, ci * cj * a));
                    }
                    if ce.constant != 0.0 {
                        self.rhs[row_off + ui] -= ci * a * ce.constant;
                    }
                }
            }
        }
    }

    fn add_load(&mut self, raw_load: &[f64], exps: &[DofExpansion], off: usize) {
        for (r, e) in exps.iter().enumerate() {
            for &(u, c) in &e.terms {
                self.rhs[off + u] += c * raw_load[r];
            }
        }
    }
}

/// Oseen-linearized system with the convection and coupling blocks frozen at `prev`.
pub fn assemble_oseen(disc: &Discretization, prev: &SolverState, loads: &(Vec<f64>, Vec<f64>)) -> Result<SparseSystem> {
    let dm = &disc.dofmap;
    let n = dm.n_unknowns();
    let (ou, ob, op) = (dm.u_offset(), dm.b_offset(), dm.p_offset());
    let params = disc.params;
    let nonlinear: Vec<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> = (0..disc.num_cells())
        .into_par_iter()
        .map(|cell| {
            let sp = &disc.spaces[cell];
            let w = disc.local_vel(cell, &prev.u);
            let bw = disc.local_mag(cell, &prev.b);
            let c2 = local_c2(sp, &w);
            let (c3a, c3b) = local_c3(sp, &bw, &params);
            (c2, c3a, c3b)
        })
        .collect();

    let mut rhs = vec![0.0; n];
    let mut sc = Scatter { triplets: Vec::new(), rhs: &mut rhs };
    let np = dm.n_pres_local();
    let pres_exp: Vec<DofExpansion> =
        (0..dm.n_pres).map(|i| DofExpansion { terms: vec![(i, 1.0)], constant: 0.0 }).collect();
    for (cell, (c2, c3a, c3b)) in nonlinear.iter().enumerate() {
        let ve: Vec<&DofExpansion> = dm.vel_cells[cell].iter().map(|&r| &dm.vel[r]).collect();
        let be: Vec<&DofExpansion> = dm.mag_cells[cell].iter().map(|&r| &dm.mag[r]).collect();
        let pe: Vec<&DofExpansion> = pres_exp[dm.pres_cell(cell)].iter().collect();
        debug_assert_eq!(pe.len(), np);
        sc.add(&(&disc.a0[cell] + c2), &ve, ou, &ve, ou);
        sc.add(c3a, &ve, ou, &be, ob);
        sc.add(c3b, &be, ob, &ve, ou);
        sc.add(&disc.a1[cell], &be, ob, &be, ob);
        let d = &disc.d[cell];
        sc.add(&(-d.transpose()), &ve, ou, &pe, op);
        sc.add(&(-d), &pe, op, &ve, ou);
    }
    sc.add_load(&loads.0, &dm.vel, ou);
    sc.add_load(&loads.1, &dm.mag, ob);
    if let Some(lam) = dm.multiplier_index() {
        for cell in 0..disc.num_cells() {
            let mass = &disc.spaces[cell].ctx.mass;
            for (q, i) in dm.pres_cell(cell).enumerate() {
                let w = mass[(0, q)];
                sc.triplets.push((lam, op + i, w));
                sc.triplets.push((op + i, lam, w));
            }
        }
    }
    let triplets = compress(sc.triplets);
    let offsets = [ou, ob, op, op + dm.n_pres, n];
    Ok(SparseSystem { n, triplets, rhs, offsets })
}
