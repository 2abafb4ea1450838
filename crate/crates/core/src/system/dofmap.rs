use crate::magnetic_space::MagneticLayout;
use crate::mesh::PolyMesh;
use crate::polybasis::{dim, edge_legendre_coeffs};
use crate::velocity_space::VelocityLayout;
use crate::{Error, Point, Result};

use super::{BcSpec, VelocityBc};

/// A raw DOF as `constant + Σ coef · x[unknown]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DofExpansion {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl DofExpansion {
    fn free(unknown: usize) -> Self {
        DofExpansion { terms: vec![(unknown, 1.0)], constant: 0.0 }
    }

    fn fixed(value: f64) -> Self {
        DofExpansion { terms: Vec::new(), constant: value }
    }

    pub fn is_fixed(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(i, c)| c * x[i]).sum::<f64>()
    }
}

/// Global numbering of raw DOFs and their reduction to free unknowns.
///
/// Raw velocity DOFs: edge `e` owns `e·2k + c·k + j`; cell interiors follow.
/// Edge moments use the edge's global orientation, so both neighbours share
/// them without sign changes. Raw magnetic DOFs: vertex `v` owns `2v + c`,
/// then edge moments, then cell interiors. Pressure: `n_{k-1}` coefficients
/// per cell.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub k: usize,
    pub vel: Vec<DofExpansion>,
    pub mag: Vec<DofExpansion>,
    pub n_pres: usize,
    /// Local-to-raw maps per cell.
    pub vel_cells: Vec<Vec<usize>>,
    pub mag_cells: Vec<Vec<usize>>,
    /// Segment index of each boundary edge, `None` for interior edges.
    pub edge_segment: Vec<Option<usize>>,
    pub n_u: usize,
    pub n_b: usize,
    pub has_multiplier: bool,
}

impl DofMap {
    pub fn u_offset(&self) -> usize {
        0
    }

    pub fn b_offset(&self) -> usize {
        self.n_u
    }

    pub fn p_offset(&self) -> usize {
        self.n_u + self.n_b
    }

    pub fn multiplier_index(&self) -> Option<usize> {
        self.has_multiplier.then(|| self.n_u + self.n_b + self.n_pres)
    }

    pub fn n_unknowns(&self) -> usize {
        self.n_u + self.n_b + self.n_pres + usize::from(self.has_multiplier)
    }

    pub fn n_pres_local(&self) -> usize {
        dim(self.k as isize - 1)
    }

    pub fn pres_cell(&self, cell: usize) -> std::ops::Range<usize> {
        let n = self.n_pres_local();
        cell * n..(cell + 1) * n
    }

    /// Raw velocity DOF values from a vector of unknowns.
    pub fn expand_vel(&self, x: &[f64]) -> Vec<f64> {
        self.vel.iter().map(|e| e.eval(x)).collect()
    }

    pub fn expand_mag(&self, x: &[f64]) -> Vec<f64> {
        self.mag.iter().map(|e| e.eval(&x[self.n_u..])).collect()
    }

    pub fn constrained_vel(&self) -> usize {
        self.vel.iter().filter(|e| e.is_fixed()).count()
    }
}

/// A constraint `a · c = value` on a component pair.
#[derive(Debug, Clone, Copy)]
struct Constraint {
    a: Point,
    value: f64,
}

pub fn build_dofmap(mesh: &PolyMesh, k: usize, bc: &BcSpec) -> Result<DofMap> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be ≥ 1".into()));
    }
    let geom = mesh.geometry();
    let ne = mesh.num_edges();
    let nv = mesh.num_vertices();
    let nc = mesh.num_cells();

    // boundary segments
    let mut edge_segment = vec![None; ne];
    for (ei, edge) in mesh.edges().iter().enumerate() {
        if !edge.is_boundary() {
            continue;
        }
        let a = mesh.vertices()[edge.vertices[0]];
        let b = mesh.vertices()[edge.vertices[1]];
        let hits: Vec<usize> =
            bc.segments.iter().enumerate().filter(|(_, s)| s.selector.matches(a, b)).map(|(i, _)| i).collect();
        match hits.as_slice() {
            [s] => edge_segment[ei] = Some(*s),
            [] => return Err(Error::InconsistentBc(format!("boundary edge {ei} has no condition"))),
            _ => return Err(Error::InconsistentBc(format!("boundary edge {ei} matches {} segments", hits.len()))),
        }
    }

    // velocity
    let n_int_u = k * (k - 1);
    let n_raw_u = 2 * k * ne + n_int_u * nc;
    let mut vel_fixed = vec![false; n_raw_u];
    for (ei, seg) in edge_segment.iter().enumerate() {
        if let Some(s) = seg {
            if matches!(bc.segments[*s].velocity, VelocityBc::DirichletZero) {
                for i in 0..2 * k {
                    vel_fixed[ei * 2 * k + i] = true;
                }
            }
        }
    }
    let mut vel = Vec::with_capacity(n_raw_u);
    let mut n_u = 0;
    for fixed in vel_fixed {
        if fixed {
            vel.push(DofExpansion::fixed(0.0));
        } else {
            vel.push(DofExpansion::free(n_u));
            n_u += 1;
        }
    }

    // magnetic: collect constraints per component pair (node)
    let per_edge_b = 2 * (k - 1);
    let nkm2 = dim(k as isize - 2);
    let edge_base = 2 * nv;
    let int_base = edge_base + per_edge_b * ne;
    let n_raw_b = int_base + 2 * nkm2 * nc;
    let n_nodes = nv + (k - 1) * ne;
    let node_of_vertex = |v: usize| v;
    let node_of_edge = |e: usize, j: usize| nv + e * (k - 1) + j;
    let raw_pair = |node: usize| -> [usize; 2] {
        if node < nv {
            [2 * node, 2 * node + 1]
        } else {
            let e = (node - nv) / (k - 1);
            let j = (node - nv) % (k - 1);
            let base = edge_base + e * per_edge_b;
            [base + j, base + (k - 1) + j]
        }
    };
    let mut constraints: Vec<Vec<Constraint>> = vec![Vec::new(); n_nodes];
    for (ei, seg) in edge_segment.iter().enumerate() {
        let Some(s) = seg else { continue };
        let mbc = &bc.segments[*s].magnetic;
        if !mbc.normal_zero && mbc.tangential.is_none() {
            continue;
        }
        let cell = mesh.edges()[ei].cells[0].expect("boundary edge has a cell");
        let eg = geom.elements[cell].edges.iter().find(|e| e.global == ei).expect("edge in its cell");
        let n = eg.normal;
        let t = [-n[1], n[0]];
        let verts = mesh.edges()[ei].vertices;
        if mbc.normal_zero {
            for &v in &verts {
                constraints[node_of_vertex(v)].push(Constraint { a: n, value: 0.0 });
            }
            for j in 0..k - 1 {
                constraints[node_of_edge(ei, j)].push(Constraint { a: n, value: 0.0 });
            }
        }
        if let Some(bd) = &mbc.tangential {
            for &v in &verts {
                let val = bd(mesh.vertices()[v]);
                constraints[node_of_vertex(v)].push(Constraint { a: t, value: t[0] * val[0] + t[1] * val[1] });
            }
            if k >= 2 {
                let coef = edge_legendre_coeffs(eg, k - 2, 2 * k + 8, |x| {
                    let val = bd(x);
                    t[0] * val[0] + t[1] * val[1]
                });
                for j in 0..k - 1 {
                    let moment = coef[j] / (2 * j + 1) as f64;
                    constraints[node_of_edge(ei, j)].push(Constraint { a: t, value: moment });
                }
            }
        }
    }
    let mut mag = vec![DofExpansion::default(); n_raw_b];
    let mut assigned = vec![false; n_raw_b];
    let mut n_b = 0;
    for raw in 0..n_raw_b {
        if assigned[raw] {
            continue;
        }
        let node = if raw < edge_base {
            Some(node_of_vertex(raw / 2))
        } else if raw < int_base {
            let e = (raw - edge_base) / per_edge_b;
            let r = (raw - edge_base) % per_edge_b;
            Some(node_of_edge(e, r % (k - 1)))
        } else {
            None
        };
        let Some(node) = node.filter(|&nd| !constraints[nd].is_empty()) else {
            mag[raw] = DofExpansion::free(n_b);
            assigned[raw] = true;
            n_b += 1;
            continue;
        };
        let pair = raw_pair(node);
        match reduce_constraints(&constraints[node])? {
            Reduced::Fixed(c) => {
                for d in 0..2 {
                    mag[pair[d]] = DofExpansion::fixed(c[d]);
                }
            }
            Reduced::Line { a, value } => {
                let mut free_dir = [-a[1], a[0]];
                if free_dir[0].abs() < 1e-14 {
                    free_dir = [0.0, 1.0];
                } else if free_dir[1].abs() < 1e-14 {
                    free_dir = [1.0, 0.0];
                }
                for d in 0..2 {
                    let mut terms = Vec::new();
                    if free_dir[d] != 0.0 {
                        terms.push((n_b, free_dir[d]));
                    }
                    mag[pair[d]] = DofExpansion { terms, constant: value * a[d] };
                }
                n_b += 1;
            }
        }
        assigned[pair[0]] = true;
        assigned[pair[1]] = true;
    }

    // local-to-raw maps
    let mut vel_cells = Vec::with_capacity(nc);
    let mut mag_cells = Vec::with_capacity(nc);
    for (cell, el) in geom.elements.iter().enumerate() {
        let vl = VelocityLayout::new(k, el.num_edges());
        let mut vm = vec![0; vl.ndof()];
        for (le, e) in el.edges.iter().enumerate() {
            for c in 0..2 {
                for j in 0..k {
                    vm[vl.edge_dof(le, c, j)] = e.global * 2 * k + c * k + j;
                }
            }
        }
        for c in 0..2 {
            for beta in 0..nkm2 {
                vm[vl.interior_dof(c, beta)] = 2 * k * ne + cell * n_int_u + c * nkm2 + beta;
            }
        }
        vel_cells.push(vm);

        let ml = MagneticLayout::new(k, el.num_vertices(), el.num_edges());
        let mut mm = vec![0; ml.ndof()];
        for (i, &v) in el.vertex_ids.iter().enumerate() {
            for c in 0..2 {
                mm[ml.vertex_dof(i, c)] = 2 * v + c;
            }
        }
        for (le, e) in el.edges.iter().enumerate() {
            for c in 0..2 {
                for j in 0..k - 1 {
                    mm[ml.edge_dof(le, c, j)] = edge_base + e.global * per_edge_b + c * (k - 1) + j;
                }
            }
        }
        for c in 0..2 {
            for beta in 0..nkm2 {
                mm[ml.interior_dof(c, beta)] = int_base + cell * 2 * nkm2 + c * nkm2 + beta;
            }
        }
        mag_cells.push(mm);
    }

    Ok(DofMap {
        k,
        vel,
        mag,
        n_pres: nc * dim(k as isize - 1),
        vel_cells,
        mag_cells,
        edge_segment,
        n_u,
        n_b,
        has_multiplier: bc.velocity_fully_prescribed(),
    })
}

enum Reduced {
    Fixed(Point),
    Line { a: Point, value: f64 },
}

const BC_TOL: f64 = 1e-10;

/// Reduces stacked constraints on a component pair to a fixed vector or a
/// single line `a · c = value` with unit `a`.
fn reduce_constraints(cs: &[Constraint]) -> Result<Reduced> {
    let unit: Vec<Constraint> = cs
        .iter()
        .map(|c| {
            let n = (c.a[0] * c.a[0] + c.a[1] * c.a[1]).sqrt();
            Constraint { a: [c.a[0] / n, c.a[1] / n], value: c.value / n }
        })
        .collect();
    let first = unit[0];
    let independent = unit.iter().skip(1).find(|c| (first.a[0] * c.a[1] - first.a[1] * c.a[0]).abs() > 1e-8);
    match independent {
        None => {
            for c in &unit[1..] {
                let s = first.a[0] * c.a[0] + first.a[1] * c.a[1];
                if (c.value - s * first.value).abs() > BC_TOL * first.value.abs().max(1.0) {
                    return Err(Error::InconsistentBc(format!(
                        "conflicting values {} and {} on a boundary node",
                        first.value,
                        s * c.value
                    )));
                }
            }
            Ok(Reduced::Line { a: first.a, value: first.value })
        }
        Some(second) => {
            let det = first.a[0] * second.a[1] - first.a[1] * second.a[0];
            let c = [
                (first.value * second.a[1] - first.a[1] * second.value) / det,
                (first.a[0] * second.value - first.value * second.a[0]) / det,
            ];
            let scale = c[0].abs().max(c[1].abs()).max(1.0);
            for k in &unit {
                let r = k.a[0] * c[0] + k.a[1] * c[1] - k.value;
                if r.abs() > BC_TOL * scale {
                    return Err(Error::InconsistentBc(format!("corner conditions conflict by {r:.3e}")));
                }
            }
            Ok(Reduced::Fixed(c))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{gen_family, MeshFamily};
    use crate::system::{BcSegment, MagneticBc, Selector};
    use std::sync::Arc;

    #[test]
    fn counts_on_quad_grid() {
        let m = gen_family(MeshFamily::Quad, 4, 0);
        let d = build_dofmap(&m, 1, &BcSpec::no_slip_insulating()).unwrap();
        assert_eq!(d.n_u, 48);
        assert_eq!(d.n_pres, 16);
        assert!(d.has_multiplier);
        // 25 vertices: 9 interior (2 each), 12 edge-interior boundary (1 each), 4 corners (fixed)
        assert_eq!(d.n_b, 18 + 12);
        assert_eq!(d.n_unknowns(), 48 + 30 + 16 + 1);
    }

    #[test]
    fn normal_zero_on_bottom_edge_fixes_second_component() {
        let m = gen_family(MeshFamily::Quad, 4, 0);
        let d = build_dofmap(&m, 1, &BcSpec::no_slip_insulating()).unwrap();
        for (v, p) in m.vertices().iter().enumerate() {
            if p[1] == 0.0 && p[0] > 0.0 && p[0] < 1.0 {
                assert!(d.mag[2 * v + 1].is_fixed());
                assert_eq!(d.mag[2 * v].terms.len(), 1);
                assert_eq!(d.mag[2 * v].terms[0].1, 1.0);
            }
            if (p[0] == 0.0 || p[0] == 1.0) && (p[1] == 0.0 || p[1] == 1.0) {
                assert!(d.mag[2 * v].is_fixed() && d.mag[2 * v + 1].is_fixed());
            }
        }
    }

    #[test]
    fn interior_edges_share_moments() {
        let m = gen_family(MeshFamily::Voronoi, 4, 1);
        let d = build_dofmap(&m, 2, &BcSpec::no_slip_insulating()).unwrap();
        let mut seen = std::collections::HashMap::new();
        for cell in &d.vel_cells {
            for &r in cell {
                *seen.entry(r).or_insert(0) += 1;
            }
        }
        let edge_raw = 2 * 2 * m.num_edges();
        for (e, edge) in m.edges().iter().enumerate() {
            for i in 0..4 {
                let count = seen[&(e * 4 + i)];
                assert_eq!(count, if edge.is_boundary() { 1 } else { 2 });
            }
        }
        assert!(seen.keys().filter(|&&r| r >= edge_raw).all(|r| seen[r] == 1));
    }

    #[test]
    fn segment_coverage_errors() {
        let m = gen_family(MeshFamily::Quad, 2, 0);
        let bottom_only = BcSpec::new(vec![BcSegment {
            selector: Selector::Line { axis: 1, value: 0.0 },
            velocity: VelocityBc::DirichletZero,
            magnetic: MagneticBc::default(),
        }]);
        assert!(matches!(build_dofmap(&m, 1, &bottom_only), Err(Error::InconsistentBc(_))));
        let mut dup = BcSpec::no_slip_insulating();
        dup.segments.push(dup.segments[0].clone());
        assert!(matches!(build_dofmap(&m, 1, &dup), Err(Error::InconsistentBc(_))));
    }

    #[test]
    fn conflicting_corner_is_rejected() {
        let m = gen_family(MeshFamily::Quad, 2, 0);
        // tangential b_d = (1, 1) everywhere is consistent; a field that jumps at a corner is not
        let ok = BcSpec::new(vec![BcSegment {
            selector: Selector::All,
            velocity: VelocityBc::DirichletZero,
            magnetic: MagneticBc { normal_zero: false, tangential: Some(Arc::new(|_| [1.0, 1.0])) },
        }]);
        let d = build_dofmap(&m, 1, &ok).unwrap();
        assert!(d.mag[0].is_fixed() && (d.mag[0].constant - 1.0).abs() < 1e-14);
        let bad = BcSpec::new(vec![BcSegment {
            selector: Selector::All,
            velocity: VelocityBc::DirichletZero,
            magnetic: MagneticBc { normal_zero: true, tangential: Some(Arc::new(|_| [1.0, 1.0])) },
        }]);
        assert!(matches!(build_dofmap(&m, 1, &bad), Err(Error::InconsistentBc(_))));
    }

    #[test]
    fn rejects_k_zero() {
        let m = gen_family(MeshFamily::Quad, 2, 0);
        assert!(build_dofmap(&m, 0, &BcSpec::no_slip_insulating()).is_err());
    }
}
