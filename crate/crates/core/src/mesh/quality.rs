use super::{dist, PolyMesh};

/// Shape-regularity ratios of one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementQuality {
    /// Distance from the centroid to the nearest edge line, over `h_E`.
    /// For convex cells this is the radius of a ball w.r.t. which the cell is star-shaped.
    pub ball_ratio: f64,
    /// Smallest vertex-vertex distance over `h_E`.
    pub vertex_ratio: f64,
}

/// Mesh regularity diagnostics. Never a hard failure.
#[derive(Debug, Clone)]
pub struct QualityReport {
    pub elements: Vec<ElementQuality>,
    pub min_ball_ratio: f64,
    pub min_vertex_ratio: f64,
    pub threshold: f64,
    /// Elements with either ratio below `threshold`.
    pub warnings: Vec<usize>,
}

impl QualityReport {
    /// The regularity constant the mesh attains: the smaller of both minima.
    pub fn rho(&self) -> f64 {
        self.min_ball_ratio.min(self.min_vertex_ratio)
    }
}

pub const DEFAULT_QUALITY_THRESHOLD: f64 = 0.05;

pub fn quality_report(mesh: &PolyMesh) -> QualityReport {
    quality_report_with_threshold(mesh, DEFAULT_QUALITY_THRESHOLD)
}

pub fn quality_report_with_threshold(mesh: &PolyMesh, threshold: f64) -> QualityReport {
    let geom = mesh.geometry();
    let elements: Vec<ElementQuality> = geom
        .elements
        .iter()
        .map(|el| {
            let c = el.centroid;
            let ball = el
                .edges
                .iter()
                .map(|e| {
                    let d = [c[0] - e.midpoint[0], c[1] - e.midpoint[1]];
                    (d[0] * e.normal[0] + d[1] * e.normal[1]).abs()
                })
                .fold(f64::INFINITY, f64::min);
            let mut vmin = f64::INFINITY;
            for i in 0..el.vertices.len() {
                for j in (i + 1)..el.vertices.len() {
                    vmin = vmin.min(dist(el.vertices[i], el.vertices[j]));
                }
            }
            ElementQuality { ball_ratio: ball / el.diameter, vertex_ratio: vmin / el.diameter }
        })
        .collect();
    let min_ball_ratio = elements.iter().map(|q| q.ball_ratio).fold(f64::INFINITY, f64::min);
    let min_vertex_ratio = elements.iter().map(|q| q.vertex_ratio).fold(f64::INFINITY, f64::min);
    let warnings = elements
        .iter()
        .enumerate()
        .filter(|(_, q)| q.ball_ratio < threshold || q.vertex_ratio < threshold)
        .map(|(i, _)| i)
        .collect();
    QualityReport { elements, min_ball_ratio, min_vertex_ratio, threshold, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, gen_family, MeshFamily};

    #[test]
    fn uniform_quads() {
        let r = quality_report(&gen_family(MeshFamily::Quad, 4, 0));
        assert!((r.min_vertex_ratio - 1.0 / 2f64.sqrt()).abs() < 1e-14);
        assert!((r.min_ball_ratio - 0.5 / 2f64.sqrt()).abs() < 1e-14);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn equilateral_triangle() {
        let m = build_mesh(vec![[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]], vec![vec![0, 1, 2]]).unwrap();
        let r = quality_report(&m);
        assert!((r.min_ball_ratio - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-14);
        assert!((r.min_vertex_ratio - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sliver_triggers_warning() {
        // apex height 0.02 over a unit base: inradius-like ratio is h/3 ≈ 0.0067
        let m = build_mesh(vec![[0.0, 0.0], [1.0, 0.0], [0.5, 0.02]], vec![vec![0, 1, 2]]).unwrap();
        let r = quality_report(&m);
        let expected = (0.02 / 3.0) / 1.0;
        assert!((r.elements[0].ball_ratio - expected).abs() < 1e-12);
        assert_eq!(r.warnings, vec![0]);
    }

    #[test]
    fn ratios_in_unit_interval() {
        for family in MeshFamily::ALL {
            let r = quality_report(&gen_family(family, 5, 2));
            for q in &r.elements {
                assert!(q.ball_ratio > 0.0 && q.ball_ratio <= 1.0);
                assert!(q.vertex_ratio > 0.0 && q.vertex_ratio <= 1.0);
            }
        }
    }
}
