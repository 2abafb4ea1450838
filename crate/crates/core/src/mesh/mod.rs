//! Polygonal meshes: topology, geometry caches, generators, quality and I/O.

mod generate;
pub mod io;
mod quality;

use std::collections::HashMap;

use crate::{Error, Point, Result};

pub use generate::{gen_family, gen_rectangle, MeshFamily, Rectangle};
pub use quality::{quality_report, ElementQuality, QualityReport};

/// A mesh edge stored with its global orientation: `vertices[0] < vertices[1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    /// Incident cells; the second entry is `None` on the boundary.
    pub cells: [Option<usize>; 2],
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.cells[1].is_none()
    }
}

/// Polygonal mesh with counter-clockwise cells and derived edges.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMesh {
    vertices: Vec<Point>,
    cells: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    /// `cell_edges[c][i]` is the edge from local vertex `i` to `i + 1`.
    cell_edges: Vec<Vec<usize>>,
}

fn signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    let mut twice = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        twice += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * twice
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_cross(p1: Point, p2: Point, q1: Point, q2: Point, tol: f64) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol))
}

fn is_self_intersecting(pts: &[Point], scale: f64) -> bool {
    let n = pts.len();
    let tol = 1e-14 * scale * scale;
    for i in 0..n {
        for j in (i + 1)..n {
            // adjacent edges share a vertex
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n], tol) {
                return true;
            }
        }
    }
    false
}

/// Validates raw input and derives edges and boundary flags.
///
/// Clockwise loops are reversed; crossing loops are rejected.
pub fn build_mesh(vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<PolyMesh> {
    let nv = vertices.len();
    let mut oriented = Vec::with_capacity(cells.len());
    for (c, cell) in cells.into_iter().enumerate() {
        if let Some(&bad) = cell.iter().find(|&&i| i >= nv) {
            return Err(Error::VertexOutOfRange { index: bad, count: nv });
        }
        let mut distinct = cell.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if cell.len() < 3 || distinct.len() != cell.len() {
            return Err(Error::TooFewVertices { cell: c });
        }
        let pts: Vec<Point> = cell.iter().map(|&i| vertices[i]).collect();
        let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
        for p in &pts {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let scale = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        if is_self_intersecting(&pts, scale) {
            return Err(Error::SelfIntersectingCell { cell: c });
        }
        let area = signed_area(&pts);
        if !(area.abs() > 1e-14 * scale * scale) {
            return Err(Error::DegenerateCell { cell: c });
        }
        let mut cell = cell;
        if area < 0.0 {
            cell.reverse();
        }
        oriented.push(cell);
    }

    let mut edges: Vec<Edge> = Vec::new();
    // edge key -> (edge index, direction of first traversal)
    let mut lookup: HashMap<(usize, usize), (usize, bool)> = HashMap::new();
    let mut cell_edges = Vec::with_capacity(oriented.len());
    for (c, cell) in oriented.iter().enumerate() {
        let n = cell.len();
        let mut local = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = (cell[i], cell[(i + 1) % n]);
            let key = (a.min(b), a.max(b));
            let forward = a < b;
            match lookup.get(&key) {
                None => {
                    lookup.insert(key, (edges.len(), forward));
                    local.push(edges.len());
                    edges.push(Edge { vertices: [key.0, key.1], cells: [Some(c), None] });
                }
                Some(&(e, first_dir)) => {
                    if edges[e].cells[1].is_some() {
                        return Err(Error::NonManifoldEdge(key.0, key.1));
                    }
                    if first_dir == forward {
                        return Err(Error::InconsistentOrientation(key.0, key.1));
                    }
                    edges[e].cells[1] = Some(c);
                    local.push(e);
                }
            }
        }
        cell_edges.push(local);
    }

    Ok(PolyMesh { vertices, cells: oriented, edges, cell_edges })
}

impl PolyMesh {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn cell_edges(&self, cell: usize) -> &[usize] {
        &self.cell_edges[cell]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn boundary_edge_flags(&self) -> Vec<bool> {
        self.edges.iter().map(Edge::is_boundary).collect()
    }

    pub fn num_boundary_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.is_boundary()).count()
    }

    /// Per-element geometry for every cell.
    pub fn geometry(&self) -> GeomCache {
        let elements: Vec<ElementGeometry> = (0..self.num_cells()).map(|c| ElementGeometry::new(self, c)).collect();
        let total_area = elements.iter().map(|e| e.area).sum();
        GeomCache { elements, total_area }
    }

    /// Largest element diameter.
    pub fn mesh_size(&self) -> f64 {
        (0..self.num_cells()).map(|c| diameter(&self.cell_points(c))).fold(0.0, f64::max)
    }

    pub fn cell_points(&self, cell: usize) -> Vec<Point> {
        self.cells[cell].iter().map(|&i| self.vertices[i]).collect()
    }

    /// Vertex-to-boundary-edge incidence for boundary vertices.
    pub fn boundary_vertex_edges(&self) -> HashMap<usize, Vec<usize>> {
        let mut map: HashMap<usize, Vec<usize>> = HashMap::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.is_boundary() {
                for &v in &edge.vertices {
                    map.entry(v).or_default().push(e);
                }
            }
        }
        map
    }
}

/// Largest element diameter, see [`PolyMesh::mesh_size`].
pub fn mesh_size(mesh: &PolyMesh) -> f64 {
    mesh.mesh_size()
}

fn diameter(pts: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            d = d.max(dist(pts[i], pts[j]));
        }
    }
    d
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Geometry of one edge as seen from one element.
#[derive(Debug, Clone)]
pub struct EdgeGeometry {
    /// Global edge index.
    pub global: usize,
    pub length: f64,
    /// Unit outward normal with respect to the owning element.
    pub normal: Point,
    /// Unit tangent in the element's counter-clockwise direction.
    pub tangent: Point,
    pub midpoint: Point,
    /// Endpoint with the lower global vertex index (parameter `t = -1`).
    pub start: Point,
    /// Endpoint with the higher global vertex index (parameter `t = +1`).
    pub end: Point,
    /// Local vertex indices of `start` and `end` within the element.
    pub start_local: usize,
    pub end_local: usize,
}

impl EdgeGeometry {
    /// Point at global-orientation parameter `t ∈ [-1, 1]`.
    pub fn point(&self, t: f64) -> Point {
        [
            self.midpoint[0] + 0.5 * t * (self.end[0] - self.start[0]),
            self.midpoint[1] + 0.5 * t * (self.end[1] - self.start[1]),
        ]
    }
}

/// Cached per-element geometry.
#[derive(Debug, Clone)]
pub struct ElementGeometry {
    pub index: usize,
    pub vertex_ids: Vec<usize>,
    pub vertices: Vec<Point>,
    pub area: f64,
    pub centroid: Point,
    pub diameter: f64,
    pub edges: Vec<EdgeGeometry>,
}

impl ElementGeometry {
    pub fn new(mesh: &PolyMesh, cell: usize) -> Self {
        let ids = mesh.cells[cell].clone();
        let pts = mesh.cell_points(cell);
        let n = pts.len();
        let area = signed_area(&pts);
        let mut cx = 0.0;
        let mut cy = 0.0;
        for i in 0..n {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            let cross = a[0] * b[1] - b[0] * a[1];
            cx += (a[0] + b[0]) * cross;
            cy += (a[1] + b[1]) * cross;
        }
        let centroid = [cx / (6.0 * area), cy / (6.0 * area)];
        let edges = (0..n)
            .map(|i| {
                let j = (i + 1) % n;
                let (a, b) = (pts[i], pts[j]);
                let length = dist(a, b);
                let tangent = [(b[0] - a[0]) / length, (b[1] - a[1]) / length];
                let forward = ids[i] < ids[j];
                let (start_local, end_local) = if forward { (i, j) } else { (j, i) };
                EdgeGeometry {
                    global: mesh.cell_edges[cell][i],
                    length,
                    normal: [tangent[1], -tangent[0]],
                    tangent,
                    midpoint: [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])],
                    start: pts[start_local],
                    end: pts[end_local],
                    start_local,
                    end_local,
                }
            })
            .collect();
        ElementGeometry { index: cell, vertex_ids: ids, diameter: diameter(&pts), vertices: pts, area, centroid, edges }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Point-in-polygon test for a counter-clockwise convex or star-shaped cell,
    /// inclusive of the boundary up to `tol` (absolute distance).
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        // winding number, with an explicit on-edge check
        let n = self.vertices.len();
        let mut winding = 0i32;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let len = dist(a, b);
            let cross = orient(a, b, p);
            let along = (p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1]);
            if (cross / len).abs() <= tol && along >= -tol * len && along <= len * len + tol * len {
                return true;
            }
            if a[1] <= p[1] {
                if b[1] > p[1] && cross > 0.0 {
                    winding += 1;
                }
            } else if b[1] <= p[1] && cross < 0.0 {
                winding -= 1;
            }
        }
        winding != 0
    }
}

/// Geometry of all elements of a mesh.
#[derive(Debug, Clone)]
pub struct GeomCache {
    pub elements: Vec<ElementGeometry>,
    pub total_area: f64,
}
