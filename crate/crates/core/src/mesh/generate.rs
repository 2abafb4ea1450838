use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_mesh, dist, signed_area, PolyMesh};
use crate::Point;

/// Mesh families used by the convergence studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeshFamily {
    /// Uniform grid with every square split along its rising diagonal.
    Tri,
    /// Uniform square grid.
    Quad,
    /// Square grid with interior vertices randomly displaced by up to 20% of a cell width.
    PerturbedQuad,
    /// Centroidal Voronoi tessellation from `n²` random seeds (Lloyd iterations).
    Voronoi,
}

impl MeshFamily {
    pub const ALL: [MeshFamily; 4] =
        [MeshFamily::Tri, MeshFamily::Quad, MeshFamily::PerturbedQuad, MeshFamily::Voronoi];

    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::Tri => "tri",
            MeshFamily::Quad => "quad",
            MeshFamily::PerturbedQuad => "perturbed_quad",
            MeshFamily::Voronoi => "voronoi",
        }
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeshFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MeshFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown mesh family '{s}' (expected tri, quad, perturbed_quad or voronoi)"))
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rectangle {
    pub const UNIT: Rectangle = Rectangle { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 };

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

/// Mesh of the unit square with `n` subdivisions per side.
pub fn gen_family(family: MeshFamily, n: usize, seed: u64) -> PolyMesh {
    gen_rectangle(family, Rectangle::UNIT, n, n, seed)
}

/// Mesh of a rectangle with `nx × ny` subdivisions (or `nx·ny` Voronoi seeds).
pub fn gen_rectangle(family: MeshFamily, rect: Rectangle, nx: usize, ny: usize, seed: u64) -> PolyMesh {
    assert!(nx >= 1 && ny >= 1, "mesh subdivisions must be at least 1");
    let (vertices, cells) = match family {
        MeshFamily::Quad => grid(rect, nx, ny, None, false),
        MeshFamily::Tri => grid(rect, nx, ny, None, true),
        MeshFamily::PerturbedQuad => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            grid(rect, nx, ny, Some(&mut rng), false)
        }
        MeshFamily::Voronoi => voronoi(rect, nx * ny, seed),
    };
    build_mesh(vertices, cells).expect("generated mesh is valid")
}

fn grid(
    rect: Rectangle,
    nx: usize,
    ny: usize,
    mut perturb: Option<&mut ChaCha8Rng>,
    split: bool,
) -> (Vec<Point>, Vec<Vec<usize>>) {
    let dx = rect.width() / nx as f64;
    let dy = rect.height() / ny as f64;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let mut p = [rect.x0 + i as f64 * dx, rect.y0 + j as f64 * dy];
            // pin boundary coordinates exactly
            if i == nx {
                p[0] = rect.x1;
            }
            if j == ny {
                p[1] = rect.y1;
            }
            if let Some(rng) = perturb.as_deref_mut() {
                if i > 0 && i < nx && j > 0 && j < ny {
                    p[0] += rng.random_range(-0.2..0.2) * dx;
                    p[1] += rng.random_range(-0.2..0.2) * dy;
                }
            }
            vertices.push(p);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut cells = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if split {
                cells.push(vec![a, b, c]);
                cells.push(vec![a, c, d]);
            } else {
                cells.push(vec![a, b, c, d]);
            }
        }
    }
    (vertices, cells)
}

const LLOYD_MAX_ITERATIONS: usize = 1000;

fn voronoi(rect: Rectangle, count: usize, seed: u64) -> (Vec<Point>, Vec<Vec<usize>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seeds: Vec<Point> =
        (0..count).map(|_| [rng.random_range(rect.x0..rect.x1), rng.random_range(rect.y0..rect.y1)]).collect();
    let h_ref = (rect.area() / count as f64).sqrt();
    let mut cells = voronoi_cells(&seeds, rect);
    for _ in 0..LLOYD_MAX_ITERATIONS {
        let mut moved: f64 = 0.0;
        for (s, cell) in seeds.iter_mut().zip(&cells) {
            let c = polygon_centroid(cell);
            moved = moved.max(dist(*s, c));
            *s = c;
        }
        cells = voronoi_cells(&seeds, rect);
        if moved < 1e-10 * h_ref {
            break;
        }
    }
    merge_vertices(&cells, 1e-9 * h_ref)
}

fn polygon_centroid(pts: &[Point]) -> Point {
    let a = signed_area(pts);
    let n = pts.len();
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let cross = p[0] * q[1] - q[0] * p[1];
        cx += (p[0] + q[0]) * cross;
        cy += (p[1] + q[1]) * cross;
    }
    [cx / (6.0 * a), cy / (6.0 * a)]
}

/// Clips a convex polygon to `{x : (x - mid)·dir <= 0}`.
fn clip(poly: &[Point], mid: Point, dir: Point) -> Vec<Point> {
    let side = |p: Point| (p[0] - mid[0]) * dir[0] + (p[1] - mid[1]) * dir[1];
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let (sp, sq) = (side(p), side(q));
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

fn voronoi_cells(seeds: &[Point], rect: Rectangle) -> Vec<Vec<Point>> {
    let nb = (seeds.len() as f64).sqrt().ceil().max(1.0) as usize;
    let bw = rect.width() / nb as f64;
    let bh = rect.height() / nb as f64;
    let bucket_of = |p: Point| {
        let i = (((p[0] - rect.x0) / bw) as usize).min(nb - 1);
        let j = (((p[1] - rect.y0) / bh) as usize).min(nb - 1);
        (i, j)
    };
    let mut buckets = vec![Vec::new(); nb * nb];
    for (s, p) in seeds.iter().enumerate() {
        let (i, j) = bucket_of(*p);
        buckets[j * nb + i].push(s);
    }
    let corners = vec![[rect.x0, rect.y0], [rect.x1, rect.y0], [rect.x1, rect.y1], [rect.x0, rect.y1]];
    seeds
        .iter()
        .enumerate()
        .map(|(s, &p)| {
            let (bi, bj) = bucket_of(p);
            let mut poly = corners.clone();
            let mut ring = 0usize;
            loop {
                let (ilo, ihi) = (bi as isize - ring as isize, bi as isize + ring as isize);
                let (jlo, jhi) = (bj as isize - ring as isize, bj as isize + ring as isize);
                for j in jlo..=jhi {
                    for i in ilo..=ihi {
                        let on_ring = i == ilo || i == ihi || j == jlo || j == jhi;
                        if !on_ring || i < 0 || j < 0 || i >= nb as isize || j >= nb as isize {
                            continue;
                        }
                        for &o in &buckets[j as usize * nb + i as usize] {
                            if o == s {
                                continue;
                            }
                            let q = seeds[o];
                            let mid = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
                            poly = clip(&poly, mid, [q[0] - p[0], q[1] - p[1]]);
                        }
                    }
                }
                let reach = poly.iter().map(|&v| dist(p, v)).fold(0.0, f64::max);
                if ring as f64 * bw.min(bh) >= 2.0 * reach || ring > nb {
                    break;
                }
                ring += 1;
            }
            poly
        })
        .collect()
}

fn merge_vertices(cells: &[Vec<Point>], tol: f64) -> (Vec<Point>, Vec<Vec<usize>>) {
    let mut vertices: Vec<Point> = Vec::new();
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let key = |p: Point| ((p[0] / tol).floor() as i64, (p[1] / tol).floor() as i64);
    let mut out = Vec::with_capacity(cells.len());
    for cell in cells {
        let mut ids: Vec<usize> = Vec::with_capacity(cell.len());
        for &p in cell {
            let (kx, ky) = key(p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = grid.get(&(kx + dx, ky + dy)) {
                        if let Some(&v) = list.iter().find(|&&v| dist(vertices[v], p) <= tol) {
                            found = Some(v);
                            break 'search;
                        }
                    }
                }
            }
            let id = found.unwrap_or_else(|| {
                vertices.push(p);
                grid.entry((kx, ky)).or_default().push(vertices.len() - 1);
                vertices.len() - 1
            });
            if ids.last() != Some(&id) {
                ids.push(id);
            }
        }
        while ids.len() > 1 && ids.first() == ids.last() {
            ids.pop();
        }
        out.push(ids);
    }
    (vertices, out)
}
