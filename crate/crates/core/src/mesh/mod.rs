//! Two-dimensional conforming meshes of triangles or quadrilaterals.
//!
//! Cells are stored counter-clockwise. Reference cells are the unit triangle
//! `{x, y >= 0, x + y <= 1}` with vertices `(0,0), (1,0), (0,1)` and the unit
//! square with vertices `(0,0), (1,0), (1,1), (0,1)`. Local facet `i` of a cell
//! runs from local vertex `i` to local vertex `i + 1` (cyclically).

mod geometry;
mod io;
mod topology;

pub use geometry::CellGeometry;
pub use io::{load_mesh, write_mesh};
pub use topology::{build_facet_topology, Facet, FacetSide, FacetTopology};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellKind {
    Triangle,
    Quadrilateral,
}

impl CellKind {
    pub fn num_vertices(self) -> usize {
        match self {
            CellKind::Triangle => 3,
            CellKind::Quadrilateral => 4,
        }
    }

    /// Vertices of the reference cell in local order.
    pub fn reference_vertices(self) -> &'static [[f64; 2]] {
        match self {
            CellKind::Triangle => &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            CellKind::Quadrilateral => &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        }
    }

    pub fn reference_measure(self) -> f64 {
        match self {
            CellKind::Triangle => 0.5,
            CellKind::Quadrilateral => 1.0,
        }
    }

    /// Reference coordinates of the point at arclength fraction `t` along
    /// local facet `local` (from local vertex `local` towards `local + 1`).
    pub fn facet_point(self, local: usize, t: f64) -> [f64; 2] {
        let rv = self.reference_vertices();
        let a = rv[local];
        let b = rv[(local + 1) % rv.len()];
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }
}

/// Axis-aligned bounding box `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl BoundingBox {
    pub fn new(min: [f64; 2], max: [f64; 2]) -> Self {
        BoundingBox { min, max }
    }

    pub fn unit_square() -> Self {
        BoundingBox::new([0.0, 0.0], [1.0, 1.0])
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    fn validate(&self) -> Result<()> {
        let ok = self.min.iter().chain(&self.max).all(|v| v.is_finite()) && self.width() > 0.0 && self.height() > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("degenerate bounding box {self:?}")))
        }
    }

    fn of_points(points: &[[f64; 2]]) -> Self {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in points {
            for d in 0..2 {
                min[d] = min[d].min(p[d]);
                max[d] = max[d].max(p[d]);
            }
        }
        BoundingBox { min, max }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    vertices: Vec<[f64; 2]>,
    cells: Vec<usize>,
    kind: CellKind,
    domain_box: BoundingBox,
}

impl Mesh {
    /// Builds a mesh from raw data, checking every invariant.
    ///
    /// Cells must already be counter-clockwise; [`load_mesh`] reorients
    /// clockwise input before calling this.
    pub fn new(vertices: Vec<[f64; 2]>, cells: Vec<Vec<usize>>, kind: CellKind) -> Result<Self> {
        let nv = kind.num_vertices();
        if cells.is_empty() {
            return Err(Error::InvalidMesh("mesh has no cells".into()));
        }
        let mut flat = Vec::with_capacity(cells.len() * nv);
        for (c, cell) in cells.iter().enumerate() {
            if cell.len() != nv {
                return Err(Error::InvalidMesh(format!("cell {c} has {} vertices, expected {nv}", cell.len())));
            }
            for &v in cell {
                if v >= vertices.len() {
                    return Err(Error::InvalidMesh(format!(
                        "cell {c} references vertex {v} but only {} vertices exist",
                        vertices.len()
                    )));
                }
            }
            flat.extend_from_slice(cell);
        }
        if vertices.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }
        let domain_box = BoundingBox::of_points(&vertices);
        let mesh = Mesh {
            vertices,
            cells: flat,
            kind,
            domain_box,
        };
        mesh.check_invariants()?;
        Ok(mesh)
    }

    fn check_invariants(&self) -> Result<()> {
        let diam = self.domain_box.diameter();
        for c in 0..self.num_cells() {
            let area = self.signed_area(c);
            if !(area > 0.0) {
                return Err(Error::InvalidMesh(format!("cell {c} has non-positive signed area {area:e}")));
            }
            if self.kind == CellKind::Quadrilateral && !self.is_convex(c) {
                return Err(Error::InvalidMesh(format!("quadrilateral {c} is not convex")));
            }
        }
        // coincident vertices: sweep in x order
        let tol = 1e-12 * diam;
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| self.vertices[a][0].total_cmp(&self.vertices[b][0]));
        for (i, &a) in order.iter().enumerate() {
            let pa = self.vertices[a];
            for &b in &order[i + 1..] {
                let pb = self.vertices[b];
                if pb[0] - pa[0] > tol {
                    break;
                }
                if (pb[0] - pa[0]).hypot(pb[1] - pa[1]) <= tol {
                    return Err(Error::InvalidMesh(format!("vertices {a} and {b} coincide within {tol:e}")));
                }
            }
        }
        Ok(())
    }

    fn is_convex(&self, c: usize) -> bool {
        let v = self.cell_coords(c);
        let n = v.len();
        (0..n).all(|i| {
            let a = v[i];
            let b = v[(i + 1) % n];
            let d = v[(i + 2) % n];
            let cross = (b[0] - a[0]) * (d[1] - b[1]) - (b[1] - a[1]) * (d[0] - b[0]);
            cross > 0.0
        })
    }

    pub fn kind(&self) -> CellKind {
        self.kind
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len() / self.kind.num_vertices()
    }

    pub fn domain_box(&self) -> BoundingBox {
        self.domain_box
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        let nv = self.kind.num_vertices();
        &self.cells[c * nv..(c + 1) * nv]
    }

    pub fn cells(&self) -> impl Iterator<Item = &[usize]> {
        self.cells.chunks_exact(self.kind.num_vertices())
    }

    pub fn cell_coords(&self, c: usize) -> Vec<[f64; 2]> {
        self.cell(c).iter().map(|&v| self.vertices[v]).collect()
    }

    /// Shoelace signed area of cell `c`.
    pub fn signed_area(&self, c: usize) -> f64 {
        signed_area(&self.cell_coords(c))
    }

    /// Cell diameter h_K (largest vertex-to-vertex distance).
    pub fn cell_diameter(&self, c: usize) -> f64 {
        let v = self.cell_coords(c);
        let mut h = 0.0f64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                h = h.max((v[i][0] - v[j][0]).hypot(v[i][1] - v[j][1]));
            }
        }
        h
    }

    /// Mesh size h = max h_K.
    pub fn mesh_size(&self) -> f64 {
        (0..self.num_cells()).map(|c| self.cell_diameter(c)).fold(0.0, f64::max)
    }

    pub fn geometry(&self, c: usize) -> CellGeometry {
        CellGeometry::new(self.kind, &self.cell_coords(c))
    }
}

pub(crate) fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let a = v[i];
            let b = v[(i + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
}

fn structured_vertices(n: usize, bbox: &BoundingBox) -> Vec<[f64; 2]> {
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let x = bbox.min[0] + bbox.width() * i as f64 / n as f64;
            let y = bbox.min[1] + bbox.height() * j as f64 / n as f64;
            vertices.push([x, y]);
        }
    }
    vertices
}

fn check_structured_args(n: usize, bbox: &BoundingBox) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("cells per side must be at least 1"));
    }
    bbox.validate()
}

/// `n x n` grid of squares, each split along its lower-right to upper-left
/// diagonal into two triangles (`2n^2` cells).
pub fn build_structured_triangle_mesh(n: usize, bbox: BoundingBox) -> Result<Mesh> {
    check_structured_args(n, &bbox)?;
    let vertices = structured_vertices(n, &bbox);
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            cells.push(vec![a, b, d]);
            cells.push(vec![b, c, d]);
        }
    }
    Mesh::new(vertices, cells, CellKind::Triangle)
}

/// `n x n` grid of axis-aligned quadrilaterals.
pub fn build_structured_quad_mesh(n: usize, bbox: BoundingBox) -> Result<Mesh> {
    check_structured_args(n, &bbox)?;
    let vertices = structured_vertices(n, &bbox);
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    Mesh::new(vertices, cells, CellKind::Quadrilateral)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_square_split_into_two_triangles() {
        let m = build_structured_triangle_mesh(1, BoundingBox::unit_square()).unwrap();
        assert_eq!(m.num_cells(), 2);
        assert_eq!(m.num_vertices(), 4);
    }

    #[test]
    fn triangle_diameter_is_square_diagonal() {
        let m = build_structured_triangle_mesh(32, BoundingBox::unit_square()).unwrap();
        assert_eq!(m.num_cells(), 2048);
        let expected = 2f64.sqrt() / 32.0;
        for c in 0..m.num_cells() {
            assert!((m.cell_diameter(c) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn quad_mesh_sizes() {
        assert_eq!(build_structured_quad_mesh(1, BoundingBox::unit_square()).unwrap().num_cells(), 1);
        assert_eq!(
            build_structured_quad_mesh(32, BoundingBox::unit_square()).unwrap().num_cells(),
            1024
        );
        let m = build_structured_quad_mesh(20, BoundingBox::new([-1.0, -1.0], [1.0, 1.0])).unwrap();
        assert_eq!(m.num_cells(), 400);
        for c in 0..m.num_cells() {
            let v = m.cell_coords(c);
            assert!(((v[1][0] - v[0][0]) - 0.1).abs() < 1e-14);
            assert!(((v[3][1] - v[0][1]) - 0.1).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_cells_per_side_rejected() {
        assert!(matches!(
            build_structured_triangle_mesh(0, BoundingBox::unit_square()),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_structured_quad_mesh(0, BoundingBox::unit_square()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn degenerate_box_rejected() {
        let b = BoundingBox::new([0.0, 0.0], [1.0, 0.0]);
        assert!(build_structured_quad_mesh(2, b).is_err());
    }

    #[test]
    fn areas_sum_to_box_area() {
        let b = BoundingBox::new([-1.0, 0.5], [2.0, 1.75]);
        for m in [
            build_structured_triangle_mesh(7, b).unwrap(),
            build_structured_quad_mesh(5, b).unwrap(),
        ] {
            let total: f64 = (0..m.num_cells()).map(|c| m.signed_area(c)).sum();
            assert!((total - b.area()).abs() <= 1e-12 * b.area());
        }
    }

    #[test]
    fn clockwise_and_nonconvex_cells_rejected() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(Mesh::new(v.clone(), vec![vec![0, 2, 1]], CellKind::Triangle).is_err());
        let q = vec![[0.0, 0.0], [1.0, 0.0], [0.3, 0.3], [0.0, 1.0]];
        assert!(Mesh::new(q, vec![vec![0, 1, 2, 3]], CellKind::Quadrilateral).is_err());
        let dup = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]];
        assert!(Mesh::new(dup, vec![vec![0, 1, 2]], CellKind::Triangle).is_err());
    }
}
