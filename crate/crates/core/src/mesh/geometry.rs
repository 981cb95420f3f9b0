use super::CellKind;

/// Reference-to-physical map of a single cell.
///
/// Triangles use the affine map `x = v0 + [v1 - v0, v2 - v0] xi`; quadrilaterals
/// use the bilinear map through their four corners, whose Jacobian varies with
/// the reference point.
#[derive(Clone, Debug)]
pub struct CellGeometry {
    kind: CellKind,
    corners: [[f64; 2]; 4],
}

/// Jacobian data at one reference point.
#[derive(Clone, Copy, Debug)]
pub struct Jacobian {
    /// `j[r][c] = d x_r / d xi_c`
    pub j: [[f64; 2]; 2],
    pub det: f64,
    /// Inverse transpose, used to map reference gradients to physical ones.
    pub inv_t: [[f64; 2]; 2],
}

impl Jacobian {
    fn from_matrix(j: [[f64; 2]; 2]) -> Self {
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let inv_t = [[j[1][1] / det, -j[1][0] / det], [-j[0][1] / det, j[0][0] / det]];
        Jacobian { j, det, inv_t }
    }

    /// Physical gradient from a reference gradient.
    #[inline]
    pub fn map_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_t[0][0] * g[0] + self.inv_t[0][1] * g[1],
            self.inv_t[1][0] * g[0] + self.inv_t[1][1] * g[1],
        ]
    }
}

impl CellGeometry {
    pub fn new(kind: CellKind, coords: &[[f64; 2]]) -> Self {
        let mut corners = [[0.0; 2]; 4];
        corners[..coords.len()].copy_from_slice(coords);
        CellGeometry { kind, corners }
    }

    pub fn kind(&self) -> CellKind {
        self.kind
    }

    pub fn map(&self, xi: [f64; 2]) -> [f64; 2] {
        let v = &self.corners;
        match self.kind {
            CellKind::Triangle => [
                v[0][0] + (v[1][0] - v[0][0]) * xi[0] + (v[2][0] - v[0][0]) * xi[1],
                v[0][1] + (v[1][1] - v[0][1]) * xi[0] + (v[2][1] - v[0][1]) * xi[1],
            ],
            CellKind::Quadrilateral => {
                let (s, t) = (xi[0], xi[1]);
                let w = [(1.0 - s) * (1.0 - t), s * (1.0 - t), s * t, (1.0 - s) * t];
                let mut x = [0.0; 2];
                for (k, wk) in w.iter().enumerate() {
                    x[0] += wk * v[k][0];
                    x[1] += wk * v[k][1];
                }
                x
            }
        }
    }

    pub fn jacobian(&self, xi: [f64; 2]) -> Jacobian {
        let v = &self.corners;
        let j = match self.kind {
            CellKind::Triangle => [[v[1][0] - v[0][0], v[2][0] - v[0][0]], [v[1][1] - v[0][1], v[2][1] - v[0][1]]],
            CellKind::Quadrilateral => {
                let (s, t) = (xi[0], xi[1]);
                let ds = [-(1.0 - t), 1.0 - t, t, -t];
                let dt = [-(1.0 - s), -s, s, 1.0 - s];
                let mut j = [[0.0; 2]; 2];
                for k in 0..4 {
                    for r in 0..2 {
                        j[r][0] += ds[k] * v[k][r];
                        j[r][1] += dt[k] * v[k][r];
                    }
                }
                j
            }
        };
        Jacobian::from_matrix(j)
    }

    /// Reference point mapped to `x`; exact for triangles, Newton iteration
    /// for bilinear quadrilaterals.
    pub fn inverse_map(&self, x: [f64; 2]) -> [f64; 2] {
        let mut xi = match self.kind {
            CellKind::Triangle => [0.0, 0.0],
            CellKind::Quadrilateral => [0.5, 0.5],
        };
        for _ in 0..50 {
            let y = self.map(xi);
            let r = [x[0] - y[0], x[1] - y[1]];
            let jac = self.jacobian(xi);
            // xi += J^{-1} r, and J^{-1} = inv_t^T
            let d = [
                jac.inv_t[0][0] * r[0] + jac.inv_t[1][0] * r[1],
                jac.inv_t[0][1] * r[0] + jac.inv_t[1][1] * r[1],
            ];
            xi[0] += d[0];
            xi[1] += d[1];
            if d[0].abs() + d[1].abs() < 1e-15 {
                break;
            }
        }
        xi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilinear_inverse_roundtrip() {
        let g = CellGeometry::new(CellKind::Quadrilateral, &[[0.0, 0.0], [2.0, 0.1], [2.3, 1.7], [-0.2, 1.1]]);
        for xi in [[0.1, 0.2], [0.9, 0.5], [0.5, 0.99]] {
            let back = g.inverse_map(g.map(xi));
            assert!((back[0] - xi[0]).abs() < 1e-13 && (back[1] - xi[1]).abs() < 1e-13);
        }
    }

    #[test]
    fn triangle_jacobian_determinant_is_twice_area() {
        let g = CellGeometry::new(CellKind::Triangle, &[[1.0, 1.0], [3.0, 1.0], [1.0, 4.0]]);
        let j = g.jacobian([0.2, 0.3]);
        assert!((j.det - 6.0).abs() < 1e-14);
        let grad = j.map_gradient([1.0, 0.0]);
        assert!((grad[0] - 0.5).abs() < 1e-15 && grad[1].abs() < 1e-15);
    }
}
