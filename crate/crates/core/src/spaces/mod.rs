//! Finite element spaces: discontinuous modal `P_k`/`Q_k`, Crouzeix-Raviart,
//! and the normal-continuity machinery that carves the BDM subspace out of
//! the discontinuous `P_k` vector space.

mod basis;
mod bdm;
mod constraints;
mod projection;

use std::sync::Arc;

pub use basis::{modal_dim, ModalBasis};
pub use bdm::{interpolate_bdm, interpolate_bdm_cellwise};
pub use constraints::{build_normal_constraints, FacetConstraintBlock, NormalContinuityConstraints};
pub use projection::{l2_project_pressure, l2_project_scalar_cellwise};

use crate::error::{Error, Result};
use crate::mesh::{build_facet_topology, CellKind, Facet, FacetSide, FacetTopology, Mesh};
use crate::quadrature::QuadratureRule;

/// Highest supported polynomial degree.
pub const MAX_DEGREE: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    PkDcVector,
    PkDcScalar,
    QkDcVector,
    QkDcScalar,
    CrVector,
    P0Scalar,
}

impl Family {
    pub fn components(self) -> usize {
        match self {
            Family::PkDcVector | Family::QkDcVector | Family::CrVector => 2,
            Family::PkDcScalar | Family::QkDcScalar | Family::P0Scalar => 1,
        }
    }

    fn cell_kind_ok(self, kind: CellKind) -> bool {
        match self {
            Family::PkDcVector | Family::PkDcScalar | Family::CrVector => kind == CellKind::Triangle,
            Family::QkDcVector | Family::QkDcScalar => kind == CellKind::Quadrilateral,
            Family::P0Scalar => true,
        }
    }

    /// Discontinuous velocity family natural to a cell kind.
    pub fn dg_vector(kind: CellKind) -> Family {
        match kind {
            CellKind::Triangle => Family::PkDcVector,
            CellKind::Quadrilateral => Family::QkDcVector,
        }
    }

    /// Discontinuous pressure family natural to a cell kind.
    pub fn dg_scalar(kind: CellKind) -> Family {
        match kind {
            CellKind::Triangle => Family::PkDcScalar,
            CellKind::Quadrilateral => Family::QkDcScalar,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpaceConfig {
    pub family: Family,
    pub degree: usize,
}

impl SpaceConfig {
    pub fn new(family: Family, degree: usize) -> Self {
        SpaceConfig { family, degree }
    }
}

#[derive(Clone, Debug)]
enum ScalarBasis {
    Modal(ModalBasis),
    CrouzeixRaviart,
}

/// A finite element space on a fixed mesh.
///
/// Local dofs of a vector space are component-major: the first
/// `scalar_local_dim()` entries of `cell_dofs(c)` belong to the x-component.
#[derive(Clone, Debug)]
pub struct FeSpace {
    config: SpaceConfig,
    mesh: Arc<Mesh>,
    basis: ScalarBasis,
    scalar_local_dim: usize,
    dof_map: Vec<usize>,
    dim: usize,
}

/// Scalar basis data of one cell at a set of quadrature points.
#[derive(Clone, Debug, Default)]
pub struct CellValues {
    pub ns: usize,
    pub points: Vec<[f64; 2]>,
    /// quadrature weight times |det J|
    pub jxw: Vec<f64>,
    /// `values[q * ns + i]`
    pub values: Vec<f64>,
    /// physical gradients, same layout as `values`
    pub grads: Vec<[f64; 2]>,
}

impl CellValues {
    pub fn num_points(&self) -> usize {
        self.jxw.len()
    }

    pub fn value(&self, q: usize, i: usize) -> f64 {
        self.values[q * self.ns + i]
    }

    pub fn grad(&self, q: usize, i: usize) -> [f64; 2] {
        self.grads[q * self.ns + i]
    }
}

/// Basis traces of the cells adjacent to one facet at facet quadrature points.
#[derive(Clone, Debug)]
pub struct FacetValues {
    pub points: Vec<[f64; 2]>,
    /// quadrature weight times facet length
    pub ds: Vec<f64>,
    pub normal: [f64; 2],
    pub length: f64,
    /// plus side first
    pub sides: Vec<SideValues>,
}

#[derive(Clone, Debug)]
pub struct SideValues {
    pub cell: usize,
    pub ns: usize,
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
}

impl SideValues {
    pub fn value(&self, q: usize, i: usize) -> f64 {
        self.values[q * self.ns + i]
    }

    pub fn grad(&self, q: usize, i: usize) -> [f64; 2] {
        self.grads[q * self.ns + i]
    }
}

/// Values and physical gradients of the scalar basis at reference points.
#[derive(Clone, Debug)]
pub struct BasisValues {
    pub ns: usize,
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
}

/// Builds a space on `mesh`.
pub fn build_space(mesh: &Arc<Mesh>, config: SpaceConfig) -> Result<FeSpace> {
    let kind = mesh.kind();
    if !config.family.cell_kind_ok(kind) {
        return Err(Error::invalid(format!(
            "family {:?} is not available on {kind:?} meshes",
            config.family
        )));
    }
    if config.degree > MAX_DEGREE {
        return Err(Error::invalid(format!(
            "degree {} exceeds the supported maximum {MAX_DEGREE}",
            config.degree
        )));
    }
    let ncomp = config.family.components();
    let ncells = mesh.num_cells();
    let (basis, ns, dof_map, dim) = match config.family {
        Family::CrVector => {
            if config.degree != 1 {
                return Err(Error::invalid("Crouzeix-Raviart elements have degree 1"));
            }
            let topo = build_facet_topology(mesh)?;
            let mut map = Vec::with_capacity(ncells * 6);
            for c in 0..ncells {
                let facets = topo.cell_facets(c);
                for comp in 0..2 {
                    map.extend(facets.iter().map(|f| 2 * f + comp));
                }
            }
            (ScalarBasis::CrouzeixRaviart, 3, map, 2 * topo.num_facets())
        }
        family => {
            let degree = if family == Family::P0Scalar { 0 } else { config.degree };
            let b = ModalBasis::new(kind, degree);
            let ns = b.dim();
            let local = ns * ncomp;
            let map: Vec<usize> = (0..ncells * local).collect();
            (ScalarBasis::Modal(b), ns, map, ncells * local)
        }
    };
    Ok(FeSpace {
        config,
        mesh: Arc::clone(mesh),
        basis,
        scalar_local_dim: ns,
        dof_map,
        dim,
    })
}

impl FeSpace {
    pub fn config(&self) -> SpaceConfig {
        self.config
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> usize {
        self.config.family.components()
    }

    pub fn degree(&self) -> usize {
        match self.config.family {
            Family::P0Scalar => 0,
            _ => self.config.degree,
        }
    }

    pub fn is_discontinuous(&self) -> bool {
        !matches!(self.basis, ScalarBasis::CrouzeixRaviart)
    }

    pub fn scalar_local_dim(&self) -> usize {
        self.scalar_local_dim
    }

    pub fn local_dim(&self) -> usize {
        self.scalar_local_dim * self.components()
    }

    pub fn cell_dofs(&self, c: usize) -> &[usize] {
        let n = self.local_dim();
        &self.dof_map[c * n..(c + 1) * n]
    }

    /// Scalar basis values and reference gradients at a reference point.
    pub fn eval_reference(&self, xi: [f64; 2], vals: &mut [f64], grads: &mut [[f64; 2]]) {
        match &self.basis {
            ScalarBasis::Modal(b) => b.eval(xi, vals, grads),
            ScalarBasis::CrouzeixRaviart => basis::crouzeix_raviart_eval(xi, vals, grads),
        }
    }

    /// Values and physical gradients of the scalar basis of `cell` at the
    /// given reference points.
    pub fn eval_basis(&self, cell: usize, points: &[[f64; 2]]) -> BasisValues {
        let ns = self.scalar_local_dim;
        let geom = self.mesh.geometry(cell);
        let mut values = vec![0.0; points.len() * ns];
        let mut grads = vec![[0.0; 2]; points.len() * ns];
        for (q, &xi) in points.iter().enumerate() {
            let v = &mut values[q * ns..(q + 1) * ns];
            let g = &mut grads[q * ns..(q + 1) * ns];
            self.eval_reference(xi, v, g);
            let jac = geom.jacobian(xi);
            for gi in g.iter_mut() {
                *gi = jac.map_gradient(*gi);
            }
        }
        BasisValues { ns, values, grads }
    }

    pub fn cell_values(&self, cell: usize, rule: &QuadratureRule) -> CellValues {
        let ns = self.scalar_local_dim;
        let geom = self.mesh.geometry(cell);
        let nq = rule.len();
        let mut out = CellValues {
            ns,
            points: Vec::with_capacity(nq),
            jxw: Vec::with_capacity(nq),
            values: vec![0.0; nq * ns],
            grads: vec![[0.0; 2]; nq * ns],
        };
        for (q, (xi, w)) in rule.iter().enumerate() {
            let jac = geom.jacobian(xi);
            out.points.push(geom.map(xi));
            out.jxw.push(w * jac.det.abs());
            let v = &mut out.values[q * ns..(q + 1) * ns];
            let g = &mut out.grads[q * ns..(q + 1) * ns];
            self.eval_reference(xi, v, g);
            for gi in g.iter_mut() {
                *gi = jac.map_gradient(*gi);
            }
        }
        out
    }

    fn side_values(&self, facet: &Facet, side: FacetSide, rule: &QuadratureRule) -> SideValues {
        let ns = self.scalar_local_dim;
        let geom = self.mesh.geometry(side.cell);
        let nq = rule.len();
        let mut values = vec![0.0; nq * ns];
        let mut grads = vec![[0.0; 2]; nq * ns];
        for (q, p) in rule.points.iter().enumerate() {
            let xi = facet.reference_point(&self.mesh, side, p[0]);
            let jac = geom.jacobian(xi);
            let v = &mut values[q * ns..(q + 1) * ns];
            let g = &mut grads[q * ns..(q + 1) * ns];
            self.eval_reference(xi, v, g);
            for gi in g.iter_mut() {
                *gi = jac.map_gradient(*gi);
            }
        }
        SideValues {
            cell: side.cell,
            ns,
            values,
            grads,
        }
    }

    /// Traces on facet `f` from the plus cell and (if interior) the minus cell.
    /// `rule` is an interval rule.
    pub fn facet_values(&self, topo: &FacetTopology, f: usize, rule: &QuadratureRule) -> FacetValues {
        let facet = &topo.facets[f];
        FacetValues {
            points: rule.points.iter().map(|p| facet.point(&self.mesh, p[0])).collect(),
            ds: rule.weights.iter().map(|w| w * facet.length).collect(),
            normal: facet.normal,
            length: facet.length,
            sides: facet.sides().map(|s| self.side_values(facet, s, rule)).collect(),
        }
    }

    /// Value and gradient of a discrete field at a reference point of `cell`.
    /// Returns `(value[comp], grad[comp])`.
    pub fn eval_field(&self, coeffs: &[f64], cell: usize, xi: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
        let b = self.eval_basis(cell, &[xi]);
        self.combine(coeffs, cell, &b.values, &b.grads)
    }

    /// Combines scalar basis data at one point with the cell's coefficients.
    pub fn combine(&self, coeffs: &[f64], cell: usize, values: &[f64], grads: &[[f64; 2]]) -> (Vec<f64>, Vec<[f64; 2]>) {
        let ns = self.scalar_local_dim;
        let dofs = self.cell_dofs(cell);
        let ncomp = self.components();
        let mut val = vec![0.0; ncomp];
        let mut grad = vec![[0.0; 2]; ncomp];
        for comp in 0..ncomp {
            for i in 0..ns {
                let c = coeffs[dofs[comp * ns + i]];
                val[comp] += c * values[i];
                grad[comp][0] += c * grads[i][0];
                grad[comp][1] += c * grads[i][1];
            }
        }
        (val, grad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_quad_mesh, build_structured_triangle_mesh, BoundingBox};

    fn tri(n: usize) -> Arc<Mesh> {
        Arc::new(build_structured_triangle_mesh(n, BoundingBox::unit_square()).unwrap())
    }

    fn quad(n: usize) -> Arc<Mesh> {
        Arc::new(build_structured_quad_mesh(n, BoundingBox::unit_square()).unwrap())
    }

    #[test]
    fn dimensions() {
        let v = build_space(&tri(32), SpaceConfig::new(Family::PkDcVector, 3)).unwrap();
        assert_eq!(v.dim(), 40960);
        let q = build_space(&quad(32), SpaceConfig::new(Family::QkDcScalar, 2)).unwrap();
        assert_eq!(q.dim(), 1024 * 9);
        let cr = build_space(&tri(1), SpaceConfig::new(Family::CrVector, 1)).unwrap();
        assert_eq!(cr.dim(), 10);
    }

    #[test]
    fn incompatible_family_rejected() {
        assert!(build_space(&quad(2), SpaceConfig::new(Family::PkDcVector, 1)).is_err());
        assert!(build_space(&tri(2), SpaceConfig::new(Family::QkDcScalar, 1)).is_err());
        assert!(build_space(&quad(2), SpaceConfig::new(Family::CrVector, 1)).is_err());
        assert!(build_space(&tri(2), SpaceConfig::new(Family::PkDcScalar, 7)).is_err());
    }

    /// L2-projects `f` onto the scalar space of one cell by solving with the
    /// reference Gram matrix (identity for the orthonormal basis).
    fn represent(space: &FeSpace, cell: usize, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        let rule = crate::quadrature::cell_rule(space.mesh().kind(), 8);
        let cv = space.cell_values(cell, &rule);
        (0..cv.ns)
            .map(|i| {
                (0..cv.num_points())
                    .map(|q| cv.jxw[q] * f(cv.points[q]) * cv.value(q, i))
                    .sum::<f64>()
            })
            .map(|c| c / space.mesh().signed_area(cell) * space.mesh().kind().reference_measure())
            .enumerate()
            .fold(vec![0.0; space.dim()], |mut out, (i, c)| {
                out[space.cell_dofs(cell)[i]] = c;
                out
            })
    }

    #[test]
    fn barycentric_functions_at_centroid() {
        // single reference triangle
        let mesh = Arc::new(Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![vec![0, 1, 2]], CellKind::Triangle).unwrap());
        let s = build_space(&mesh, SpaceConfig::new(Family::PkDcScalar, 1)).unwrap();
        let lambdas: [fn([f64; 2]) -> f64; 3] = [|p| 1.0 - p[0] - p[1], |p| p[0], |p| p[1]];
        for lam in lambdas {
            let c = represent(&s, 0, lam);
            let (v, g) = s.eval_field(&c, 0, [1.0 / 3.0, 1.0 / 3.0]);
            assert!((v[0] - 1.0 / 3.0).abs() < 1e-14);
            let _ = g;
        }
        // the sum is constant with zero gradient
        let c = represent(&s, 0, |_| 1.0);
        for p in [[0.1, 0.1], [0.7, 0.2]] {
            let (v, g) = s.eval_field(&c, 0, p);
            assert!((v[0] - 1.0).abs() < 1e-14);
            assert!(g[0][0].abs() < 1e-13 && g[0][1].abs() < 1e-13);
        }
    }

    #[test]
    fn bilinear_functions_on_unit_square() {
        let s = build_space(&quad(1), SpaceConfig::new(Family::QkDcScalar, 1)).unwrap();
        let nodal: [fn([f64; 2]) -> f64; 4] = [
            |p| (1.0 - p[0]) * (1.0 - p[1]),
            |p| p[0] * (1.0 - p[1]),
            |p| p[0] * p[1],
            |p| (1.0 - p[0]) * p[1],
        ];
        let expected = [0.1875, 0.0625, 0.1875, 0.5625];
        for (phi, e) in nodal.iter().zip(expected) {
            let c = represent(&s, 0, phi);
            let (v, _) = s.eval_field(&c, 0, [0.25, 0.75]);
            assert!((v[0] - e).abs() < 1e-14, "{} vs {e}", v[0]);
        }
    }

    #[test]
    fn physical_gradients_on_scaled_cell() {
        let s = build_space(&tri(4), SpaceConfig::new(Family::PkDcScalar, 2)).unwrap();
        let c = represent(&s, 5, |p| 3.0 * p[0] - 2.0 * p[1] + p[0] * p[1]);
        let xi = [0.2, 0.3];
        let x = s.mesh().geometry(5).map(xi);
        let (_, g) = s.eval_field(&c, 5, xi);
        assert!((g[0][0] - (3.0 + x[1])).abs() < 1e-12);
        assert!((g[0][1] - (-2.0 + x[0])).abs() < 1e-12);
    }
}
