use super::{data_degree, volume_degree, StabilizationParams};
use crate::mesh::FacetTopology;
use crate::quadrature::{cell_rule, interval_rule};
use crate::spaces::FeSpace;

/// Load vector `(f, v)` with quadrature raised for non-polynomial data.
pub fn assemble_load(space: &FeSpace, f: impl Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
    let ns = space.scalar_local_dim();
    let rule = cell_rule(space.mesh().kind(), data_degree(space.degree()));
    let mut out = vec![0.0; space.dim()];
    for c in 0..space.mesh().num_cells() {
        let cv = space.cell_values(c, &rule);
        let dofs = space.cell_dofs(c);
        for q in 0..cv.num_points() {
            let fx = f(cv.points[q]);
            for i in 0..ns {
                let w = cv.jxw[q] * cv.value(q, i);
                for comp in 0..2 {
                    out[dofs[comp * ns + i]] += w * fx[comp];
                }
            }
        }
    }
    out
}

/// Right-hand sides of weakly imposed Dirichlet data `g`:
/// `rhs_u = nu (sum_bd sigma/h_F (g, v)_F - (g, grad v n)_F)
///        + gamma sum_bd 1/h_F (g.n, v.n)_F`,
/// `rhs_p = sum_bd (q, g.n)_F`.
pub fn assemble_weak_dirichlet(
    v: &FeSpace,
    p: &FeSpace,
    topo: &FacetTopology,
    params: &StabilizationParams,
    g: impl Fn([f64; 2]) -> [f64; 2],
) -> (Vec<f64>, Vec<f64>) {
    let nsv = v.scalar_local_dim();
    let nsp = p.scalar_local_dim();
    let rule = interval_rule(data_degree(v.degree()));
    let mut rhs_u = vec![0.0; v.dim()];
    let mut rhs_p = vec![0.0; p.dim()];
    for &f in &topo.boundary_facets {
        let fv = v.facet_values(topo, f, &rule);
        let fp = p.facet_values(topo, f, &rule);
        let n = fv.normal;
        let h = fv.length;
        let sv = &fv.sides[0];
        let sp = &fp.sides[0];
        let vd = v.cell_dofs(sv.cell);
        let pd = p.cell_dofs(sp.cell);
        for q in 0..rule.len() {
            let gx = g(fv.points[q]);
            let gn = gx[0] * n[0] + gx[1] * n[1];
            let ds = fv.ds[q];
            for i in 0..nsv {
                let phi = sv.value(q, i);
                let gr = sv.grad(q, i);
                let dn = gr[0] * n[0] + gr[1] * n[1];
                for comp in 0..2 {
                    let sip = params.nu * (params.sigma / h * gx[comp] * phi - gx[comp] * dn);
                    let flux = params.gamma / h * gn * phi * n[comp];
                    rhs_u[vd[comp * nsv + i]] += ds * (sip + flux);
                }
            }
            for i in 0..nsp {
                rhs_p[pd[i]] += ds * sp.value(q, i) * gn;
            }
        }
    }
    (rhs_u, rhs_p)
}

/// Pressure mean functional `m_i = int_Omega q_i`.
pub fn assemble_pressure_mean(space: &FeSpace) -> Vec<f64> {
    let ns = space.scalar_local_dim();
    let rule = cell_rule(space.mesh().kind(), volume_degree(space.degree()));
    let mut out = vec![0.0; space.dim()];
    for c in 0..space.mesh().num_cells() {
        let cv = space.cell_values(c, &rule);
        let dofs = space.cell_dofs(c);
        for q in 0..cv.num_points() {
            for i in 0..ns {
                out[dofs[i]] += cv.jxw[q] * cv.value(q, i);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::mesh::{build_facet_topology, build_structured_quad_mesh, build_structured_triangle_mesh, BoundingBox};
    use crate::spaces::{build_space, l2_project_pressure, Family, SpaceConfig};

    #[test]
    fn load_examples() {
        let mesh = Arc::new(build_structured_quad_mesh(1, BoundingBox::unit_square()).unwrap());
        let v = build_space(&mesh, SpaceConfig::new(Family::QkDcVector, 0)).unwrap();
        assert!(assemble_load(&v, |_| [0.0, 0.0]).iter().all(|&x| x == 0.0));
        let l = assemble_load(&v, |_| [0.0, 1.0]);
        // the constant reference function on the unit square is 1
        assert!(l[0].abs() < 1e-15 && (l[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn boundary_flux_of_unit_normal() {
        let mesh = Arc::new(build_structured_triangle_mesh(2, BoundingBox::unit_square()).unwrap());
        let topo = build_facet_topology(&mesh).unwrap();
        let v = build_space(&mesh, SpaceConfig::new(Family::PkDcVector, 2)).unwrap();
        let p = build_space(&mesh, SpaceConfig::new(Family::PkDcScalar, 1)).unwrap();
        let params = StabilizationParams::new(1.0, 2).with_gamma(3.0);
        let (ru, rp) = assemble_weak_dirichlet(&v, &p, &topo, &params, |_| [0.0, 0.0]);
        assert!(ru.iter().chain(&rp).all(|&x| x == 0.0));

        // g = outward unit normal of the unit square, evaluated from position
        let normal = |x: [f64; 2]| {
            if x[0] < 1e-12 {
                [-1.0, 0.0]
            } else if x[0] > 1.0 - 1e-12 {
                [1.0, 0.0]
            } else if x[1] < 1e-12 {
                [0.0, -1.0]
            } else {
                [0.0, 1.0]
            }
        };
        let (_, rp) = assemble_weak_dirichlet(&v, &p, &topo, &params, normal);
        let one = l2_project_pressure(&p, |_| 1.0).unwrap();
        let total: f64 = rp.iter().zip(&one).map(|(a, b)| a * b).sum();
        assert!((total - 4.0).abs() < 1e-13);
    }

    #[test]
    fn mean_functional() {
        let mesh = Arc::new(build_structured_triangle_mesh(3, BoundingBox::unit_square()).unwrap());
        let p0 = build_space(&mesh, SpaceConfig::new(Family::P0Scalar, 0)).unwrap();
        let m = assemble_pressure_mean(&p0);
        // P0 basis is sqrt(2) on the reference triangle
        for c in 0..mesh.num_cells() {
            assert!((m[c] - 2f64.sqrt() * mesh.signed_area(c)).abs() < 1e-15);
        }
        let p2 = build_space(&mesh, SpaceConfig::new(Family::PkDcScalar, 2)).unwrap();
        let m = assemble_pressure_mean(&p2);
        for c in 0..mesh.num_cells() {
            let d = p2.cell_dofs(c);
            assert!(m[d[0]] > 0.0);
            assert!(d[1..].iter().all(|&i| m[i].abs() < 1e-15));
        }
    }
}
