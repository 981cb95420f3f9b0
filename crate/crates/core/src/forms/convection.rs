use super::bilinear::{facet_dofs, side_weights};
use crate::mesh::FacetTopology;
use crate::quadrature::{cell_rule, interval_rule};
use crate::spaces::FeSpace;
use crate::sparse::{SparseMatrix, TripletBuilder};

/// Upwind convection form with advecting velocity `w`:
/// `sum_K ((w.grad) u, v)_K - sum_{F interior} ({{w}}.n_F [[u]], {{v}})_F
///  + sum_{F interior} (1/2 |{{w}}.n_F| [[u]], [[v]])_F`.
pub fn assemble_convection_upwind(space: &FeSpace, topo: &FacetTopology, w: &[f64]) -> SparseMatrix {
    let k = space.degree();
    let ns = space.scalar_local_dim();
    let nl = space.local_dim();
    let mut tb = TripletBuilder::new(space.dim(), space.dim());

    let rule = cell_rule(space.mesh().kind(), 3 * k.max(1));
    let mut block = vec![0.0; nl * nl];
    for c in 0..space.mesh().num_cells() {
        let cv = space.cell_values(c, &rule);
        block.iter_mut().for_each(|x| *x = 0.0);
        for q in 0..cv.num_points() {
            let (wv, _) = space.combine(w, c, &cv.values[q * ns..(q + 1) * ns], &cv.grads[q * ns..(q + 1) * ns]);
            let jxw = cv.jxw[q];
            for j in 0..ns {
                let g = cv.grad(q, j);
                let adv = jxw * (wv[0] * g[0] + wv[1] * g[1]);
                for i in 0..ns {
                    let e = adv * cv.value(q, i);
                    for comp in 0..2 {
                        block[(comp * ns + i) * nl + comp * ns + j] += e;
                    }
                }
            }
        }
        let dofs = space.cell_dofs(c);
        tb.add_block(dofs, dofs, &block);
    }

    let rule = interval_rule(3 * k.max(1) + 1);
    for &f in &topo.interior_facets {
        let fv = space.facet_values(topo, f, &rule);
        let nt = 2 * nl;
        let mut block = vec![0.0; nt * nt];
        for q in 0..rule.len() {
            let mut wavg = [0.0; 2];
            for side in &fv.sides {
                let (wv, _) = space.combine(w, side.cell, &side.values[q * ns..(q + 1) * ns], &side.grads[q * ns..(q + 1) * ns]);
                wavg[0] += 0.5 * wv[0];
                wavg[1] += 0.5 * wv[1];
            }
            let wn = wavg[0] * fv.normal[0] + wavg[1] * fv.normal[1];
            let ds = fv.ds[q];
            for s in 0..2 {
                let (sg_s, av_s) = side_weights(s, 2);
                for t in 0..2 {
                    let (sg_t, _) = side_weights(t, 2);
                    for i in 0..ns {
                        let vi = fv.sides[s].value(q, i);
                        for j in 0..ns {
                            let uj = sg_t * fv.sides[t].value(q, j);
                            let e = ds * uj * vi * (-wn * av_s + 0.5 * wn.abs() * sg_s);
                            for comp in 0..2 {
                                block[(s * nl + comp * ns + i) * nt + t * nl + comp * ns + j] += e;
                            }
                        }
                    }
                }
            }
        }
        let dofs = facet_dofs(space, &fv);
        tb.add_block(&dofs, &dofs, &block);
    }
    tb.build()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::mesh::{build_facet_topology, build_structured_triangle_mesh, BoundingBox};
    use crate::spaces::{build_space, Family, SpaceConfig};

    fn setup(n: usize, k: usize) -> (FacetTopology, FeSpace) {
        let mesh = Arc::new(build_structured_triangle_mesh(n, BoundingBox::unit_square()).unwrap());
        let topo = build_facet_topology(&mesh).unwrap();
        let v = build_space(&mesh, SpaceConfig::new(Family::PkDcVector, k)).unwrap();
        (topo, v)
    }

    fn constant(v: &FeSpace, c: [f64; 2]) -> Vec<f64> {
        let ns = v.scalar_local_dim();
        let mut out = vec![0.0; v.dim()];
        for cell in 0..v.mesh().num_cells() {
            let d = v.cell_dofs(cell);
            out[d[0]] = c[0] / 2f64.sqrt();
            out[d[ns]] = c[1] / 2f64.sqrt();
        }
        out
    }

    #[test]
    fn zero_advection_gives_zero_operator() {
        let (topo, v) = setup(2, 2);
        let c = assemble_convection_upwind(&v, &topo, &vec![0.0; v.dim()]);
        assert_eq!(c.max_abs(), 0.0);
    }

    #[test]
    fn constant_fields_vanish() {
        let (topo, v) = setup(3, 2);
        let w = constant(&v, [0.7, -0.2]);
        let c = assemble_convection_upwind(&v, &topo, &w);
        assert!(c.bilinear(&w, &w).abs() < 1e-13);
    }

    #[test]
    fn energy_identity_for_constant_advection() {
        // c_h(w; u, u) = sum_int 1/2 |w.n| ||[[u]]||^2 + 1/2 oint_bd (w.n) |u|^2
        // for constant w, so the form is nonnegative up to boundary inflow
        let (topo, v) = setup(2, 2);
        let w = constant(&v, [1.0, 0.5]);
        let c = assemble_convection_upwind(&v, &topo, &w);
        let u: Vec<f64> = (0..v.dim()).map(|i| ((i * 37 % 11) as f64 - 5.0) / 5.0).collect();
        let ns = v.scalar_local_dim();
        let rule = interval_rule(8);
        let mut expected = 0.0;
        for f in 0..topo.num_facets() {
            let fv = v.facet_values(&topo, f, &rule);
            let wn = 1.0 * fv.normal[0] + 0.5 * fv.normal[1];
            for q in 0..rule.len() {
                let vals: Vec<Vec<f64>> = fv
                    .sides
                    .iter()
                    .map(|s| {
                        v.combine(&u, s.cell, &s.values[q * ns..(q + 1) * ns], &s.grads[q * ns..(q + 1) * ns])
                            .0
                    })
                    .collect();
                if vals.len() == 2 {
                    let j = [vals[0][0] - vals[1][0], vals[0][1] - vals[1][1]];
                    expected += fv.ds[q] * 0.5 * wn.abs() * (j[0] * j[0] + j[1] * j[1]);
                } else {
                    expected += fv.ds[q] * 0.5 * wn * (vals[0][0].powi(2) + vals[0][1].powi(2));
                }
            }
        }
        let got = c.bilinear(&u, &u);
        assert!((got - expected).abs() < 1e-11 * expected.abs().max(1.0), "{got} vs {expected}");
    }
}
