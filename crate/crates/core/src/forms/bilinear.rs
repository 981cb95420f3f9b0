use super::{facet_degree, volume_degree};
use crate::mesh::FacetTopology;
use crate::quadrature::{cell_rule, interval_rule};
use crate::spaces::{FacetValues, FeSpace};
use crate::sparse::{SparseMatrix, TripletBuilder};

/// Jump sign and average weight of side `s` of a facet with `nsides` sides.
#[inline]
pub(crate) fn side_weights(s: usize, nsides: usize) -> (f64, f64) {
    let sign = if s == 0 { 1.0 } else { -1.0 };
    let avg = if nsides == 2 { 0.5 } else { 1.0 };
    (sign, avg)
}

/// Global dofs of all sides of a facet, concatenated plus first.
pub(crate) fn facet_dofs(space: &FeSpace, fv: &FacetValues) -> Vec<usize> {
    fv.sides.iter().flat_map(|s| space.cell_dofs(s.cell).iter().copied()).collect()
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Cell loop over a vector space with a kernel filling the local
/// `nl x nl` block from cell values.
fn assemble_cells(space: &FeSpace, degree: usize, mut kernel: impl FnMut(&crate::spaces::CellValues, &mut [f64])) -> TripletBuilder {
    let n = space.dim();
    let nl = space.local_dim();
    let rule = cell_rule(space.mesh().kind(), degree);
    let mut tb = TripletBuilder::new(n, n);
    let mut block = vec![0.0; nl * nl];
    for c in 0..space.mesh().num_cells() {
        let cv = space.cell_values(c, &rule);
        block.iter_mut().for_each(|v| *v = 0.0);
        kernel(&cv, &mut block);
        let dofs = space.cell_dofs(c);
        tb.add_block(dofs, dofs, &block);
    }
    tb
}

/// `sum_K int_K grad w : grad v` for a vector space.
fn add_broken_gradient(space: &FeSpace, cv: &crate::spaces::CellValues, block: &mut [f64], scale: f64) {
    let ns = cv.ns;
    let nl = space.local_dim();
    for q in 0..cv.num_points() {
        let w = cv.jxw[q] * scale;
        for i in 0..ns {
            let gi = cv.grad(q, i);
            for j in 0..ns {
                let v = w * dot(gi, cv.grad(q, j));
                for c in 0..space.components() {
                    block[(c * ns + i) * nl + c * ns + j] += v;
                }
            }
        }
    }
}

/// Broken vector Laplacian `sum_K int_K grad w : grad v` without facet terms.
pub fn assemble_broken_laplacian(space: &FeSpace) -> SparseMatrix {
    let deg = volume_degree(space.degree());
    assemble_cells(space, deg, |cv, block| add_broken_gradient(space, cv, block, 1.0)).build()
}

/// Adds facet terms of the SIP form (`consistency = true`) or only the jump
/// penalty `sigma / h_F [[w]].[[v]]` (`consistency = false`).
fn add_sip_facets(space: &FeSpace, topo: &FacetTopology, sigma: f64, consistency: bool, tb: &mut TripletBuilder) {
    let rule = interval_rule(facet_degree(space.degree()));
    let ns = space.scalar_local_dim();
    let ncomp = space.components();
    let nl = space.local_dim();
    for f in 0..topo.num_facets() {
        let fv = space.facet_values(topo, f, &rule);
        let nsides = fv.sides.len();
        let nt = nsides * nl;
        let mut block = vec![0.0; nt * nt];
        let pen = sigma / fv.length;
        for q in 0..rule.len() {
            let ds = fv.ds[q];
            for s in 0..nsides {
                let (sg_s, av_s) = side_weights(s, nsides);
                let side_s = &fv.sides[s];
                for t in 0..nsides {
                    let (sg_t, av_t) = side_weights(t, nsides);
                    let side_t = &fv.sides[t];
                    for i in 0..ns {
                        let vi = side_s.value(q, i);
                        let dni = dot(side_s.grad(q, i), fv.normal);
                        for j in 0..ns {
                            let vj = side_t.value(q, j);
                            let mut e = pen * sg_s * sg_t * vi * vj;
                            if consistency {
                                let dnj = dot(side_t.grad(q, j), fv.normal);
                                e -= av_t * dnj * sg_s * vi + av_s * dni * sg_t * vj;
                            }
                            let e = ds * e;
                            for c in 0..ncomp {
                                block[(s * nl + c * ns + i) * nt + t * nl + c * ns + j] += e;
                            }
                        }
                    }
                }
            }
        }
        let dofs = facet_dofs(space, &fv);
        tb.add_block(&dofs, &dofs, &block);
    }
}

/// Symmetric interior penalty form
/// `sum_K (grad w, grad v)_K + sum_F sigma/h_F ([[w]], [[v]])_F
///  - sum_F ({{grad w}} n_F, [[v]])_F - sum_F ({{grad v}} n_F, [[w]])_F`.
pub fn assemble_sip(space: &FeSpace, topo: &FacetTopology, sigma: f64) -> SparseMatrix {
    let deg = volume_degree(space.degree());
    let mut tb = assemble_cells(space, deg, |cv, block| add_broken_gradient(space, cv, block, 1.0));
    add_sip_facets(space, topo, sigma, true, &mut tb);
    tb.build()
}

/// Matrix of the discrete energy norm
/// `||v||_e^2 = sum_K |v|_{1,K}^2 + sum_F sigma/h_F ||[[v]]||_F^2`.
pub fn assemble_energy_matrix(space: &FeSpace, topo: &FacetTopology, sigma: f64) -> SparseMatrix {
    let deg = volume_degree(space.degree());
    let mut tb = assemble_cells(space, deg, |cv, block| add_broken_gradient(space, cv, block, 1.0));
    add_sip_facets(space, topo, sigma, false, &mut tb);
    tb.build()
}

/// Pressure-velocity coupling
/// `b_h(w, q) = -sum_K (q, div w)_K + sum_F ({{q}}, [[w]].n_F)_F`,
/// with rows indexed by pressure dofs. `facet_terms = false` gives the
/// broken form `-sum_K (q, div w)_K`.
pub fn assemble_bh(v: &FeSpace, p: &FeSpace, topo: &FacetTopology, facet_terms: bool) -> SparseMatrix {
    let nsv = v.scalar_local_dim();
    let nsp = p.scalar_local_dim();
    let nlv = v.local_dim();
    let mut tb = TripletBuilder::new(p.dim(), v.dim());
    let rule = cell_rule(v.mesh().kind(), volume_degree(v.degree()));
    let mut block = vec![0.0; nsp * nlv];
    for c in 0..v.mesh().num_cells() {
        let cv = v.cell_values(c, &rule);
        let cp = p.cell_values(c, &rule);
        block.iter_mut().for_each(|x| *x = 0.0);
        for q in 0..cv.num_points() {
            let w = cv.jxw[q];
            for i in 0..nsp {
                let qi = cp.value(q, i);
                for j in 0..nsv {
                    let g = cv.grad(q, j);
                    for comp in 0..2 {
                        block[i * nlv + comp * nsv + j] -= w * qi * g[comp];
                    }
                }
            }
        }
        tb.add_block(p.cell_dofs(c), v.cell_dofs(c), &block);
    }
    if facet_terms {
        let rule = interval_rule(facet_degree(v.degree()));
        for f in 0..topo.num_facets() {
            let fv = v.facet_values(topo, f, &rule);
            let fp = p.facet_values(topo, f, &rule);
            let nsides = fv.sides.len();
            let mut block = vec![0.0; nsides * nsp * nsides * nlv];
            let ncol = nsides * nlv;
            for q in 0..rule.len() {
                let ds = fv.ds[q];
                for s in 0..nsides {
                    let (_, av_s) = side_weights(s, nsides);
                    for t in 0..nsides {
                        let (sg_t, _) = side_weights(t, nsides);
                        for i in 0..nsp {
                            let qi = fp.sides[s].value(q, i);
                            for j in 0..nsv {
                                let vj = fv.sides[t].value(q, j);
                                let e = ds * av_s * qi * sg_t * vj;
                                for comp in 0..2 {
                                    block[(s * nsp + i) * ncol + t * nlv + comp * nsv + j] += e * fv.normal[comp];
                                }
                            }
                        }
                    }
                }
            }
            tb.add_block(&facet_dofs(p, &fp), &facet_dofs(v, &fv), &block);
        }
    }
    tb.build()
}

/// Mass-flux penalty `sum_F 1/h_F ([[w]].n_F, [[v]].n_F)_F` over all facets.
pub fn assemble_jh_flux(space: &FeSpace, topo: &FacetTopology) -> SparseMatrix {
    let rule = interval_rule(facet_degree(space.degree()));
    let ns = space.scalar_local_dim();
    let nl = space.local_dim();
    let mut tb = TripletBuilder::new(space.dim(), space.dim());
    for f in 0..topo.num_facets() {
        let fv = space.facet_values(topo, f, &rule);
        let nsides = fv.sides.len();
        let nt = nsides * nl;
        let n = fv.normal;
        let mut block = vec![0.0; nt * nt];
        for q in 0..rule.len() {
            let w = fv.ds[q] / fv.length;
            for s in 0..nsides {
                let (sg_s, _) = side_weights(s, nsides);
                for t in 0..nsides {
                    let (sg_t, _) = side_weights(t, nsides);
                    for i in 0..ns {
                        let vi = sg_s * fv.sides[s].value(q, i);
                        for j in 0..ns {
                            let vj = sg_t * fv.sides[t].value(q, j);
                            let e = w * vi * vj;
                            for c in 0..2 {
                                for d in 0..2 {
                                    block[(s * nl + c * ns + i) * nt + t * nl + d * ns + j] += e * n[c] * n[d];
                                }
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

/// Broken grad-div form `sum_K (div w, div v)_K`.
pub fn assemble_graddiv(space: &FeSpace) -> SparseMatrix {
    let ns = space.scalar_local_dim();
    let nl = space.local_dim();
    let deg = volume_degree(space.degree());
    assemble_cells(space, deg, |cv, block| {
        for q in 0..cv.num_points() {
            let w = cv.jxw[q];
            for i in 0..ns {
                let gi = cv.grad(q, i);
                for j in 0..ns {
                    let gj = cv.grad(q, j);
                    for c in 0..2 {
                        for d in 0..2 {
                            block[(c * ns + i) * nl + d * ns + j] += w * gi[c] * gj[d];
                        }
                    }
                }
            }
        }
    })
    .build()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::mesh::{build_facet_topology, build_structured_quad_mesh, build_structured_triangle_mesh, BoundingBox, Mesh};
    use crate::spaces::{build_space, l2_project_scalar_cellwise, Family, SpaceConfig};

    fn quad_setup(n: usize, k: usize) -> (Arc<Mesh>, FacetTopology, FeSpace, FeSpace) {
        let mesh = Arc::new(build_structured_quad_mesh(n, BoundingBox::unit_square()).unwrap());
        let topo = build_facet_topology(&mesh).unwrap();
        let v = build_space(&mesh, SpaceConfig::new(Family::QkDcVector, k)).unwrap();
        let p = build_space(&mesh, SpaceConfig::new(Family::QkDcScalar, k - 1)).unwrap();
        (mesh, topo, v, p)
    }

    fn tri_setup(n: usize, k: usize) -> (Arc<Mesh>, FacetTopology, FeSpace, FeSpace) {
        let mesh = Arc::new(build_structured_triangle_mesh(n, BoundingBox::unit_square()).unwrap());
        let topo = build_facet_topology(&mesh).unwrap();
        let v = build_space(&mesh, SpaceConfig::new(Family::PkDcVector, k)).unwrap();
        let p = build_space(&mesh, SpaceConfig::new(Family::PkDcScalar, k - 1)).unwrap();
        (mesh, topo, v, p)
    }

    /// Coefficients of a vector field given cellwise (exact for members).
    fn vector_field(v: &FeSpace, f: impl Fn(usize, [f64; 2]) -> [f64; 2]) -> Vec<f64> {
        let scalar = build_space(v.mesh(), SpaceConfig::new(Family::dg_scalar(v.mesh().kind()), v.degree())).unwrap();
        let cx = l2_project_scalar_cellwise(&scalar, |c, x| f(c, x)[0]).unwrap();
        let cy = l2_project_scalar_cellwise(&scalar, |c, x| f(c, x)[1]).unwrap();
        let ns = v.scalar_local_dim();
        let mut out = vec![0.0; v.dim()];
        for c in 0..v.mesh().num_cells() {
            let vd = v.cell_dofs(c);
            let sd = scalar.cell_dofs(c);
            for i in 0..ns {
                out[vd[i]] = cx[sd[i]];
                out[vd[ns + i]] = cy[sd[i]];
            }
        }
        out
    }

    fn scalar_field(p: &FeSpace, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        l2_project_scalar_cellwise(p, |_, x| f(x)).unwrap()
    }

    #[test]
    fn sip_constant_on_single_quad() {
        let (_, topo, v, _) = quad_setup(1, 1);
        let sigma = 4.0;
        let a = assemble_sip(&v, &topo, sigma);
        let w = vector_field(&v, |_, _| [1.0, 0.0]);
        assert!((a.bilinear(&w, &w) - 4.0 * sigma).abs() < 1e-12);
    }

    #[test]
    fn sip_continuous_field_has_no_interior_contribution() {
        let (_, topo, v, _) = tri_setup(3, 2);
        let sigma = 16.0;
        let w = vector_field(&v, |_, x| [x[0] * x[1], x[0] - x[1] * x[1]]);
        let full = assemble_sip(&v, &topo, sigma).bilinear(&w, &w);
        // boundary facet terms evaluated directly
        let rule = interval_rule(5);
        let ns = v.scalar_local_dim();
        let mut boundary = 0.0;
        for &f in &topo.boundary_facets {
            let fv = v.facet_values(&topo, f, &rule);
            let side = &fv.sides[0];
            let (val, grad) = (0..rule.len())
                .map(|q| v.combine(&w, side.cell, &side.values[q * ns..], &side.grads[q * ns..]))
                .unzip::<_, _, Vec<_>, Vec<_>>();
            for q in 0..rule.len() {
                let u = &val[q];
                let g = &grad[q];
                let dn = [dot(g[0], fv.normal), dot(g[1], fv.normal)];
                boundary += fv.ds[q] * (sigma / fv.length * (u[0] * u[0] + u[1] * u[1]) - 2.0 * (dn[0] * u[0] + dn[1] * u[1]));
            }
        }
        let grad = assemble_broken_laplacian(&v).bilinear(&w, &w);
        assert!((full - grad - boundary).abs() < 1e-11 * full.abs());
    }

    #[test]
    fn sip_symmetric() {
        let (_, topo, v, _) = tri_setup(3, 3);
        let a = assemble_sip(&v, &topo, 36.0);
        assert!(a.symmetry_defect() <= 1e-12 * a.max_abs());
    }

    #[test]
    fn bh_divergence_theorem_on_single_quad() {
        let (_, topo, v, p) = quad_setup(1, 1);
        let b = assemble_bh(&v, &p, &topo, true);
        let w = vector_field(&v, |_, x| x);
        let q = scalar_field(&p, |_| 1.0);
        assert!(b.bilinear(&q, &w).abs() < 1e-13);
        let broken = assemble_bh(&v, &p, &topo, false);
        assert!((broken.bilinear(&q, &w) + 2.0).abs() < 1e-13);
    }

    #[test]
    fn bh_constant_field_closed_boundary() {
        let (_, topo, v, p) = tri_setup(1, 1);
        let b = assemble_bh(&v, &p, &topo, true);
        let w = vector_field(&v, |_, _| [0.3, -1.7]);
        let q = scalar_field(&p, |_| 1.0);
        assert!(b.bilinear(&q, &w).abs() < 1e-13);
    }

    #[test]
    fn bh_constant_pressure_in_kernel() {
        let (_, topo, v, p) = tri_setup(3, 2);
        let b = assemble_bh(&v, &p, &topo, true);
        let q = scalar_field(&p, |_| 1.0);
        let bt = b.transpose_matvec(&q);
        assert!(bt.iter().all(|x| x.abs() < 1e-13));
    }

    #[test]
    fn jh_examples() {
        let (_, topo, v, _) = quad_setup(1, 1);
        let j = assemble_jh_flux(&v, &topo);
        let w = vector_field(&v, |_, _| [1.0, 1.0]);
        assert!((j.bilinear(&w, &w) - 4.0).abs() < 1e-13);

        let mesh = Arc::new(
            Mesh::new(
                vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 1.0]],
                vec![vec![0, 1, 4, 3], vec![1, 2, 5, 4]],
                crate::mesh::CellKind::Quadrilateral,
            )
            .unwrap(),
        );
        let topo = build_facet_topology(&mesh).unwrap();
        let v = build_space(&mesh, SpaceConfig::new(Family::QkDcVector, 1)).unwrap();
        let w = vector_field(&v, |c, _| if c == 0 { [1.0, 0.0] } else { [0.0, 0.0] });
        assert!((assemble_jh_flux(&v, &topo).bilinear(&w, &w) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn graddiv_examples() {
        let (_, _, v, _) = quad_setup(1, 1);
        let g = assemble_graddiv(&v);
        let w = vector_field(&v, |_, x| x);
        assert!((g.bilinear(&w, &w) - 4.0).abs() < 1e-13);
        let rot = vector_field(&v, |_, x| [-x[1], x[0]]);
        assert!(g.bilinear(&rot, &rot).abs() < 1e-13);
        assert!(g.symmetry_defect() < 1e-14);
    }

    #[test]
    fn forms_invariant_under_facet_flip() {
        let (_, topo, v, p) = tri_setup(3, 2);
        let flipped = topo.flipped();
        for (a, b) in [
            (assemble_sip(&v, &topo, 16.0), assemble_sip(&v, &flipped, 16.0)),
            (assemble_jh_flux(&v, &topo), assemble_jh_flux(&v, &flipped)),
            (assemble_bh(&v, &p, &topo, true), assemble_bh(&v, &p, &flipped, true)),
        ] {
            let diff = a.add_scaled(&b, -1.0);
            assert!(diff.max_abs() <= 1e-13 * a.max_abs());
        }
    }
}
