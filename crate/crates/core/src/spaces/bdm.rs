use super::basis::ModalBasis;
use super::constraints::facet_moment_basis;
use super::FeSpace;
use crate::dense::lu_solve;
use crate::error::{Error, Result};
use crate::mesh::{CellKind, FacetSide, FacetTopology};
use crate::quadrature::{interval_rule, triangle_rule};

/// BDM interpolant of a smooth field into the normal-continuous subspace of a
/// discontinuous `P_k` vector space on triangles.
pub fn interpolate_bdm(space: &FeSpace, topo: &FacetTopology, u: impl Fn([f64; 2]) -> [f64; 2]) -> Result<Vec<f64>> {
    interpolate_bdm_cellwise(space, topo, |_, x| u(x))
}

/// BDM interpolant of a field given cell by cell, `u(cell, x)`. Facet moments
/// are taken from each cell's own trace, so the result is normal-continuous
/// only when the traces of `u` are.
pub fn interpolate_bdm_cellwise(space: &FeSpace, topo: &FacetTopology, u: impl Fn(usize, [f64; 2]) -> [f64; 2]) -> Result<Vec<f64>> {
    let mesh = space.mesh();
    if space.components() != 2 || !space.is_discontinuous() || mesh.kind() != CellKind::Triangle {
        return Err(Error::invalid("BDM interpolation needs a discontinuous vector space on triangles"));
    }
    let k = space.degree();
    if k == 0 {
        return Err(Error::invalid("BDM interpolation needs degree k >= 1"));
    }
    let ns = space.scalar_local_dim();
    let nl = 2 * ns;
    let frule = interval_rule(2 * k + 10);
    let crule = triangle_rule(2 * k + 10);
    let grad_basis = ModalBasis::new(CellKind::Triangle, k - 1);
    let bubble_basis = (k >= 2).then(|| ModalBasis::new(CellKind::Triangle, k - 2));

    let mut out = vec![0.0; space.dim()];
    let mut lq = vec![0.0; k + 1];
    let mut gv = vec![0.0; grad_basis.dim()];
    let mut gg = vec![[0.0; 2]; grad_basis.dim()];
    let nb = bubble_basis.as_ref().map_or(0, |b| b.dim());
    let mut bv = vec![0.0; nb];
    let mut bg = vec![[0.0; 2]; nb];

    for c in 0..mesh.num_cells() {
        let geom = mesh.geometry(c);
        let mut mat = vec![0.0; nl * nl];
        let mut rhs = vec![0.0; nl];
        let mut row = 0;

        for (local, &f) in topo.cell_facets(c).iter().enumerate() {
            let facet = &topo.facets[f];
            let side = FacetSide { cell: c, local };
            let n = facet.normal;
            let xis: Vec<[f64; 2]> = frule.points.iter().map(|p| facet.reference_point(mesh, side, p[0])).collect();
            let bvals = space.eval_basis(c, &xis);
            for (q, (p, w)) in frule.iter().enumerate() {
                let ds = w * facet.length;
                let x = facet.point(mesh, p[0]);
                let uv = u(c, x);
                let un = uv[0] * n[0] + uv[1] * n[1];
                facet_moment_basis(k, p[0], facet.length, &mut lq);
                for m in 0..=k {
                    let r = row + m;
                    rhs[r] += ds * un * lq[m];
                    for comp in 0..2 {
                        for i in 0..ns {
                            mat[r * nl + comp * ns + i] += ds * bvals.values[q * ns + i] * n[comp] * lq[m];
                        }
                    }
                }
            }
            row += k + 1;
        }

        let cv = space.cell_values(c, &crule);
        for (q, (xi, _)) in crule.iter().enumerate() {
            let jac = geom.jacobian(xi);
            let jxw = cv.jxw[q];
            let uv = u(c, cv.points[q]);
            // gradients of nonconstant P_{k-1} functions
            grad_basis.eval(xi, &mut gv, &mut gg);
            let mut tests: Vec<[f64; 2]> = (1..grad_basis.dim()).map(|a| jac.map_gradient(gg[a])).collect();
            // curls of bubble-weighted P_{k-2} functions
            if let Some(bb) = &bubble_basis {
                bb.eval(xi, &mut bv, &mut bg);
                let l = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
                let b = l[0] * l[1] * l[2];
                let db = [-l[1] * l[2] + l[0] * l[2], -l[1] * l[2] + l[0] * l[1]];
                for a in 0..nb {
                    let gref = [db[0] * bv[a] + b * bg[a][0], db[1] * bv[a] + b * bg[a][1]];
                    let g = jac.map_gradient(gref);
                    tests.push([g[1], -g[0]]);
                }
            }
            for (t, tv) in tests.iter().enumerate() {
                let r = row + t;
                rhs[r] += jxw * (uv[0] * tv[0] + uv[1] * tv[1]);
                for comp in 0..2 {
                    for i in 0..ns {
                        mat[r * nl + comp * ns + i] += jxw * cv.value(q, i) * tv[comp];
                    }
                }
            }
        }
        debug_assert_eq!(row + grad_basis.dim() - 1 + nb, nl);

        lu_solve(&mut mat, nl, &mut rhs, 1).map_err(|_| Error::Internal(format!("singular BDM dof system on cell {c}")))?;
        for (a, &d) in space.cell_dofs(c).iter().enumerate() {
            out[d] = rhs[a];
        }
    }
    Ok(out)
}
