use super::cases::ManufacturedCase;
use crate::error::{Error, Result};
use crate::quadrature::{cell_rule, interval_rule};
use crate::solver::{Discretization, SolveResult};
use crate::spaces::FeSpace;

/// Error norms of one discrete solution against a manufactured case.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorReport {
    pub l2_u: f64,
    pub h1_broken_u: f64,
    /// against the zero-mean exact pressure
    pub l2_p: f64,
    pub div_broken: f64,
    pub nj: f64,
    pub energy: f64,
    pub e_sharp: f64,
}

/// Velocity value and gradient (`g[c][d] = d u_c / d x_d`).
fn vector_at(space: &FeSpace, u: &[f64], cell: usize, vals: &[f64], grads: &[[f64; 2]]) -> ([f64; 2], [[f64; 2]; 2]) {
    let (v, g) = space.combine(u, cell, vals, grads);
    ([v[0], v[1]], [g[0], g[1]])
}

fn error_degree(disc: &Discretization, case: Option<&ManufacturedCase>) -> usize {
    let k = disc.degree();
    let poly = case.and_then(|c| c.polynomial_degree).unwrap_or(0);
    (2 * k + 6).max(2 * poly + 2)
}

/// Skeleton terms of a velocity field `u_h` against boundary data `g`
/// (`None` for homogeneous data): `(sum 1/h ||[[e]].n||^2, sum 1/h ||[[e]]||^2)`
/// with `e = u_h` on interior facets and `e = u_h - g` on boundary facets,
/// plus `sum_K h_K ||grad(u - u_h) n_K||^2_{dK}` when `exact` is given.
fn skeleton_terms(
    disc: &Discretization,
    u: &[f64],
    g: Option<&(dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync)>,
    exact_grad: Option<&(dyn Fn([f64; 2]) -> [[f64; 2]; 2] + Send + Sync)>,
    degree: usize,
) -> (f64, f64, f64) {
    let v = &disc.velocity;
    let ns = v.scalar_local_dim();
    let rule = interval_rule(degree);
    let (mut nj2, mut jump2, mut sharp2) = (0.0, 0.0, 0.0);
    for f in 0..disc.topo.num_facets() {
        let fv = v.facet_values(&disc.topo, f, &rule);
        let n = fv.normal;
        let h = fv.length;
        for q in 0..rule.len() {
            let r = q * ns..(q + 1) * ns;
            let mut jump = [0.0; 2];
            for (s, side) in fv.sides.iter().enumerate() {
                let (val, grad) = vector_at(v, u, side.cell, &side.values[r.clone()], &side.grads[r.clone()]);
                let sign = if s == 0 { 1.0 } else { -1.0 };
                jump[0] += sign * val[0];
                jump[1] += sign * val[1];
                if let Some(eg) = exact_grad {
                    let ge = eg(fv.points[q]);
                    let hk = disc.mesh.cell_diameter(side.cell);
                    for c in 0..2 {
                        let d = [ge[c][0] - grad[c][0], ge[c][1] - grad[c][1]];
                        sharp2 += fv.ds[q] * hk * (d[0] * n[0] + d[1] * n[1]).powi(2);
                    }
                }
            }
            if fv.sides.len() == 1 {
                if let Some(g) = g {
                    let gx = g(fv.points[q]);
                    jump[0] -= gx[0];
                    jump[1] -= gx[1];
                }
            }
            let jn = jump[0] * n[0] + jump[1] * n[1];
            nj2 += fv.ds[q] / h * jn * jn;
            jump2 += fv.ds[q] / h * (jump[0] * jump[0] + jump[1] * jump[1]);
        }
    }
    (nj2, jump2, sharp2)
}

/// All error norms of `sol` against `case`. The normal-jump seminorm uses
/// `u_h - g` on boundary facets.
pub fn compute_errors(disc: &Discretization, sol: &SolveResult, case: &ManufacturedCase, sigma: f64) -> ErrorReport {
    let v = &disc.velocity;
    let p = &disc.pressure;
    let degree = error_degree(disc, Some(case));
    let rule = cell_rule(disc.mesh.kind(), degree);
    let (nsv, nsp) = (v.scalar_local_dim(), p.scalar_local_dim());
    let (mut l2u, mut h1, mut l2p, mut div) = (0.0, 0.0, 0.0, 0.0);
    for c in 0..disc.mesh.num_cells() {
        let cv = v.cell_values(c, &rule);
        let cp = p.cell_values(c, &rule);
        for q in 0..cv.num_points() {
            let x = cv.points[q];
            let w = cv.jxw[q];
            let (uh, gh) = vector_at(v, &sol.u, c, &cv.values[q * nsv..(q + 1) * nsv], &cv.grads[q * nsv..(q + 1) * nsv]);
            let (ph, _) = p.combine(&sol.p, c, &cp.values[q * nsp..(q + 1) * nsp], &cp.grads[q * nsp..(q + 1) * nsp]);
            let ue = (case.u)(x);
            let ge = (case.grad_u)(x);
            let pe = (case.p)(x) - case.p_mean;
            l2u += w * ((ue[0] - uh[0]).powi(2) + (ue[1] - uh[1]).powi(2));
            for a in 0..2 {
                for b in 0..2 {
                    h1 += w * (ge[a][b] - gh[a][b]).powi(2);
                }
            }
            l2p += w * (pe - ph[0]).powi(2);
            div += w * (gh[0][0] + gh[1][1]).powi(2);
        }
    }
    let g = (!case.homogeneous).then_some(&*case.g);
    let (nj2, jump2, sharp2) = skeleton_terms(disc, &sol.u, g, Some(&*case.grad_u), degree);
    let energy2 = h1 + sigma * jump2;
    ErrorReport {
        l2_u: l2u.sqrt(),
        h1_broken_u: h1.sqrt(),
        l2_p: l2p.sqrt(),
        div_broken: div.sqrt(),
        nj: nj2.sqrt(),
        energy: energy2.sqrt(),
        e_sharp: (energy2 + sharp2).sqrt(),
    }
}

/// Structural norms of a discrete velocity with homogeneous boundary data:
/// `(||div_h u||_0, |u|_nj, ||u||_e)`.
pub fn discrete_velocity_norms(disc: &Discretization, u: &[f64], sigma: f64) -> (f64, f64, f64) {
    let v = &disc.velocity;
    let ns = v.scalar_local_dim();
    let degree = error_degree(disc, None);
    let rule = cell_rule(disc.mesh.kind(), degree);
    let (mut div, mut h1) = (0.0, 0.0);
    for c in 0..disc.mesh.num_cells() {
        let cv = v.cell_values(c, &rule);
        for q in 0..cv.num_points() {
            let (_, g) = vector_at(v, u, c, &cv.values[q * ns..(q + 1) * ns], &cv.grads[q * ns..(q + 1) * ns]);
            div += cv.jxw[q] * (g[0][0] + g[1][1]).powi(2);
            h1 += cv.jxw[q] * g.iter().flatten().map(|x| x * x).sum::<f64>();
        }
    }
    let (nj2, jump2, _) = skeleton_terms(disc, u, None, None, degree);
    (div.sqrt(), nj2.sqrt(), (h1 + sigma * jump2).sqrt())
}

/// Distances `(L2 velocity, broken H1 velocity, L2 pressure)` between two
/// solutions on the same discretization.
pub fn compare_discrete(disc: &Discretization, a: &SolveResult, b: &SolveResult) -> Result<(f64, f64, f64)> {
    let (v, p) = (&disc.velocity, &disc.pressure);
    if a.u.len() != v.dim() || b.u.len() != v.dim() || a.p.len() != p.dim() || b.p.len() != p.dim() {
        return Err(Error::invalid("solutions do not live on the given discretization"));
    }
    let du: Vec<f64> = a.u.iter().zip(&b.u).map(|(x, y)| x - y).collect();
    let dp: Vec<f64> = a.p.iter().zip(&b.p).map(|(x, y)| x - y).collect();
    let rule = cell_rule(disc.mesh.kind(), error_degree(disc, None));
    let (nsv, nsp) = (v.scalar_local_dim(), p.scalar_local_dim());
    let (mut l2u, mut h1, mut l2p) = (0.0, 0.0, 0.0);
    for c in 0..disc.mesh.num_cells() {
        let cv = v.cell_values(c, &rule);
        let cp = p.cell_values(c, &rule);
        for q in 0..cv.num_points() {
            let w = cv.jxw[q];
            let (uv, g) = vector_at(v, &du, c, &cv.values[q * nsv..(q + 1) * nsv], &cv.grads[q * nsv..(q + 1) * nsv]);
            let (pv, _) = p.combine(&dp, c, &cp.values[q * nsp..(q + 1) * nsp], &cp.grads[q * nsp..(q + 1) * nsp]);
            l2u += w * (uv[0] * uv[0] + uv[1] * uv[1]);
            h1 += w * g.iter().flatten().map(|x| x * x).sum::<f64>();
            l2p += w * pv[0] * pv[0];
        }
    }
    Ok((l2u.sqrt(), h1.sqrt(), l2p.sqrt()))
}
