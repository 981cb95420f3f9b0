//! Brute-force dense reference implementation of the stabilized DG Stokes
//! system. It shares nothing with the production assembly except the mesh
//! vertices and cells: bases are scaled physical monomials, quadrature is
//! Gauss-Legendre (collapsed on triangles), facets are found by vertex-pair
//! search and the saddle-point system is solved densely.

use std::collections::BTreeMap;

use super::cases::ManufacturedCase;
use crate::error::{Error, Result};
use crate::forms::StabilizationParams;
use crate::mesh::{CellKind, Mesh};
use crate::solver::{assemble_stokes_system, solve_linear_saddle, Discretization};
use crate::spaces::FeSpace;

/// Dense blocks and solution of the reference system, in the monomial basis.
#[derive(Clone, Debug)]
pub struct OracleSystem {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub m: Vec<f64>,
    pub rhs_u: Vec<f64>,
    pub rhs_p: Vec<f64>,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub mean_multiplier: f64,
    pub nu_dofs: usize,
    pub np_dofs: usize,
}

/// Parameters of the reference system.
#[derive(Clone, Copy, Debug)]
pub struct OracleParams {
    pub k: usize,
    pub nu: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub gamma_gd: f64,
}

/// Gauss-Legendre nodes and weights on [0, 1] by Newton iteration on `P_n`.
pub fn gauss_legendre01(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out
}

struct Cell {
    verts: Vec<[f64; 2]>,
    center: [f64; 2],
    scale: f64,
}

impl Cell {
    /// Physical quadrature points and weights.
    fn quadrature(&self, kind: CellKind, g: &[(f64, f64)]) -> Vec<([f64; 2], f64)> {
        let v = &self.verts;
        let mut out = Vec::new();
        match kind {
            CellKind::Triangle => {
                let e1 = [v[1][0] - v[0][0], v[1][1] - v[0][1]];
                let e2 = [v[2][0] - v[0][0], v[2][1] - v[0][1]];
                let det = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
                for &(s, ws) in g {
                    for &(t, wt) in g {
                        let (xi, eta) = (s, t * (1.0 - s));
                        let x = [v[0][0] + xi * e1[0] + eta * e2[0], v[0][1] + xi * e1[1] + eta * e2[1]];
                        out.push((x, ws * wt * (1.0 - s) * det));
                    }
                }
            }
            CellKind::Quadrilateral => {
                for &(s, ws) in g {
                    for &(t, wt) in g {
                        let n = [(1.0 - s) * (1.0 - t), s * (1.0 - t), s * t, (1.0 - s) * t];
                        let ds = [-(1.0 - t), 1.0 - t, t, -t];
                        let dt = [-(1.0 - s), -s, s, 1.0 - s];
                        let mut x = [0.0; 2];
                        let (mut xs, mut xt) = ([0.0; 2], [0.0; 2]);
                        for a in 0..4 {
                            for d in 0..2 {
                                x[d] += n[a] * v[a][d];
                                xs[d] += ds[a] * v[a][d];
                                xt[d] += dt[a] * v[a][d];
                            }
                        }
                        out.push((x, ws * wt * (xs[0] * xt[1] - xs[1] * xt[0]).abs()));
                    }
                }
            }
        }
        out
    }
}

/// Per facet side: sign, velocity basis values, gradients, pressure values.
type SideData = (f64, Vec<f64>, Vec<[f64; 2]>, Vec<f64>);

/// Exponents of the scalar monomial basis of degree `k`.
fn exponents(kind: CellKind, k: usize) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    for a in 0..=k as i32 {
        for b in 0..=k as i32 {
            let keep = match kind {
                CellKind::Triangle => a + b <= k as i32,
                CellKind::Quadrilateral => true,
            };
            if keep {
                out.push((a, b));
            }
        }
    }
    out
}

fn monomials(cell: &Cell, exps: &[(i32, i32)], x: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
    let s = [(x[0] - cell.center[0]) / cell.scale, (x[1] - cell.center[1]) / cell.scale];
    let pw = |b: f64, e: i32| if e < 0 { 0.0 } else { b.powi(e) };
    let vals = exps.iter().map(|&(a, b)| pw(s[0], a) * pw(s[1], b)).collect();
    let grads = exps
        .iter()
        .map(|&(a, b)| {
            [
                a as f64 * pw(s[0], a - 1) * pw(s[1], b) / cell.scale,
                b as f64 * pw(s[0], a) * pw(s[1], b - 1) / cell.scale,
            ]
        })
        .collect();
    (vals, grads)
}

struct OracleFacet {
    a: [f64; 2],
    b: [f64; 2],
    /// adjacent cells; `normal` points out of the first
    sides: Vec<usize>,
    normal: [f64; 2],
}

fn find_facets(mesh: &Mesh) -> Vec<OracleFacet> {
    let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for c in 0..mesh.num_cells() {
        let cv = mesh.cell(c);
        for i in 0..cv.len() {
            let (p, q) = (cv[i], cv[(i + 1) % cv.len()]);
            map.entry((p.min(q), p.max(q))).or_default().push(c);
        }
    }
    let verts = mesh.vertices();
    map.into_iter()
        .map(|((p, q), sides)| {
            let (a, b) = (verts[p], verts[q]);
            let t = [b[0] - a[0], b[1] - a[1]];
            let len = (t[0] * t[0] + t[1] * t[1]).sqrt();
            let mut n = [t[1] / len, -t[0] / len];
            // outward from the first side: points away from its centroid
            let cc = mesh.cell_coords(sides[0]);
            let cen = cc.iter().fold([0.0; 2], |acc, v| [acc[0] + v[0], acc[1] + v[1]]);
            let cen = [cen[0] / cc.len() as f64, cen[1] / cc.len() as f64];
            if (a[0] - cen[0]) * n[0] + (a[1] - cen[1]) * n[1] < 0.0 {
                n = [-n[0], -n[1]];
            }
            OracleFacet { a, b, sides, normal: n }
        })
        .collect()
}

/// Dense Gaussian elimination with partial pivoting.
fn dense_solve(mut a: Vec<f64>, n: usize, mut b: Vec<f64>) -> Result<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[piv * n + col] == 0.0 {
            return Err(Error::Solver("oracle system is singular".into()));
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
            }
            b.swap(piv, col);
        }
        for i in col + 1..n {
            let f = a[i * n + col] / a[col * n + col];
            if f != 0.0 {
                for j in col..n {
                    a[i * n + j] -= f * a[col * n + j];
                }
                b[i] -= f * b[col];
            }
        }
    }
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i * n + j] * b[j]).sum();
        b[i] = (b[i] - s) / a[i * n + i];
    }
    Ok(b)
}

/// Assembles and solves the stabilized DG Stokes system densely. Only affine
/// cells are supported (triangles and parallelograms whose edges are axis
/// aligned), where the monomial spaces coincide with the mapped ones.
pub fn oracle_stokes(
    mesh: &Mesh,
    params: OracleParams,
    f: &dyn Fn([f64; 2]) -> [f64; 2],
    g: &dyn Fn([f64; 2]) -> [f64; 2],
) -> Result<OracleSystem> {
    let kind = mesh.kind();
    let k = params.k;
    if k == 0 {
        return Err(Error::invalid("oracle needs k >= 1"));
    }
    let cells: Vec<Cell> = (0..mesh.num_cells())
        .map(|c| {
            let verts = mesh.cell_coords(c);
            let n = verts.len() as f64;
            let center = verts.iter().fold([0.0; 2], |a, v| [a[0] + v[0] / n, a[1] + v[1] / n]);
            let scale = verts
                .iter()
                .flat_map(|p| verts.iter().map(move |q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()))
                .fold(0.0, f64::max);
            Cell { verts, center, scale }
        })
        .collect();
    if kind == CellKind::Quadrilateral {
        for c in &cells {
            let v = &c.verts;
            let axis = (0..4).all(|i| {
                let (p, q) = (v[i], v[(i + 1) % 4]);
                (p[0] - q[0]).abs() < 1e-14 || (p[1] - q[1]).abs() < 1e-14
            });
            if !axis {
                return Err(Error::invalid("oracle supports axis-aligned rectangles only"));
            }
        }
    }
    let ue = exponents(kind, k);
    let pe = exponents(kind, k - 1);
    let (nsu, nsp) = (ue.len(), pe.len());
    let ncell = cells.len();
    let nu_dofs = 2 * nsu * ncell;
    let np_dofs = nsp * ncell;
    let udof = |c: usize, comp: usize, i: usize| c * 2 * nsu + comp * nsu + i;
    let pdof = |c: usize, i: usize| c * nsp + i;

    let gl = gauss_legendre01(2 * k + 8);
    let mut a = vec![0.0; nu_dofs * nu_dofs];
    let mut b = vec![0.0; np_dofs * nu_dofs];
    let mut m = vec![0.0; np_dofs];
    let mut rhs_u = vec![0.0; nu_dofs];
    let mut rhs_p = vec![0.0; np_dofs];
    let nu = params.nu;

    for (c, cell) in cells.iter().enumerate() {
        for (x, w) in cell.quadrature(kind, &gl) {
            let (uv, ug) = monomials(cell, &ue, x);
            let (pv, _) = monomials(cell, &pe, x);
            let fx = f(x);
            for i in 0..nsu {
                for comp in 0..2 {
                    let r = udof(c, comp, i);
                    rhs_u[r] += w * fx[comp] * uv[i];
                    for j in 0..nsu {
                        let lap = ug[i][0] * ug[j][0] + ug[i][1] * ug[j][1];
                        a[r * nu_dofs + udof(c, comp, j)] += w * nu * lap;
                        for comp2 in 0..2 {
                            a[r * nu_dofs + udof(c, comp2, j)] += w * params.gamma_gd * ug[i][comp] * ug[j][comp2];
                        }
                    }
                    for q in 0..nsp {
                        b[pdof(c, q) * nu_dofs + r] -= w * pv[q] * ug[i][comp];
                    }
                }
            }
            for q in 0..nsp {
                m[pdof(c, q)] += w * pv[q];
            }
        }
    }

    for facet in find_facets(mesh) {
        let n = facet.normal;
        let t = [facet.b[0] - facet.a[0], facet.b[1] - facet.a[1]];
        let h = (t[0] * t[0] + t[1] * t[1]).sqrt();
        let nsides = facet.sides.len();
        let (avg, boundary) = if nsides == 1 { (1.0, true) } else { (0.5, false) };
        for &(s, ws) in &gl {
            let x = [facet.a[0] + s * t[0], facet.a[1] + s * t[1]];
            let ds = ws * h;
            // per side: sign, value, gradient of u and p basis
            let data: Vec<SideData> = facet
                .sides
                .iter()
                .enumerate()
                .map(|(si, &c)| {
                    let (uv, ug) = monomials(&cells[c], &ue, x);
                    let (pv, _) = monomials(&cells[c], &pe, x);
                    (if si == 0 { 1.0 } else { -1.0 }, uv, ug, pv)
                })
                .collect();
            for (si, &ci) in facet.sides.iter().enumerate() {
                let (sgi, vi, gi, _) = &data[si];
                for (sj, &cj) in facet.sides.iter().enumerate() {
                    let (sgj, vj, gj, pj) = &data[sj];
                    for i in 0..nsu {
                        let dn_i = gi[i][0] * n[0] + gi[i][1] * n[1];
                        for j in 0..nsu {
                            let dn_j = gj[j][0] * n[0] + gj[j][1] * n[1];
                            // nu (-{{du/dn}}[[v]] - {{dv/dn}}[[u]] + sigma/h [[u]][[v]])
                            let sip =
                                nu * (-avg * dn_j * sgi * vi[i] - avg * dn_i * sgj * vj[j] + params.sigma / h * sgi * vi[i] * sgj * vj[j]);
                            for comp in 0..2 {
                                a[udof(ci, comp, i) * nu_dofs + udof(cj, comp, j)] += ds * sip;
                                for comp2 in 0..2 {
                                    a[udof(ci, comp, i) * nu_dofs + udof(cj, comp2, j)] +=
                                        ds * params.gamma / h * sgi * vi[i] * n[comp] * sgj * vj[j] * n[comp2];
                                }
                            }
                        }
                        // {{q}} [[v]].n, q from side sj, v from side si
                        for q in 0..nsp {
                            for comp in 0..2 {
                                b[pdof(cj, q) * nu_dofs + udof(ci, comp, i)] += ds * avg * pj[q] * sgi * vi[i] * n[comp];
                            }
                        }
                    }
                }
            }
            if boundary {
                let c = facet.sides[0];
                let (_, vi, gi, pi) = &data[0];
                let gx = g(x);
                let gn = gx[0] * n[0] + gx[1] * n[1];
                for i in 0..nsu {
                    let dn = gi[i][0] * n[0] + gi[i][1] * n[1];
                    for comp in 0..2 {
                        rhs_u[udof(c, comp, i)] +=
                            ds * (nu * (params.sigma / h * gx[comp] * vi[i] - gx[comp] * dn) + params.gamma / h * gn * vi[i] * n[comp]);
                    }
                }
                for q in 0..nsp {
                    rhs_p[pdof(c, q)] += ds * pi[q] * gn;
                }
            }
        }
    }

    let nt = nu_dofs + np_dofs + 1;
    let mut kkt = vec![0.0; nt * nt];
    for i in 0..nu_dofs {
        for j in 0..nu_dofs {
            kkt[i * nt + j] = a[i * nu_dofs + j];
        }
    }
    for q in 0..np_dofs {
        for j in 0..nu_dofs {
            kkt[(nu_dofs + q) * nt + j] = b[q * nu_dofs + j];
            kkt[j * nt + nu_dofs + q] = b[q * nu_dofs + j];
        }
        kkt[(nu_dofs + q) * nt + nt - 1] = m[q];
        kkt[(nt - 1) * nt + nu_dofs + q] = m[q];
    }
    let mut rhs = rhs_u.clone();
    rhs.extend_from_slice(&rhs_p);
    rhs.push(0.0);
    let x = dense_solve(kkt, nt, rhs)?;
    Ok(OracleSystem {
        a,
        b,
        m,
        rhs_u,
        rhs_p,
        u: x[..nu_dofs].to_vec(),
        p: x[nu_dofs..nu_dofs + np_dofs].to_vec(),
        mean_multiplier: x[nt - 1],
        nu_dofs,
        np_dofs,
    })
}

/// Monomial exponents and scaling used by the oracle for one cell, so callers
/// can change basis: returns values of the oracle's scalar basis of degree
/// `k` at physical point `x` in cell `c`.
pub fn oracle_scalar_basis(mesh: &Mesh, c: usize, k: usize, x: [f64; 2]) -> Vec<f64> {
    let verts = mesh.cell_coords(c);
    let n = verts.len() as f64;
    let center = verts.iter().fold([0.0; 2], |a, v| [a[0] + v[0] / n, a[1] + v[1] / n]);
    let scale = verts
        .iter()
        .flat_map(|p| verts.iter().map(move |q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()))
        .fold(0.0, f64::max);
    let cell = Cell { verts, center, scale };
    monomials(&cell, &exponents(mesh.kind(), k), x).0
}

/// Largest relative deviations between the library system and the oracle,
/// after expressing the library bases in the oracle's monomials.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OracleComparison {
    pub matrix_defect: f64,
    pub rhs_defect: f64,
    pub solution_defect: f64,
}

/// Global change of basis `T` with `phi_i = sum_j T_ij psi_j`, dense and
/// indexed by (library dof, oracle dof).
fn basis_change(space: &FeSpace, k_oracle: usize) -> Result<Vec<f64>> {
    let mesh = space.mesh();
    let ns = space.scalar_local_dim();
    let ncomp = space.components();
    let dim = space.dim();
    let mut t = vec![0.0; dim * dim];
    let lattice = 2 * k_oracle + 4;
    for c in 0..mesh.num_cells() {
        let geom = mesh.geometry(c);
        let mut refs = Vec::new();
        for i in 0..=lattice {
            for j in 0..=lattice {
                let xi = [
                    (i as f64 + 0.37) / (lattice as f64 + 1.0),
                    (j as f64 + 0.21) / (lattice as f64 + 1.0),
                ];
                if mesh.kind() == CellKind::Quadrilateral || xi[0] + xi[1] < 1.0 {
                    refs.push(xi);
                }
            }
        }
        let lib = space.eval_basis(c, &refs);
        let psi: Vec<Vec<f64>> = refs.iter().map(|&r| oracle_scalar_basis(mesh, c, k_oracle, geom.map(r))).collect();
        if psi[0].len() != ns {
            return Err(Error::invalid("library and oracle scalar bases differ in size"));
        }
        // normal equations (Psi^T Psi) T_c^T = Psi^T Phi
        let mut gram = vec![0.0; ns * ns];
        let mut rhs = vec![0.0; ns * ns];
        for (q, pq) in psi.iter().enumerate() {
            for a in 0..ns {
                for b in 0..ns {
                    gram[a * ns + b] += pq[a] * pq[b];
                    rhs[a * ns + b] += pq[a] * lib.values[q * ns + b];
                }
            }
        }
        crate::dense::lu_solve(&mut gram, ns, &mut rhs, ns)?;
        let dofs = space.cell_dofs(c);
        for comp in 0..ncomp {
            for i in 0..ns {
                for j in 0..ns {
                    let od = c * ncomp * ns + comp * ns + j;
                    t[dofs[comp * ns + i] * dim + od] = rhs[j * ns + i];
                }
            }
        }
    }
    Ok(t)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn max_diff(lib: &[f64], mapped: &[f64]) -> f64 {
    lib.iter().zip(mapped).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// `T X T2^T` for dense row-major matrices.
fn congruence(t: &[f64], x: &[f64], t2: &[f64], n: usize, m: usize) -> Vec<f64> {
    // t: n x n, x: n x m, t2: m x m
    let mut tx = vec![0.0; n * m];
    for i in 0..n {
        for a in 0..n {
            let tia = t[i * n + a];
            if tia != 0.0 {
                for j in 0..m {
                    tx[i * m + j] += tia * x[a * m + j];
                }
            }
        }
    }
    let mut out = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            out[i * m + j] = (0..m).map(|b| tx[i * m + b] * t2[j * m + b]).sum();
        }
    }
    out
}

/// Assembles and solves the stabilized DG Stokes problem with the library
/// and with the oracle, and reports the deviations.
pub fn compare_with_library(disc: &Discretization, params: &StabilizationParams, case: &ManufacturedCase) -> Result<OracleComparison> {
    let k = disc.degree();
    let sys = assemble_stokes_system(disc, case, params)?;
    let sol = solve_linear_saddle(&sys, None)?;
    let oracle = oracle_stokes(
        &disc.mesh,
        OracleParams {
            k,
            nu: params.nu,
            sigma: params.sigma,
            gamma: params.gamma,
            gamma_gd: params.gamma_gd,
        },
        &|x| (case.f)(x),
        &|x| (case.g)(x),
    )?;
    let tu = basis_change(&disc.velocity, k)?;
    let tp = basis_change(&disc.pressure, k - 1)?;
    let (nu, np) = (oracle.nu_dofs, oracle.np_dofs);
    if sys.velocity_dim() != nu || sys.pressure_dim() != np {
        return Err(Error::invalid("library and oracle systems differ in size"));
    }
    let a_map = congruence(&tu, &oracle.a, &tu, nu, nu);
    let b_map = congruence(&tp, &oracle.b, &tu, np, nu);
    let matvec = |t: &[f64], v: &[f64], n: usize| -> Vec<f64> { (0..n).map(|i| (0..n).map(|j| t[i * n + j] * v[j]).sum()).collect() };
    let (a_lib, b_lib) = (sys.a.to_dense(), sys.b.to_dense());
    let m_map = matvec(&tp, &oracle.m, np);
    let scale = max_abs(&a_lib).max(max_abs(&b_lib)).max(max_abs(&sys.m)).max(f64::MIN_POSITIVE);
    let matrix_defect = max_diff(&a_lib, &a_map).max(max_diff(&b_lib, &b_map)).max(max_diff(&sys.m, &m_map)) / scale;
    let scale = max_abs(&sys.rhs_u).max(max_abs(&sys.rhs_p)).max(f64::MIN_POSITIVE);
    let rhs_defect =
        max_diff(&sys.rhs_u, &matvec(&tu, &oracle.rhs_u, nu)).max(max_diff(&sys.rhs_p, &matvec(&tp, &oracle.rhs_p, np))) / scale;
    // u = sum_i c_i phi_i = sum_j (T^T c)_j psi_j
    let tt = |t: &[f64], v: &[f64], n: usize| -> Vec<f64> { (0..n).map(|j| (0..n).map(|i| t[i * n + j] * v[i]).sum()).collect() };
    let scale = max_abs(&oracle.u)
        .max(max_abs(&oracle.p))
        .max(oracle.mean_multiplier.abs())
        .max(f64::MIN_POSITIVE);
    let solution_defect = max_diff(&oracle.u, &tt(&tu, &sol.u, nu))
        .max(max_diff(&oracle.p, &tt(&tp, &sol.p, np)))
        .max((oracle.mean_multiplier - sol.mean_multiplier).abs())
        / scale;
    Ok(OracleComparison {
        matrix_defect,
        rhs_defect,
        solution_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..8 {
            let g = gauss_legendre01(n);
            for d in 0..2 * n {
                let s: f64 = g.iter().map(|(x, w)| w * x.powi(d as i32)).sum();
                assert!((s - 1.0 / (d as f64 + 1.0)).abs() < 1e-14, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn library_matches_oracle_on_tiny_meshes() {
        use std::sync::Arc;

        use crate::analysis::{ManufacturedCase, Poly2};
        use crate::mesh::{build_structured_quad_mesh, build_structured_triangle_mesh, BoundingBox};

        let psi = Poly2::from_terms(&[(1.0, 2, 1), (0.5, 0, 2), (-0.3, 1, 1)]);
        let p = Poly2::from_terms(&[(1.0, 1, 0), (-0.5, 0, 0)]);
        let unit = BoundingBox::unit_square();
        let case = ManufacturedCase::from_stream_function("poly", &psi, p, 0.7, false, unit);
        for mesh in [
            build_structured_triangle_mesh(1, unit).unwrap(),
            build_structured_quad_mesh(1, unit).unwrap(),
        ] {
            let disc = Discretization::dg(&Arc::new(mesh), 1).unwrap();
            let params = StabilizationParams::new(0.7, 1).with_gamma(2.0).with_gamma_gd(0.5);
            let cmp = compare_with_library(&disc, &params, &case).unwrap();
            assert!(cmp.matrix_defect < 1e-12, "{cmp:?}");
            assert!(cmp.rhs_defect < 1e-12, "{cmp:?}");
            assert!(cmp.solution_defect < 1e-10, "{cmp:?}");
        }
    }

    #[test]
    fn dense_solve_small() {
        let x = dense_solve(vec![0.0, 2.0, 1.0, 1.0], 2, vec![4.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
    }
}
