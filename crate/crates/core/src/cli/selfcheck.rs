use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use crate::analysis::oracle::compare_with_library;
use crate::analysis::{ManufacturedCase, Poly2};
use crate::error::Result;
use crate::forms::{assemble_energy_matrix, assemble_sip, StabilizationParams};
use crate::mesh::{build_facet_topology, build_structured_quad_mesh, build_structured_triangle_mesh, BoundingBox, CellKind, Mesh};
use crate::quadrature::{cell_rule, interval_rule};
use crate::solver::Discretization;
use crate::spaces::{
    build_normal_constraints, build_space, interpolate_bdm, l2_project_pressure, l2_project_scalar_cellwise, Family, SpaceConfig,
};

/// Faults the self-check can inject to prove that its checks detect errors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Fault {
    pub corrupt_constraints: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckItem {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfcheckReport {
    pub items: Vec<CheckItem>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            super::EXIT_OK
        } else {
            super::EXIT_ERROR
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for i in &self.items {
            let _ = writeln!(s, "[{}] {}: {}", if i.passed { "pass" } else { "FAIL" }, i.name, i.detail);
        }
        s
    }
}

/// Deterministic coefficients in [-1, 1].
fn coeff(i: usize) -> f64 {
    (1.0 + i as f64 * 2.399_963).sin()
}

fn unit_triangle_mesh(n: usize) -> Result<Arc<Mesh>> {
    Ok(Arc::new(build_structured_triangle_mesh(n, BoundingBox::unit_square())?))
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Every monomial up to each rule's degree is integrated exactly on the
/// reference cells and interval.
fn check_quadrature() -> CheckItem {
    let mut worst: f64 = 0.0;
    for degree in 0..=20u32 {
        let tri = cell_rule(CellKind::Triangle, degree as usize);
        let quad = cell_rule(CellKind::Quadrilateral, degree as usize);
        let line = interval_rule(degree as usize);
        for i in 0..=degree {
            let j = degree - i;
            let mono = |x: [f64; 2]| x[0].powi(i as i32) * x[1].powi(j as i32);
            let exact_tri = factorial(i) * factorial(j) / factorial(i + j + 2);
            let exact_quad = 1.0 / f64::from((i + 1) * (j + 1));
            worst = worst
                .max((tri.integrate(mono) - exact_tri).abs() / exact_tri)
                .max((quad.integrate(mono) - exact_quad).abs() / exact_quad);
        }
        let exact_line = 1.0 / f64::from(degree + 1);
        worst = worst.max((line.integrate(|x| x[0].powi(degree as i32)) - exact_line).abs() / exact_line);
    }
    CheckItem {
        name: "quadrature exactness",
        passed: worst <= 1e-13,
        detail: format!("max relative monomial error {worst:.2e} up to degree 20"),
    }
}

/// `div(pi_h w) = pi_{k-1}(div w)` cellwise for polynomial fields, and the
/// interpolant lies in the kernel of the normal-continuity constraints.
fn check_commuting(fault: Fault) -> Result<CheckItem> {
    let mesh = unit_triangle_mesh(3)?;
    let topo = build_facet_topology(&mesh)?;
    let mut worst_div: f64 = 0.0;
    let mut worst_con: f64 = 0.0;
    for k in 1..=3usize {
        let v = build_space(&mesh, SpaceConfig::new(Family::PkDcVector, k))?;
        let q = build_space(&mesh, SpaceConfig::new(Family::PkDcScalar, k - 1))?;
        let mut l = build_normal_constraints(&v, &topo)?;
        if fault.corrupt_constraints {
            l = l.corrupted(l.blocks.len() / 2);
        }
        let deg = k as u32 + 2;
        let mut terms = [Vec::new(), Vec::new()];
        let mut idx = 7 * k;
        for (comp, t) in terms.iter_mut().enumerate() {
            for i in 0..=deg {
                for j in 0..=deg - i {
                    t.push((coeff(idx + comp), i, j));
                    idx += 3;
                }
            }
        }
        let wx = Poly2::from_terms(&terms[0]);
        let wy = Poly2::from_terms(&terms[1]);
        let divw = wx.dx() + wy.dy();
        let pi = interpolate_bdm(&v, &topo, |x| [wx.eval(x), wy.eval(x)])?;
        let lhs = l2_project_scalar_cellwise(&q, |c, x| {
            let xi = mesh.geometry(c).inverse_map(x);
            let (_, g) = v.eval_field(&pi, c, xi);
            g[0][0] + g[1][1]
        })?;
        let rhs = l2_project_pressure(&q, |x| divw.eval(x))?;
        let scale = rhs.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        for (a, b) in lhs.iter().zip(&rhs) {
            worst_div = worst_div.max((a - b).abs() / scale);
        }
        let raw = l.residual(&pi);
        let pi_scale = pi.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        for (b, blk) in l.blocks.iter().enumerate() {
            if topo.facets[blk.facet].is_boundary() {
                continue;
            }
            for m in 0..l.moments_per_facet {
                let r = l.row(b, m);
                worst_con = worst_con.max(raw[r].abs() / pi_scale);
            }
        }
    }
    Ok(CheckItem {
        name: "commuting diagram",
        passed: worst_div <= 1e-11 && worst_con <= 1e-11,
        detail: format!("divergence defect {worst_div:.2e}, interior constraint residual {worst_con:.2e} (k = 1..3)"),
    })
}

/// `a_h(v, v) >= ||v||_e^2 / 4` for the default penalty on 200
/// deterministic fields per degree of a 4x4 mesh.
fn check_coercivity() -> Result<CheckItem> {
    let mut worst = f64::INFINITY;
    for kind in [CellKind::Triangle, CellKind::Quadrilateral] {
        let mesh = Arc::new(match kind {
            CellKind::Triangle => build_structured_triangle_mesh(4, BoundingBox::unit_square())?,
            CellKind::Quadrilateral => build_structured_quad_mesh(4, BoundingBox::unit_square())?,
        });
        let topo = build_facet_topology(&mesh)?;
        for k in 1..=3usize {
            let v = build_space(&mesh, SpaceConfig::new(Family::dg_vector(kind), k))?;
            let sigma = StabilizationParams::new(1.0, k).sigma;
            let a = assemble_sip(&v, &topo, sigma);
            let e = assemble_energy_matrix(&v, &topo, sigma);
            for s in 0..200 {
                let x: Vec<f64> = (0..v.dim()).map(|i| coeff(i * 31 + s * 7 + k)).collect();
                worst = worst.min(a.bilinear(&x, &x) / e.bilinear(&x, &x));
            }
        }
    }
    Ok(CheckItem {
        name: "coercivity",
        passed: worst >= 0.25,
        detail: format!("min a_h(v,v)/||v||_e^2 = {worst:.3} over 1200 fields"),
    })
}

/// Library assembly and solve against the dense brute-force oracle on
/// one-and-two-cell meshes.
fn check_oracle() -> Result<CheckItem> {
    let mut worst: f64 = 0.0;
    for kind in [CellKind::Triangle, CellKind::Quadrilateral] {
        let mesh = Arc::new(match kind {
            CellKind::Triangle => build_structured_triangle_mesh(1, BoundingBox::unit_square())?,
            CellKind::Quadrilateral => build_structured_quad_mesh(1, BoundingBox::unit_square())?,
        });
        let disc = Discretization::dg(&mesh, 1)?;
        let nu = 0.7;
        let psi = Poly2::from_terms(&[(1.0, 2, 1), (-0.5, 1, 2), (0.3, 3, 0)]);
        let p = Poly2::from_terms(&[(1.0, 1, 0), (-0.5, 0, 0)]);
        let case = ManufacturedCase::from_stream_function("oracle", &psi, p, nu, false, BoundingBox::unit_square());
        let params = StabilizationParams::new(nu, 1).with_gamma(2.0).with_gamma_gd(0.5);
        let cmp = compare_with_library(&disc, &params, &case)?;
        worst = worst.max(cmp.matrix_defect).max(cmp.rhs_defect).max(cmp.solution_defect);
    }
    Ok(CheckItem {
        name: "dense oracle",
        passed: worst <= 1e-10,
        detail: format!("max relative defect {worst:.2e} (2 triangles, 1 quadrilateral, k = 1)"),
    })
}

fn item_or_error(name: &'static str, r: Result<CheckItem>) -> CheckItem {
    r.unwrap_or_else(|e| CheckItem {
        name,
        passed: false,
        detail: format!("error: {e}"),
    })
}

/// Runs the fast invariant suite.
pub fn run_selfcheck(fault: Fault) -> SelfcheckReport {
    faer::set_global_parallelism(faer::Par::Seq);
    let start = Instant::now();
    let mut items = vec![
        check_quadrature(),
        item_or_error("commuting diagram", check_commuting(fault)),
        item_or_error("coercivity", check_coercivity()),
        item_or_error("dense oracle", check_oracle()),
    ];
    let secs = start.elapsed().as_secs_f64();
    items.push(CheckItem {
        name: "runtime",
        passed: secs <= 60.0,
        detail: format!("{secs:.1} s"),
    });
    SelfcheckReport { items }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        let r = run_selfcheck(Fault::default());
        assert!(r.passed(), "{}", r.render());
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn corrupted_constraints_fail_commuting_check() {
        let r = run_selfcheck(Fault { corrupt_constraints: true });
        let item = r.items.iter().find(|i| i.name == "commuting diagram").unwrap();
        assert!(!item.passed, "{}", item.detail);
        assert!(r.items.iter().filter(|i| !i.passed).count() == 1);
        assert_eq!(r.exit_code(), 1);
    }
}
