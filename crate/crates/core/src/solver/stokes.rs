use super::linear::{solve_linear_saddle, ConstraintRows};
use super::{Discretization, SolveResult};
use crate::analysis::ManufacturedCase;
use crate::error::{Error, Result};
use crate::forms::{
    assemble_bh, assemble_broken_laplacian, assemble_graddiv, assemble_jh_flux, assemble_load, assemble_pressure_mean, assemble_sip,
    assemble_weak_dirichlet, AssembledSystem, StabilizationParams,
};
use crate::mesh::CellKind;
use crate::spaces::build_normal_constraints;

fn check_nu(case: &ManufacturedCase, params: &StabilizationParams) -> Result<()> {
    params.validate()?;
    if (case.nu - params.nu).abs() > 1e-14 * case.nu {
        return Err(Error::invalid(format!(
            "case '{}' was built for nu = {} but the solve uses nu = {}",
            case.name, case.nu, params.nu
        )));
    }
    Ok(())
}

/// Blocks of the stabilized DG Stokes problem
/// `nu a_h + gamma j_h + gamma_gd (div, div)` with weak Dirichlet data.
pub fn assemble_stokes_system(disc: &Discretization, case: &ManufacturedCase, params: &StabilizationParams) -> Result<AssembledSystem> {
    check_nu(case, params)?;
    if disc.is_crouzeix_raviart() {
        return Err(Error::invalid("use solve_stokes_cr for Crouzeix-Raviart spaces"));
    }
    let (v, p, topo) = (&disc.velocity, &disc.pressure, &disc.topo);
    let mut a = assemble_sip(v, topo, params.sigma).scaled(params.nu);
    if params.gamma > 0.0 {
        a = a.add_scaled(&assemble_jh_flux(v, topo), params.gamma);
    }
    if params.gamma_gd > 0.0 {
        a = a.add_scaled(&assemble_graddiv(v), params.gamma_gd);
    }
    let b = assemble_bh(v, p, topo, true);
    let mut rhs_u = assemble_load(v, |x| (case.f)(x));
    let mut rhs_p = vec![0.0; p.dim()];
    if !case.homogeneous {
        let (du, dp) = assemble_weak_dirichlet(v, p, topo, params, |x| (case.g)(x));
        rhs_u.iter_mut().zip(&du).for_each(|(a, b)| *a += b);
        rhs_p = dp;
    }
    Ok(AssembledSystem {
        a,
        b,
        m: assemble_pressure_mean(p),
        rhs_u,
        rhs_p,
        symmetric: true,
    })
}

/// Stabilized DG Stokes solve.
pub fn solve_stokes_dg(disc: &Discretization, case: &ManufacturedCase, params: &StabilizationParams) -> Result<SolveResult> {
    let sys = assemble_stokes_system(disc, case, params)?;
    solve_linear_saddle(&sys, None)
}

/// H(div)-DG Stokes solve: the DG velocity space restricted to normal-continuous
/// fields (BDM on triangles), with the normal trace of `g` imposed on the
/// boundary through the constraint rows.
pub fn solve_stokes_hdiv(disc: &Discretization, case: &ManufacturedCase, sigma: f64) -> Result<SolveResult> {
    if disc.mesh.kind() != CellKind::Triangle || disc.is_crouzeix_raviart() {
        return Err(Error::invalid("the H(div)-DG method is available on triangular DG spaces only"));
    }
    let params = StabilizationParams::new(case.nu, disc.degree()).with_sigma(sigma);
    let sys = assemble_stokes_system(disc, case, &params)?;
    let cons = build_normal_constraints(&disc.velocity, &disc.topo)?;
    let mut rhs = vec![0.0; cons.num_rows()];
    if !case.homogeneous {
        let moments = cons.field_moments(&disc.mesh, &disc.topo, disc.degree(), |x| (case.g)(x));
        let nm = cons.moments_per_facet;
        for (b, blk) in cons.blocks.iter().enumerate() {
            if !disc.topo.facets[blk.facet].is_boundary() {
                continue;
            }
            for i in 0..nm {
                rhs[b * nm + i] = (0..nm).map(|j| blk.transform[i * nm + j] * moments[b * nm + j]).sum();
            }
        }
    }
    solve_linear_saddle(&sys, Some(ConstraintRows { op: &cons, rhs: &rhs }))
}

/// Crouzeix-Raviart / P0 Stokes solve with broken forms, the mass-flux
/// penalty `gamma j_h`, and strongly imposed boundary values (facet means of
/// `g`).
pub fn solve_stokes_cr(disc: &Discretization, case: &ManufacturedCase, params: &StabilizationParams) -> Result<SolveResult> {
    check_nu(case, params)?;
    if !disc.is_crouzeix_raviart() {
        return Err(Error::invalid("solve_stokes_cr needs a Crouzeix-Raviart discretization"));
    }
    let (v, p, topo) = (&disc.velocity, &disc.pressure, &disc.topo);
    let mut a = assemble_broken_laplacian(v).scaled(params.nu);
    if params.gamma > 0.0 {
        a = a.add_scaled(&assemble_jh_flux(v, topo), params.gamma);
    }
    if params.gamma_gd > 0.0 {
        a = a.add_scaled(&assemble_graddiv(v), params.gamma_gd);
    }
    let mut sys = AssembledSystem {
        a,
        b: assemble_bh(v, p, topo, false),
        m: assemble_pressure_mean(p),
        rhs_u: assemble_load(v, |x| (case.f)(x)),
        rhs_p: vec![0.0; p.dim()],
        symmetric: true,
    };

    // boundary dof values: facet means of g (the CR dof of facet f,
    // component c is 2 f + c)
    let rule = crate::quadrature::interval_rule(crate::forms::data_degree(1));
    let mut fixed = Vec::new();
    for &f in &topo.boundary_facets {
        let facet = &topo.facets[f];
        let mut mean = [0.0; 2];
        for (t, w) in rule.iter() {
            let g = (case.g)(facet.point(&disc.mesh, t[0]));
            mean[0] += w * g[0];
            mean[1] += w * g[1];
        }
        fixed.push((2 * f, mean[0]));
        fixed.push((2 * f + 1, mean[1]));
    }
    eliminate_dirichlet(&mut sys, &fixed);
    solve_linear_saddle(&sys, None)
}

/// Symmetric elimination of prescribed velocity dofs: their rows and
/// columns become identity rows, and the known values move to the
/// right-hand side.
fn eliminate_dirichlet(sys: &mut AssembledSystem, fixed: &[(usize, f64)]) {
    use crate::sparse::TripletBuilder;
    let n = sys.velocity_dim();
    let mut is_fixed = vec![false; n];
    let mut value = vec![0.0; n];
    for &(d, g) in fixed {
        is_fixed[d] = true;
        value[d] = g;
    }
    let au = sys.a.matvec(&value);
    let bu = sys.b.matvec(&value);
    let mut ta = TripletBuilder::new(n, n);
    for (r, c, v) in sys.a.triplets() {
        if !is_fixed[r] && !is_fixed[c] {
            ta.push(r, c, v);
        }
    }
    for d in 0..n {
        if is_fixed[d] {
            ta.push(d, d, 1.0);
        }
    }
    let mut tb = TripletBuilder::new(sys.b.nrows(), n);
    for (r, c, v) in sys.b.triplets() {
        if !is_fixed[c] {
            tb.push(r, c, v);
        }
    }
    for d in 0..n {
        sys.rhs_u[d] = if is_fixed[d] { value[d] } else { sys.rhs_u[d] - au[d] };
    }
    for (r, b) in sys.rhs_p.iter_mut().zip(&bu) {
        *r -= b;
    }
    sys.a = ta.build();
    sys.b = tb.build();
}
