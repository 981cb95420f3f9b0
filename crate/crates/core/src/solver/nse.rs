use super::linear::solve_linear_saddle;
use super::stokes::assemble_stokes_system;
use super::{Discretization, SolveResult};
use crate::analysis::ManufacturedCase;
use crate::error::{Error, Result};
use crate::forms::{assemble_convection_upwind, assemble_energy_matrix, StabilizationParams};

/// Picard iteration for the steady Navier-Stokes equations, starting from
/// the Stokes solution. Stops when the relative energy-norm increment is at
/// most `tol`; reaching `max_iters` returns the last iterate with
/// `converged = false`.
pub fn solve_nse_picard(
    disc: &Discretization,
    case: &ManufacturedCase,
    params: &StabilizationParams,
    tol: f64,
    max_iters: usize,
) -> Result<SolveResult> {
    if !(tol > 0.0) || max_iters == 0 {
        return Err(Error::invalid("Picard iteration needs tol > 0 and max_iters >= 1"));
    }
    let stokes = assemble_stokes_system(disc, case, params)?;
    let energy = assemble_energy_matrix(&disc.velocity, &disc.topo, params.sigma);
    let enorm = |v: &[f64]| energy.bilinear(v, v).max(0.0).sqrt();

    let mut current = solve_linear_saddle(&stokes, None)?;
    let mut sys = stokes.clone();
    sys.symmetric = false;
    for it in 1..=max_iters {
        let conv = assemble_convection_upwind(&disc.velocity, &disc.topo, &current.u);
        sys.a = stokes.a.add_scaled(&conv, 1.0);
        let mut next = solve_linear_saddle(&sys, None)?;
        let diff: Vec<f64> = next.u.iter().zip(&current.u).map(|(a, b)| a - b).collect();
        let scale = enorm(&next.u);
        let inc = if scale > 0.0 { enorm(&diff) / scale } else { enorm(&diff) };
        next.picard_iters = it;
        next.converged = inc <= tol;
        current = next;
        if current.converged {
            return Ok(current);
        }
    }
    Ok(current)
}
