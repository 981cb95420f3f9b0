//! Saddle-point solves for the stabilized DG, H(div)-DG and Crouzeix-Raviart
//! Stokes discretizations and Picard iteration for Navier-Stokes.

mod linear;
mod nse;
mod stokes;

use std::sync::Arc;

pub use linear::{solve_linear_saddle, ConstraintRows, LINEAR_TOLERANCE};
pub use nse::solve_nse_picard;
pub use stokes::{assemble_stokes_system, solve_stokes_cr, solve_stokes_dg, solve_stokes_hdiv};

use crate::error::{Error, Result};
use crate::mesh::{build_facet_topology, CellKind, FacetTopology, Mesh};
use crate::spaces::{build_space, Family, FeSpace, SpaceConfig};

/// Mesh, skeleton and the velocity/pressure pair of one discretization.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub mesh: Arc<Mesh>,
    pub topo: FacetTopology,
    pub velocity: FeSpace,
    pub pressure: FeSpace,
}

impl Discretization {
    /// `P_k^dc / P_{k-1}^dc` on triangles, `Q_k^dc / Q_{k-1}^dc` on quads.
    pub fn dg(mesh: &Arc<Mesh>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("velocity degree must be at least 1"));
        }
        let kind = mesh.kind();
        Ok(Discretization {
            mesh: Arc::clone(mesh),
            topo: build_facet_topology(mesh)?,
            velocity: build_space(mesh, SpaceConfig::new(Family::dg_vector(kind), k))?,
            pressure: build_space(mesh, SpaceConfig::new(Family::dg_scalar(kind), k - 1))?,
        })
    }

    /// Crouzeix-Raviart velocity with piecewise constant pressure.
    pub fn crouzeix_raviart(mesh: &Arc<Mesh>) -> Result<Self> {
        if mesh.kind() != CellKind::Triangle {
            return Err(Error::invalid("Crouzeix-Raviart elements need a triangular mesh"));
        }
        Ok(Discretization {
            mesh: Arc::clone(mesh),
            topo: build_facet_topology(mesh)?,
            velocity: build_space(mesh, SpaceConfig::new(Family::CrVector, 1))?,
            pressure: build_space(mesh, SpaceConfig::new(Family::P0Scalar, 0))?,
        })
    }

    pub fn degree(&self) -> usize {
        self.velocity.degree()
    }

    pub fn is_crouzeix_raviart(&self) -> bool {
        self.velocity.config().family == Family::CrVector
    }
}

/// Coefficients and diagnostics of one solve.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub mean_multiplier: f64,
    pub constraint_multipliers: Vec<f64>,
    /// normwise backward error of the last linear solve
    pub linear_residual: f64,
    pub picard_iters: usize,
    pub converged: bool,
}
