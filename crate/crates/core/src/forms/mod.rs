//! Discrete bilinear and linear forms assembled into sparse operators.
//!
//! Row index is always the test function, column index the trial function.
//! Facet sums run over all facets with `[[v]] = {{v}} = v` on the boundary,
//! except the upwind convection terms, which are interior only.

mod bilinear;
mod convection;
mod linear;

pub use bilinear::{assemble_bh, assemble_broken_laplacian, assemble_energy_matrix, assemble_graddiv, assemble_jh_flux, assemble_sip};
pub use convection::assemble_convection_upwind;
pub use linear::{assemble_load, assemble_pressure_mean, assemble_weak_dirichlet};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Penalty and material parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilizationParams {
    pub nu: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub gamma_gd: f64,
}

impl StabilizationParams {
    /// `sigma = 4 k^2` (at least 1), no penalties.
    pub fn new(nu: f64, k: usize) -> Self {
        StabilizationParams {
            nu,
            sigma: default_sigma(k),
            gamma: 0.0,
            gamma_gd: 0.0,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_gamma_gd(mut self, gamma_gd: f64) -> Self {
        self.gamma_gd = gamma_gd;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(Error::invalid(format!("viscosity must be positive, got {}", self.nu)));
        }
        if !(self.sigma >= 1.0) || !self.sigma.is_finite() {
            return Err(Error::invalid(format!("sigma must be at least 1, got {}", self.sigma)));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::invalid(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        if !(self.gamma_gd >= 0.0) || !self.gamma_gd.is_finite() {
            return Err(Error::invalid(format!("gamma_gd must be non-negative, got {}", self.gamma_gd)));
        }
        Ok(())
    }
}

pub fn default_sigma(k: usize) -> f64 {
    (4.0 * (k * k) as f64).max(1.0)
}

/// Volume quadrature degree for products of two basis functions.
pub(crate) fn volume_degree(k: usize) -> usize {
    2 * k + 2
}

/// Facet quadrature degree for products of two traces.
pub(crate) fn facet_degree(k: usize) -> usize {
    2 * k + 1
}

/// Quadrature degree for non-polynomial data.
pub(crate) fn data_degree(k: usize) -> usize {
    2 * k + 6
}

/// Assembled blocks of a (linearized) Stokes problem.
///
/// `a` is the velocity block, `b` the coupling with rows indexed by pressure
/// dofs, `m` the pressure mean functional.
#[derive(Clone, Debug)]
pub struct AssembledSystem {
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub m: Vec<f64>,
    pub rhs_u: Vec<f64>,
    pub rhs_p: Vec<f64>,
    pub symmetric: bool,
}

impl AssembledSystem {
    pub fn velocity_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn pressure_dim(&self) -> usize {
        self.b.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        let (nu, np) = (self.velocity_dim(), self.pressure_dim());
        if self.a.ncols() != nu || self.b.ncols() != nu || self.m.len() != np || self.rhs_u.len() != nu || self.rhs_p.len() != np {
            return Err(Error::invalid("inconsistent block dimensions in assembled system"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(StabilizationParams::new(1.0, 3).validate().is_ok());
        assert_eq!(StabilizationParams::new(1.0, 3).sigma, 36.0);
        assert!(StabilizationParams::new(0.0, 1).validate().is_err());
        assert!(StabilizationParams::new(1.0, 1).with_sigma(0.5).validate().is_err());
        assert!(StabilizationParams::new(1.0, 1).with_gamma(-1.0).validate().is_err());
        assert!(StabilizationParams::new(1.0, 1).with_gamma_gd(f64::NAN).validate().is_err());
    }
}
