//! Discontinuous Galerkin Stokes and Navier-Stokes solvers with mass-flux
//! and broken grad-div penalization.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod forms;
pub mod mesh;
pub mod quadrature;
pub mod solver;
pub mod spaces;
pub mod sparse;

mod dense;

pub use error::{Error, Result};
