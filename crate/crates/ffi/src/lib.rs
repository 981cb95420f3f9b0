//! C interface to the DG Stokes/Navier-Stokes solvers.
//!
//! Meshes and solutions are opaque handles owned by the caller and released
//! with the matching `*_free` function. Every entry point returns a
//! [`DgplStatus`]; on failure a message is available from
//! [`dgpl_last_error_message`] on the same thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use dgpl_core::analysis::{builtin_case, compute_errors, ManufacturedCase};
use dgpl_core::cli::{run_selfcheck, Fault};
use dgpl_core::forms::StabilizationParams;
use dgpl_core::mesh::{build_structured_quad_mesh, build_structured_triangle_mesh, load_mesh, BoundingBox, CellKind, Mesh};
use dgpl_core::solver::{solve_nse_picard, solve_stokes_cr, solve_stokes_dg, solve_stokes_hdiv, Discretization, SolveResult};
use dgpl_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgplStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidMesh = 3,
    SolverFailure = 4,
    NotConverged = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgplCellKind {
    Triangle = 0,
    Quadrilateral = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgplMethod {
    /// stabilized DG, pressure degree k - 1
    Dg = 0,
    /// normal-continuous H(div)-DG; triangles, `gamma` ignored
    Hdiv = 1,
    /// Crouzeix-Raviart/P0; triangles, k = 1
    CrouzeixRaviart = 2,
    /// stabilized DG with Picard iteration for the convective term
    DgPicard = 3,
}

/// Solver parameters. `sigma <= 0` selects the default penalty
/// `max(4 k^2, 1)`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DgplParams {
    pub k: usize,
    pub nu: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub gamma_gd: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DgplErrorReport {
    pub l2_u: f64,
    pub h1_broken_u: f64,
    pub l2_p: f64,
    pub div_broken: f64,
    pub nj: f64,
    pub energy: f64,
    pub e_sharp: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DgplSolveInfo {
    pub velocity_dofs: usize,
    pub pressure_dofs: usize,
    pub linear_residual: f64,
    pub picard_iters: usize,
    /// 1 when the Picard iteration met its tolerance; always 1 for linear solves
    pub converged: i32,
}

/// Opaque mesh handle.
pub struct DgplMesh {
    mesh: Arc<Mesh>,
}

/// Opaque solution handle; keeps the discretization and data it was
/// computed with.
pub struct DgplSolution {
    disc: Discretization,
    case: ManufacturedCase,
    sigma: f64,
    result: SolveResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(DgplStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidArgument(_) => DgplStatus::InvalidArgument,
            Error::MeshLoad { .. } | Error::InvalidMesh(_) | Error::Topology(_) => DgplStatus::InvalidMesh,
            Error::NonConvergence { .. } => DgplStatus::NotConverged,
            _ => DgplStatus::SolverFailure,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(DgplStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records its error message and converts panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DgplStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            DgplStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            DgplStatus::Panic
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(DgplStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into the library on this
/// thread.
#[no_mangle]
pub extern "C" fn dgpl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dgpl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parameters with the library defaults for degree `k` and viscosity `nu`.
#[no_mangle]
pub extern "C" fn dgpl_params_default(k: usize, nu: f64) -> DgplParams {
    DgplParams {
        k,
        nu,
        sigma: 0.0,
        gamma: 0.0,
        gamma_gd: 0.0,
        picard_tol: 1e-8,
        picard_max_iters: 50,
    }
}

/// Structured `n x n` mesh of the box `[xmin, xmax] x [ymin, ymax]`;
/// triangles split each square along its lower-right to upper-left diagonal.
#[no_mangle]
pub unsafe extern "C" fn dgpl_mesh_structured(
    kind: DgplCellKind,
    n: usize,
    xmin: f64,
    ymin: f64,
    xmax: f64,
    ymax: f64,
    out: *mut *mut DgplMesh,
) -> DgplStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let bbox = BoundingBox::new([xmin, ymin], [xmax, ymax]);
        let mesh = match kind {
            DgplCellKind::Triangle => build_structured_triangle_mesh(n, bbox)?,
            DgplCellKind::Quadrilateral => build_structured_quad_mesh(n, bbox)?,
        };
        write_out(out, DgplMesh { mesh: Arc::new(mesh) });
        Ok(())
    })
}

/// Mesh from the plain-text vertex/cell format.
#[no_mangle]
pub unsafe extern "C" fn dgpl_mesh_from_text(text: *const c_char, out: *mut *mut DgplMesh) -> DgplStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = c_str(text, "text")?;
        let mesh = load_mesh(text)?;
        write_out(out, DgplMesh { mesh: Arc::new(mesh) });
        Ok(())
    })
}

/// Number of cells, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn dgpl_mesh_num_cells(mesh: *const DgplMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.num_cells())
}

/// Number of vertices, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn dgpl_mesh_num_vertices(mesh: *const DgplMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.num_vertices())
}

#[no_mangle]
pub unsafe extern "C" fn dgpl_mesh_free(mesh: *mut DgplMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Solves one of the built-in cases (`noflow`, `vortex`, `potential`) on
/// `mesh`. Picard nonconvergence is reported through
/// [`dgpl_solution_info`], not as an error.
#[no_mangle]
pub unsafe extern "C" fn dgpl_solve(
    mesh: *const DgplMesh,
    case_name: *const c_char,
    method: DgplMethod,
    params: *const DgplParams,
    out: *mut *mut DgplSolution,
) -> DgplStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let mesh = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        let p = *params.as_ref().ok_or_else(|| null("params"))?;
        let name = c_str(case_name, "case_name")?;
        let case = builtin_case(name, p.nu)?;
        let mut sp = StabilizationParams::new(p.nu, p.k).with_gamma(p.gamma).with_gamma_gd(p.gamma_gd);
        if p.sigma > 0.0 {
            sp = sp.with_sigma(p.sigma);
        }
        let (disc, result) = match method {
            DgplMethod::Dg | DgplMethod::DgPicard | DgplMethod::Hdiv => {
                let disc = Discretization::dg(&mesh.mesh, p.k)?;
                let r = match method {
                    DgplMethod::Dg => solve_stokes_dg(&disc, &case, &sp)?,
                    DgplMethod::Hdiv => solve_stokes_hdiv(&disc, &case, sp.sigma)?,
                    _ => solve_nse_picard(&disc, &case, &sp, p.picard_tol, p.picard_max_iters)?,
                };
                (disc, r)
            }
            DgplMethod::CrouzeixRaviart => {
                if mesh.mesh.kind() != CellKind::Triangle {
                    return Err(Failure(
                        DgplStatus::InvalidArgument,
                        "Crouzeix-Raviart needs a triangular mesh".into(),
                    ));
                }
                let disc = Discretization::crouzeix_raviart(&mesh.mesh)?;
                let r = solve_stokes_cr(&disc, &case, &sp)?;
                (disc, r)
            }
        };
        write_out(
            out,
            DgplSolution {
                disc,
                case,
                sigma: sp.sigma,
                result,
            },
        );
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dgpl_solution_info(sol: *const DgplSolution, out: *mut DgplSolveInfo) -> DgplStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = DgplSolveInfo {
            velocity_dofs: sol.result.u.len(),
            pressure_dofs: sol.result.p.len(),
            linear_residual: sol.result.linear_residual,
            picard_iters: sol.result.picard_iters,
            converged: i32::from(sol.result.converged),
        };
        Ok(())
    })
}

/// Error norms against the exact solution of the case the solution was
/// computed for.
#[no_mangle]
pub unsafe extern "C" fn dgpl_solution_errors(sol: *const DgplSolution, out: *mut DgplErrorReport) -> DgplStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let e = compute_errors(&sol.disc, &sol.result, &sol.case, sol.sigma);
        *out = DgplErrorReport {
            l2_u: e.l2_u,
            h1_broken_u: e.h1_broken_u,
            l2_p: e.l2_p,
            div_broken: e.div_broken,
            nj: e.nj,
            energy: e.energy,
            e_sharp: e.e_sharp,
        };
        Ok(())
    })
}

unsafe fn copy_coefficients(src: &[f64], buf: *mut f64, len: usize, needed: *mut usize) -> Result<(), Failure> {
    if let Some(n) = needed.as_mut() {
        *n = src.len();
    }
    if buf.is_null() {
        return if len == 0 { Ok(()) } else { Err(null("buf")) };
    }
    if len < src.len() {
        return Err(Failure(
            DgplStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Copies the velocity coefficients (component-major per cell) into `buf`.
/// `needed` receives the count; pass `buf = NULL, len = 0` to query it.
#[no_mangle]
pub unsafe extern "C" fn dgpl_solution_velocity(sol: *const DgplSolution, buf: *mut f64, len: usize, needed: *mut usize) -> DgplStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        copy_coefficients(&sol.result.u, buf, len, needed)
    })
}

/// As [`dgpl_solution_velocity`], for the pressure coefficients.
#[no_mangle]
pub unsafe extern "C" fn dgpl_solution_pressure(sol: *const DgplSolution, buf: *mut f64, len: usize, needed: *mut usize) -> DgplStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        copy_coefficients(&sol.result.p, buf, len, needed)
    })
}

#[no_mangle]
pub unsafe extern "C" fn dgpl_solution_free(sol: *mut DgplSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Runs the fast invariant suite; `passed` receives 1 when every check
/// passes.
#[no_mangle]
pub unsafe extern "C" fn dgpl_selfcheck(passed: *mut i32) -> DgplStatus {
    guard(|| {
        let passed = passed.as_mut().ok_or_else(|| null("passed"))?;
        let report = run_selfcheck(Fault::default());
        *passed = i32::from(report.passed());
        if !report.passed() {
            set_last_error(&report.render());
        }
        Ok(())
    })
}
