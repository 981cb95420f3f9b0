use faer::linalg::solvers::SolveCore;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Conj, Mat};

use super::SolveResult;
use crate::error::{Error, Result};
use crate::forms::AssembledSystem;
use crate::spaces::NormalContinuityConstraints;
use crate::sparse::{SparseMatrix, TripletBuilder};

/// Relative residual (normwise backward error) every linear solve must reach.
pub const LINEAR_TOLERANCE: f64 = 1e-10;

/// Extra refinement passes allowed after the first when the residual is still
/// above [`LINEAR_TOLERANCE`].
const EXTRA_REFINEMENT_PASSES: usize = 3;

/// Normal-continuity rows with their right-hand side.
#[derive(Clone, Copy, Debug)]
pub struct ConstraintRows<'a> {
    pub op: &'a NormalContinuityConstraints,
    pub rhs: &'a [f64],
}

/// Block layout `[u | p | mu | lambda]` of the saddle-point system.
struct Layout {
    nu: usize,
    np: usize,
    nl: usize,
}

impl Layout {
    fn n(&self) -> usize {
        self.nu + self.np + 1 + self.nl
    }

    fn block_of(&self, i: usize) -> &'static str {
        if i < self.nu {
            "velocity"
        } else if i < self.nu + self.np {
            "pressure"
        } else if i == self.nu + self.np {
            "pressure-mean multiplier"
        } else {
            "normal-continuity multiplier"
        }
    }
}

/// Full saddle-point operator.
fn build_kkt(sys: &AssembledSystem, cons: Option<ConstraintRows<'_>>, lay: &Layout) -> SparseMatrix {
    let mut tb = base_triplets(sys, cons, lay);
    let mu = lay.nu + lay.np;
    for (i, &m) in sys.m.iter().enumerate() {
        if m != 0.0 {
            tb.push(mu, lay.nu + i, m);
            tb.push(lay.nu + i, mu, m);
        }
    }
    tb.build()
}

/// Operator without the mean-value border: the multiplier row is an identity
/// row and pressure dof `pin` carries `alpha` on the diagonal.
fn build_pinned(sys: &AssembledSystem, cons: Option<ConstraintRows<'_>>, lay: &Layout, pin: usize, alpha: f64) -> SparseMatrix {
    let mut tb = base_triplets(sys, cons, lay);
    let mu = lay.nu + lay.np;
    tb.push(mu, mu, 1.0);
    tb.push(lay.nu + pin, lay.nu + pin, alpha);
    tb.build()
}

fn base_triplets(sys: &AssembledSystem, cons: Option<ConstraintRows<'_>>, lay: &Layout) -> TripletBuilder {
    let nu = lay.nu;
    let mut tb = TripletBuilder::new(lay.n(), lay.n());
    for (r, c, v) in sys.a.triplets() {
        tb.push(r, c, v);
    }
    for (r, c, v) in sys.b.triplets() {
        tb.push(nu + r, c, v);
        tb.push(c, nu + r, v);
    }
    if let Some(cons) = cons {
        let off = nu + lay.np + 1;
        for (r, c, v) in cons.op.triplets() {
            tb.push(off + r, c, v);
            tb.push(c, off + r, v);
        }
    }
    tb
}

/// Exact inverse of the bordered operator from a sparse LU of the pinned
/// one. The two differ by `U C U^T` with `U = [e_pin, (m, 0), e_mu]` and
/// `C = [[-alpha, 0, 0], [0, 0, 1], [0, 1, -1]]`, so Woodbury applies.
struct BorderedSolver {
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    n: usize,
    pin: usize,
    mu: usize,
    m_ext: Vec<f64>,
    z: [Vec<f64>; 3],
    s_inv: [f64; 9],
}

impl BorderedSolver {
    fn new(pinned: &SparseMatrix, lay: &Layout, m: &[f64], pin: usize, alpha: f64) -> Result<Self> {
        let n = lay.n();
        let triplets: Vec<Triplet<usize, usize, f64>> = pinned.triplets().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::Solver(format!("cannot build sparse matrix: {e:?}")))?;
        let lu = mat.sp_lu().map_err(|e| match e {
            faer::sparse::linalg::LuError::SymbolicSingular { index } => Error::Solver(format!(
                "structurally singular saddle-point system at row {index} ({} block)",
                lay.block_of(index)
            )),
            other => Error::Solver(format!("sparse LU failed: {other:?}")),
        })?;
        let mut m_ext = vec![0.0; n];
        m_ext[lay.nu..lay.nu + lay.np].copy_from_slice(m);
        let mut me = BorderedSolver {
            lu,
            n,
            pin: lay.nu + pin,
            mu: lay.nu + lay.np,
            m_ext,
            z: [Vec::new(), Vec::new(), Vec::new()],
            s_inv: [0.0; 9],
        };
        let mut e_pin = vec![0.0; n];
        e_pin[me.pin] = 1.0;
        let mut e_mu = vec![0.0; n];
        e_mu[me.mu] = 1.0;
        me.z = [me.solve_pinned(&e_pin)?, me.solve_pinned(&me.m_ext)?, me.solve_pinned(&e_mu)?];
        // S = C^{-1} + U^T Z
        let c_inv = [-1.0 / alpha, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0];
        let mut s = c_inv;
        for i in 0..3 {
            let ut_z: [f64; 3] = std::array::from_fn(|j| me.u_dot(i, &me.z[j]));
            for j in 0..3 {
                s[i * 3 + j] += ut_z[j];
            }
        }
        let mut inv = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        crate::dense::lu_solve(&mut s, 3, &mut inv, 3)
            .map_err(|_| Error::Solver("singular mean-value border (pressure kernel not constant)".into()))?;
        // lu_solve leaves X in row-major n x nrhs layout
        me.s_inv = inv;
        Ok(me)
    }

    fn u_dot(&self, i: usize, v: &[f64]) -> f64 {
        match i {
            0 => v[self.pin],
            1 => self.m_ext.iter().zip(v).map(|(a, b)| a * b).sum(),
            _ => v[self.mu],
        }
    }

    fn solve_pinned(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut col = Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_in_place_with_conj(Conj::No, col.as_mut());
        let x: Vec<f64> = (0..self.n).map(|i| col[(i, 0)]).collect();
        Ok(x)
    }

    fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut y = self.solve_pinned(b)?;
        let uy: [f64; 3] = std::array::from_fn(|i| self.u_dot(i, &y));
        for (j, z) in self.z.iter().enumerate() {
            let w: f64 = (0..3).map(|i| self.s_inv[j * 3 + i] * uy[i]).sum();
            for (yk, zk) in y.iter_mut().zip(z) {
                *yk -= w * zk;
            }
        }
        Ok(y)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `||b - K x|| / (||b|| + || |K| |x| ||)`: the relative residual that stays
/// meaningful when `K x` is a small difference of large terms.
fn backward_error(kkt: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
    let r = kkt.residual_compensated(x, b);
    norm(&r) / (norm(b) + norm(&kkt.abs_matvec(x)))
}

/// Solves
/// `[A B^T 0 L^T; B 0 m 0; 0 m^T 0 0; L 0 0 0] [u; p; mu; lambda] = [f; g; 0; r]`
/// by sparse LU with iterative refinement.
pub fn solve_linear_saddle(sys: &AssembledSystem, constraints: Option<ConstraintRows<'_>>) -> Result<SolveResult> {
    sys.validate()?;
    let lay = Layout {
        nu: sys.velocity_dim(),
        np: sys.pressure_dim(),
        nl: constraints.map_or(0, |c| c.op.num_rows()),
    };
    if let Some(c) = constraints {
        if c.op.velocity_dim != lay.nu || c.rhs.len() != lay.nl {
            return Err(Error::invalid("constraint rows do not match the velocity space"));
        }
    }
    let n = lay.n();
    let mut rhs = Vec::with_capacity(n);
    rhs.extend_from_slice(&sys.rhs_u);
    rhs.extend_from_slice(&sys.rhs_p);
    rhs.push(0.0);
    if let Some(c) = constraints {
        rhs.extend_from_slice(c.rhs);
    }

    let kkt = build_kkt(sys, constraints, &lay);
    let rhs_norm = norm(&rhs);
    let mut x = vec![0.0; n];
    let mut residual = 0.0;
    if rhs_norm > 0.0 {
        let pin = (0..lay.np)
            .max_by(|&a, &b| sys.m[a].abs().total_cmp(&sys.m[b].abs()))
            .filter(|&j| sys.m[j] != 0.0)
            .ok_or_else(|| Error::invalid("pressure mean functional is zero"))?;
        let alpha = sys.m[pin].abs();
        let pinned = build_pinned(sys, constraints, &lay, pin, alpha);
        let solver = BorderedSolver::new(&pinned, &lay, &sys.m, pin, alpha)?;
        x = solver.solve(&rhs)?;
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::Solver(format!(
                "zero pivot in sparse LU: non-finite solution in the {} block",
                lay.block_of(i)
            )));
        }
        let res = |x: &[f64]| kkt.residual_compensated(x, &rhs);
        // one refinement pass, more only while the contract is unmet
        for pass in 0..=EXTRA_REFINEMENT_PASSES {
            let r = res(&x);
            if pass > 0 && norm(&r) <= LINEAR_TOLERANCE * (rhs_norm + norm(&kkt.abs_matvec(&x))) {
                break;
            }
            let d = solver.solve(&r)?;
            for (xi, di) in x.iter_mut().zip(&d) {
                *xi += di;
            }
        }
        residual = backward_error(&kkt, &x, &rhs);
        if !(residual <= LINEAR_TOLERANCE) {
            return Err(Error::NonConvergence {
                residual,
                tolerance: LINEAR_TOLERANCE,
            });
        }
    }
    let (nu, np) = (lay.nu, lay.np);
    Ok(SolveResult {
        u: x[..nu].to_vec(),
        p: x[nu..nu + np].to_vec(),
        mean_multiplier: x[nu + np],
        constraint_multipliers: x[nu + np + 1..].to_vec(),
        linear_residual: residual,
        picard_iters: 0,
        converged: true,
    })
}
