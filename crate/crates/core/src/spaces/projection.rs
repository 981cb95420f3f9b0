use super::FeSpace;
use crate::dense::lu_solve;
use crate::error::{Error, Result};
use crate::quadrature::cell_rule;

/// Cellwise `L^2` projection of a scalar field onto a discontinuous scalar
/// space, solving each cell's mass matrix.
pub fn l2_project_pressure(space: &FeSpace, f: impl Fn([f64; 2]) -> f64) -> Result<Vec<f64>> {
    l2_project_scalar_cellwise(space, |_, x| f(x))
}

/// As [`l2_project_pressure`], with a field that may depend on the cell.
pub fn l2_project_scalar_cellwise(space: &FeSpace, f: impl Fn(usize, [f64; 2]) -> f64) -> Result<Vec<f64>> {
    if space.components() != 1 || !space.is_discontinuous() {
        return Err(Error::invalid("projection target must be a discontinuous scalar space"));
    }
    let rule = cell_rule(space.mesh().kind(), 2 * space.degree() + 10);
    let ns = space.scalar_local_dim();
    let mut out = vec![0.0; space.dim()];
    for c in 0..space.mesh().num_cells() {
        let cv = space.cell_values(c, &rule);
        let mut mass = vec![0.0; ns * ns];
        let mut rhs = vec![0.0; ns];
        for q in 0..cv.num_points() {
            let fx = f(c, cv.points[q]);
            for i in 0..ns {
                let wi = cv.jxw[q] * cv.value(q, i);
                rhs[i] += wi * fx;
                for j in 0..ns {
                    mass[i * ns + j] += wi * cv.value(q, j);
                }
            }
        }
        lu_solve(&mut mass, ns, &mut rhs, 1)?;
        for (i, &d) in space.cell_dofs(c).iter().enumerate() {
            out[d] = rhs[i];
        }
    }
    Ok(out)
}
