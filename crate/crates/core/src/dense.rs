//! Small dense kernels for cell-local systems.

use crate::error::{Error, Result};

/// Solves `a x = b` in place (row-major `n x n`, `b` holds `nrhs` columns
/// stored row-major as `n x nrhs`) by Gaussian elimination with partial
/// pivoting. `a` is overwritten.
pub(crate) fn lu_solve(a: &mut [f64], n: usize, b: &mut [f64], nrhs: usize) -> Result<()> {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if !(a[pivot * n + col].abs() > 1e-14 * scale) {
            return Err(Error::Internal(format!("singular local system (pivot {col} of {n})")));
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            for k in 0..nrhs {
                b.swap(col * nrhs + k, pivot * nrhs + k);
            }
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / d;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            for k in 0..nrhs {
                b[row * nrhs + k] -= factor * b[col * nrhs + k];
            }
        }
    }
    for col in (0..n).rev() {
        let d = a[col * n + col];
        for k in 0..nrhs {
            let mut s = b[col * nrhs + k];
            for j in col + 1..n {
                s -= a[col * n + j] * b[j * nrhs + k];
            }
            b[col * nrhs + k] = s / d;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let mut a = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let x = [1.0, -2.0, 0.5];
        let mut b: Vec<f64> = (0..3).map(|i| (0..3).map(|j| a[i * 3 + j] * x[j]).sum()).collect();
        lu_solve(&mut a, 3, &mut b, 1).unwrap();
        for i in 0..3 {
            assert!((b[i] - x[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_detected() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 1.0];
        assert!(lu_solve(&mut a, 2, &mut b, 1).is_err());
    }
}
