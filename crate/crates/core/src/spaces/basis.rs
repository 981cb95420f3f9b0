//! Reference-cell scalar bases.

use crate::mesh::CellKind;
use crate::quadrature::cell_rule;

/// Shifted Legendre polynomials `P_n(2x - 1)` and their x-derivatives for
/// `n = 0..=k`.
pub(crate) fn legendre(k: usize, x: f64, vals: &mut [f64], ders: &mut [f64]) {
    let s = 2.0 * x - 1.0;
    vals[0] = 1.0;
    ders[0] = 0.0;
    if k == 0 {
        return;
    }
    vals[1] = s;
    ders[1] = 2.0;
    for n in 1..k {
        let nf = n as f64;
        vals[n + 1] = ((2.0 * nf + 1.0) * s * vals[n] - nf * vals[n - 1]) / (nf + 1.0);
        // d/ds P_{n+1} = d/ds P_{n-1} + (2n+1) P_n, times ds/dx = 2
        ders[n + 1] = ders[n - 1] + 2.0 * (2.0 * nf + 1.0) * vals[n];
    }
}

/// `L^2`-orthonormal modal basis of `P_k` (triangle) or `Q_k` (square) on the
/// reference cell.
///
/// Built by Gram-Schmidt over products of shifted Legendre polynomials,
/// ordered by total degree so that the first function is the constant.
#[derive(Clone, Debug)]
pub struct ModalBasis {
    kind: CellKind,
    degree: usize,
    exponents: Vec<(usize, usize)>,
    /// row-major `dim x dim`, lower triangular
    coeffs: Vec<f64>,
}

impl ModalBasis {
    pub fn new(kind: CellKind, degree: usize) -> Self {
        let mut exponents = Vec::new();
        for total in 0..=2 * degree {
            for j in 0..=total {
                let i = total - j;
                let keep = match kind {
                    CellKind::Triangle => total <= degree,
                    CellKind::Quadrilateral => i <= degree && j <= degree,
                };
                if keep {
                    exponents.push((i, j));
                }
            }
        }
        let dim = exponents.len();
        let mut basis = ModalBasis {
            kind,
            degree,
            exponents,
            coeffs: identity(dim),
        };
        basis.orthonormalize();
        basis
    }

    pub fn kind(&self) -> CellKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    fn eval_raw(&self, xi: [f64; 2], vals: &mut [f64], grads: &mut [[f64; 2]]) {
        let k = self.degree;
        let mut lx = [0.0; 16];
        let mut dx = [0.0; 16];
        let mut ly = [0.0; 16];
        let mut dy = [0.0; 16];
        legendre(k, xi[0], &mut lx, &mut dx);
        legendre(k, xi[1], &mut ly, &mut dy);
        for (m, &(i, j)) in self.exponents.iter().enumerate() {
            vals[m] = lx[i] * ly[j];
            grads[m] = [dx[i] * ly[j], lx[i] * dy[j]];
        }
    }

    /// Values and reference gradients of every basis function at `xi`.
    pub fn eval(&self, xi: [f64; 2], vals: &mut [f64], grads: &mut [[f64; 2]]) {
        let n = self.dim();
        let mut rv = [0.0; 64];
        let mut rg = [[0.0; 2]; 64];
        self.eval_raw(xi, &mut rv[..n], &mut rg[..n]);
        for a in 0..n {
            let row = &self.coeffs[a * n..a * n + a + 1];
            let mut v = 0.0;
            let mut g = [0.0; 2];
            for (b, c) in row.iter().enumerate() {
                v += c * rv[b];
                g[0] += c * rg[b][0];
                g[1] += c * rg[b][1];
            }
            vals[a] = v;
            grads[a] = g;
        }
    }

    /// Reference Gram matrix `(phi_a, phi_b)` computed by quadrature.
    pub fn gram_matrix(&self) -> Vec<f64> {
        let n = self.dim();
        let rule = cell_rule(self.kind, 2 * self.degree + 2);
        let mut vals = vec![0.0; n];
        let mut grads = vec![[0.0; 2]; n];
        let mut g = vec![0.0; n * n];
        for (p, w) in rule.iter() {
            self.eval(p, &mut vals, &mut grads);
            for a in 0..n {
                for b in 0..n {
                    g[a * n + b] += w * vals[a] * vals[b];
                }
            }
        }
        g
    }

    /// Modified Gram-Schmidt, two passes, in the reference `L^2` product.
    fn orthonormalize(&mut self) {
        let n = self.dim();
        let rule = cell_rule(self.kind, 2 * self.degree + 2);
        // raw values at quadrature points
        let mut table = vec![0.0; rule.len() * n];
        let mut rg = vec![[0.0; 2]; n];
        for (q, p) in rule.points.iter().enumerate() {
            self.eval_raw(*p, &mut table[q * n..(q + 1) * n], &mut rg);
        }
        let inner = |c: &[f64], d: &[f64]| -> f64 {
            let mut s = 0.0;
            for (q, w) in rule.weights.iter().enumerate() {
                let row = &table[q * n..(q + 1) * n];
                let u: f64 = c.iter().zip(row).map(|(a, b)| a * b).sum();
                let v: f64 = d.iter().zip(row).map(|(a, b)| a * b).sum();
                s += w * u * v;
            }
            s
        };
        let mut done: Vec<Vec<f64>> = Vec::with_capacity(n);
        for a in 0..n {
            let mut c = vec![0.0; n];
            c[a] = 1.0;
            for _ in 0..2 {
                for prev in &done {
                    let proj = inner(&c, prev);
                    for (ci, pi) in c.iter_mut().zip(prev) {
                        *ci -= proj * pi;
                    }
                }
            }
            let norm = inner(&c, &c).sqrt();
            for ci in &mut c {
                *ci /= norm;
            }
            done.push(c);
        }
        for (a, c) in done.iter().enumerate() {
            self.coeffs[a * n..(a + 1) * n].copy_from_slice(c);
        }
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// Number of scalar functions of `P_k` on a triangle or `Q_k` on a square.
pub fn modal_dim(kind: CellKind, degree: usize) -> usize {
    match kind {
        CellKind::Triangle => (degree + 1) * (degree + 2) / 2,
        CellKind::Quadrilateral => (degree + 1) * (degree + 1),
    }
}

/// Crouzeix-Raviart functions on the reference triangle: the function tied to
/// local facet `i` is `1 - 2 lambda_{i+2}`, equal to one at that facet's
/// midpoint and zero at the other two.
pub(crate) fn crouzeix_raviart_eval(xi: [f64; 2], vals: &mut [f64], grads: &mut [[f64; 2]]) {
    let lambda = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
    let dlambda = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    for i in 0..3 {
        let opp = (i + 2) % 3;
        vals[i] = 1.0 - 2.0 * lambda[opp];
        grads[i] = [-2.0 * dlambda[opp][0], -2.0 * dlambda[opp][1]];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_matches_closed_forms() {
        let mut v = [0.0; 4];
        let mut d = [0.0; 4];
        let x = 0.3;
        legendre(3, x, &mut v, &mut d);
        let s: f64 = 2.0 * x - 1.0;
        assert!((v[2] - 0.5 * (3.0 * s * s - 1.0)).abs() < 1e-15);
        assert!((v[3] - 0.5 * (5.0 * s.powi(3) - 3.0 * s)).abs() < 1e-15);
        assert!((d[3] - 2.0 * 0.5 * (15.0 * s * s - 3.0)).abs() < 1e-14);
    }

    #[test]
    fn gram_matrix_is_identity_up_to_degree_six() {
        for kind in [CellKind::Triangle, CellKind::Quadrilateral] {
            for k in 0..=6 {
                let b = ModalBasis::new(kind, k);
                assert_eq!(b.dim(), modal_dim(kind, k));
                let g = b.gram_matrix();
                let n = b.dim();
                for i in 0..n {
                    for j in 0..n {
                        let e = if i == j { 1.0 } else { 0.0 };
                        assert!((g[i * n + j] - e).abs() < 1e-11, "{kind:?} k={k} ({i},{j}) {}", g[i * n + j]);
                    }
                }
            }
        }
    }

    #[test]
    fn first_function_is_constant() {
        let b = ModalBasis::new(CellKind::Triangle, 3);
        let mut v = vec![0.0; b.dim()];
        let mut g = vec![[0.0; 2]; b.dim()];
        b.eval([0.2, 0.7], &mut v, &mut g);
        assert!((v[0] - 2f64.sqrt()).abs() < 1e-14);
        assert!(g[0][0].abs() < 1e-14 && g[0][1].abs() < 1e-14);
    }

    #[test]
    fn gradients_match_finite_differences() {
        for kind in [CellKind::Triangle, CellKind::Quadrilateral] {
            let b = ModalBasis::new(kind, 4);
            let n = b.dim();
            let (mut v0, mut v1, mut v2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
            let mut g = vec![[0.0; 2]; n];
            let mut scratch = vec![[0.0; 2]; n];
            let p = [0.21, 0.33];
            let h = 1e-6;
            b.eval(p, &mut v0, &mut g);
            b.eval([p[0] + h, p[1]], &mut v1, &mut scratch);
            b.eval([p[0] - h, p[1]], &mut v2, &mut scratch);
            for a in 0..n {
                assert!(((v1[a] - v2[a]) / (2.0 * h) - g[a][0]).abs() < 1e-6 * (1.0 + g[a][0].abs()));
            }
            b.eval([p[0], p[1] + h], &mut v1, &mut scratch);
            b.eval([p[0], p[1] - h], &mut v2, &mut scratch);
            for a in 0..n {
                assert!(((v1[a] - v2[a]) / (2.0 * h) - g[a][1]).abs() < 1e-6 * (1.0 + g[a][1].abs()));
            }
        }
    }

    #[test]
    fn crouzeix_raviart_midpoint_values() {
        let mids = [[0.5, 0.0], [0.5, 0.5], [0.0, 0.5]];
        let mut v = [0.0; 3];
        let mut g = [[0.0; 2]; 3];
        for (f, m) in mids.iter().enumerate() {
            crouzeix_raviart_eval(*m, &mut v, &mut g);
            for i in 0..3 {
                let e = if i == f { 1.0 } else { 0.0 };
                assert!((v[i] - e).abs() < 1e-15);
            }
        }
    }
}
