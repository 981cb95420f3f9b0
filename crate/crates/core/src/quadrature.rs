//! Gauss-type quadrature on the reference interval, triangle and square.

use crate::mesh::CellKind;

/// Points and positive weights on a reference domain, exact for polynomials
/// of total degree up to `exact_degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    /// Integral of `f` over the reference domain.
    pub fn integrate(&self, f: impl Fn([f64; 2]) -> f64) -> f64 {
        self.iter().map(|(p, w)| w * f(p)).sum()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre polynomial.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            // P_1 = z, root 0, weight 2
            z = 0.0;
            dp = 1.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn interval_nodes(npts: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(npts);
    (x.iter().map(|z| 0.5 * (z + 1.0)).collect(), w.iter().map(|wi| 0.5 * wi).collect())
}

/// Gauss-Legendre rule on [0, 1] with `ceil((degree + 1) / 2)` points. Points
/// are returned as `[t, 0]`.
pub fn interval_rule(degree: usize) -> QuadratureRule {
    let n = (degree + 2) / 2;
    let (x, w) = interval_nodes(n);
    QuadratureRule {
        points: x.into_iter().map(|t| [t, 0.0]).collect(),
        weights: w,
        exact_degree: 2 * n - 1,
    }
}

/// Rule on the unit triangle via the collapsed (Duffy) map
/// `(u, v) -> (u, v (1 - u))` of a tensor Gauss rule.
pub fn triangle_rule(degree: usize) -> QuadratureRule {
    if degree <= 1 {
        return QuadratureRule {
            points: vec![[1.0 / 3.0, 1.0 / 3.0]],
            weights: vec![0.5],
            exact_degree: 1,
        };
    }
    // the Jacobian factor (1 - u) raises the degree in u by one
    let nu = (degree + 3) / 2;
    let nv = (degree + 2) / 2;
    let (xu, wu) = interval_nodes(nu);
    let (xv, wv) = interval_nodes(nv);
    let mut points = Vec::with_capacity(nu * nv);
    let mut weights = Vec::with_capacity(nu * nv);
    for (u, wu) in xu.iter().zip(&wu) {
        for (v, wv) in xv.iter().zip(&wv) {
            points.push([*u, v * (1.0 - u)]);
            weights.push(wu * wv * (1.0 - u));
        }
    }
    QuadratureRule {
        points,
        weights,
        exact_degree: degree,
    }
}

/// Tensor Gauss rule on the unit square, exact to `degree` in each variable.
pub fn quad_rule(degree: usize) -> QuadratureRule {
    let n = (degree + 2) / 2;
    let (x, w) = interval_nodes(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (yj, wj) in x.iter().zip(&w) {
        for (xi, wi) in x.iter().zip(&w) {
            points.push([*xi, *yj]);
            weights.push(wi * wj);
        }
    }
    QuadratureRule {
        points,
        weights,
        exact_degree: 2 * n - 1,
    }
}

/// Volume rule for the given cell kind.
pub fn cell_rule(kind: CellKind, degree: usize) -> QuadratureRule {
    match kind {
        CellKind::Triangle => triangle_rule(degree),
        CellKind::Quadrilateral => quad_rule(degree),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_and_two_point_rules() {
        let r = interval_rule(1);
        assert_eq!(r.points, vec![[0.5, 0.0]]);
        assert_eq!(r.weights, vec![1.0]);
        let r = interval_rule(3);
        let d = 1.0 / (2.0 * 3f64.sqrt());
        assert_eq!(r.len(), 2);
        assert!((r.points[0][0] - (0.5 - d)).abs() < 1e-15);
        assert!((r.points[1][0] - (0.5 + d)).abs() < 1e-15);
        assert!(r.weights.iter().all(|w| (w - 0.5).abs() < 1e-15));
        assert!((r.integrate(|p| p[0].powi(3)) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn triangle_examples() {
        let r = triangle_rule(0);
        assert_eq!(r.points, vec![[1.0 / 3.0, 1.0 / 3.0]]);
        assert_eq!(r.weights, vec![0.5]);
        let r = triangle_rule(3);
        assert!((r.integrate(|p| p[0] * p[0] * p[1]) - 1.0 / 60.0).abs() < 1e-15);
        for d in 0..20 {
            let s: f64 = triangle_rule(d).weights.iter().sum();
            assert!((s - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn quad_examples() {
        let r = quad_rule(1);
        assert_eq!(r.points, vec![[0.5, 0.5]]);
        assert_eq!(r.weights, vec![1.0]);
        let r = quad_rule(3);
        assert!((r.integrate(|p| p[0].powi(3) * p[1].powi(3)) - 1.0 / 16.0).abs() < 1e-15);
        assert!((quad_rule(9).weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn high_order_gauss_nodes_are_accurate() {
        for n in 1..30 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            assert!(w.iter().all(|&wi| wi > 0.0));
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }
}
