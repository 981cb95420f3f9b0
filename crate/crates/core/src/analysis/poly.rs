use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Bivariate polynomial `sum c_ij x^i y^j` with exact differentiation and
/// integration over boxes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), f64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn constant(c: f64) -> Self {
        Poly2::monomial(c, 0, 0)
    }

    pub fn monomial(c: f64, i: u32, j: u32) -> Self {
        let mut p = Poly2::zero();
        p.add_term(c, i, j);
        p
    }

    pub fn from_terms(terms: &[(f64, u32, u32)]) -> Self {
        let mut p = Poly2::zero();
        for &(c, i, j) in terms {
            p.add_term(c, i, j);
        }
        p
    }

    fn add_term(&mut self, c: f64, i: u32, j: u32) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&(i, j));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, u32, u32)> + '_ {
        self.terms.iter().map(|(&(i, j), &c)| (c, i, j))
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|&(i, j)| (i + j) as usize).max().unwrap_or(0)
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), &c)| c * x[0].powi(i as i32) * x[1].powi(j as i32))
            .sum()
    }

    pub fn dx(&self) -> Poly2 {
        let mut p = Poly2::zero();
        for (&(i, j), &c) in &self.terms {
            if i > 0 {
                p.add_term(c * i as f64, i - 1, j);
            }
        }
        p
    }

    pub fn dy(&self) -> Poly2 {
        let mut p = Poly2::zero();
        for (&(i, j), &c) in &self.terms {
            if j > 0 {
                p.add_term(c * j as f64, i, j - 1);
            }
        }
        p
    }

    pub fn laplacian(&self) -> Poly2 {
        self.dx().dx() + self.dy().dy()
    }

    pub fn scale(&self, s: f64) -> Poly2 {
        let mut p = Poly2::zero();
        for (&(i, j), &c) in &self.terms {
            p.add_term(s * c, i, j);
        }
        p
    }

    /// Exact integral over `[a0, b0] x [a1, b1]`.
    pub fn integrate_box(&self, min: [f64; 2], max: [f64; 2]) -> f64 {
        let anti = |n: u32, a: f64, b: f64| (b.powi(n as i32 + 1) - a.powi(n as i32 + 1)) / (n + 1) as f64;
        self.terms
            .iter()
            .map(|(&(i, j), &c)| c * anti(i, min[0], max[0]) * anti(j, min[1], max[1]))
            .sum()
    }
}

impl Add for Poly2 {
    type Output = Poly2;
    fn add(mut self, rhs: Poly2) -> Poly2 {
        for (&(i, j), &c) in &rhs.terms {
            self.add_term(c, i, j);
        }
        self
    }
}

impl Sub for Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: Poly2) -> Poly2 {
        self + rhs.scale(-1.0)
    }
}

impl Neg for Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        self.scale(-1.0)
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut p = Poly2::zero();
        for (&(i, j), &c) in &self.terms {
            for (&(k, l), &d) in &rhs.terms {
                p.add_term(c * d, i + k, j + l);
            }
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_and_integrals() {
        // chi = x^5 - 10 x^3 y^2 + 5 x y^4 is harmonic
        let chi = Poly2::from_terms(&[(1.0, 5, 0), (-10.0, 3, 2), (5.0, 1, 4)]);
        assert_eq!(chi.laplacian(), Poly2::zero());
        assert_eq!(chi.degree(), 5);
        let x = [0.3, -0.7];
        let ux = chi.dx().eval(x);
        assert!((ux - (5.0 * 0.3f64.powi(4) - 30.0 * 0.09 * 0.49 + 5.0 * 0.7f64.powi(4))).abs() < 1e-14);
        let q = Poly2::from_terms(&[(1.0, 2, 0), (3.0, 0, 1)]);
        assert!((q.integrate_box([0.0, 0.0], [1.0, 2.0]) - (2.0 / 3.0 + 6.0)).abs() < 1e-14);
        let sq = &q * &q;
        assert!((sq.eval(x) - q.eval(x).powi(2)).abs() < 1e-14);
        assert_eq!((q.clone() - q).degree(), 0);
    }
}
