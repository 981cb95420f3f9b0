use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::poly::Poly2;
use crate::error::{Error, Result};
use crate::mesh::BoundingBox;

pub type ScalarField = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync>;
/// `grad[c][d] = d u_c / d x_d`
pub type TensorField = Arc<dyn Fn([f64; 2]) -> [[f64; 2]; 2] + Send + Sync>;

/// Exact solution and data of a Stokes (`convective = false`) or steady
/// Navier-Stokes problem `-nu lap u + (u.grad) u + grad p = f`, `u = g` on the
/// boundary.
#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: String,
    pub nu: f64,
    pub domain: BoundingBox,
    pub u: VectorField,
    pub grad_u: TensorField,
    pub p: ScalarField,
    pub f: VectorField,
    pub g: VectorField,
    /// mean of `p` over the domain
    pub p_mean: f64,
    pub convective: bool,
    /// set when `u` and `p` are polynomials of at most this degree
    pub polynomial_degree: Option<usize>,
    /// `g` vanishes identically
    pub homogeneous: bool,
}

impl fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedCase")
            .field("name", &self.name)
            .field("nu", &self.nu)
            .field("domain", &self.domain)
            .field("convective", &self.convective)
            .finish_non_exhaustive()
    }
}

impl ManufacturedCase {
    /// Same fields with every datum set to zero: `u = 0, p = 0, f = 0, g = 0`.
    pub fn zero(nu: f64, domain: BoundingBox) -> Self {
        ManufacturedCase {
            name: "zero".into(),
            nu,
            domain,
            u: Arc::new(|_| [0.0, 0.0]),
            grad_u: Arc::new(|_| [[0.0; 2]; 2]),
            p: Arc::new(|_| 0.0),
            f: Arc::new(|_| [0.0, 0.0]),
            g: Arc::new(|_| [0.0, 0.0]),
            p_mean: 0.0,
            convective: false,
            polynomial_degree: Some(0),
            homogeneous: true,
        }
    }

    /// Manufactured case from polynomial velocity components and pressure,
    /// with `f` derived symbolically and `g` the trace of `u`.
    pub fn from_polynomials(name: &str, ux: Poly2, uy: Poly2, p: Poly2, nu: f64, convective: bool, domain: BoundingBox) -> Self {
        let grad = [[ux.dx(), ux.dy()], [uy.dx(), uy.dy()]];
        let mut f = [ux.laplacian().scale(-nu) + p.dx(), uy.laplacian().scale(-nu) + p.dy()];
        if convective {
            f[0] = f[0].clone() + &ux * &grad[0][0] + &uy * &grad[0][1];
            f[1] = f[1].clone() + &ux * &grad[1][0] + &uy * &grad[1][1];
        }
        let p_mean = p.integrate_box(domain.min, domain.max) / domain.area();
        let degree = ux.degree().max(uy.degree()).max(p.degree());
        let homogeneous = ux == Poly2::zero() && uy == Poly2::zero();
        let u = Arc::new((ux, uy));
        let u2 = Arc::clone(&u);
        let grad = Arc::new(grad);
        let f = Arc::new(f);
        let p = Arc::new(p);
        ManufacturedCase {
            name: name.into(),
            nu,
            domain,
            u: Arc::new(move |x| [u.0.eval(x), u.1.eval(x)]),
            grad_u: Arc::new(move |x| [[grad[0][0].eval(x), grad[0][1].eval(x)], [grad[1][0].eval(x), grad[1][1].eval(x)]]),
            p: Arc::new(move |x| p.eval(x)),
            f: Arc::new(move |x| [f[0].eval(x), f[1].eval(x)]),
            g: Arc::new(move |x| [u2.0.eval(x), u2.1.eval(x)]),
            p_mean,
            convective,
            polynomial_degree: Some(degree),
            homogeneous,
        }
    }

    /// Solenoidal polynomial case `u = curl psi = (d_y psi, -d_x psi)`.
    pub fn from_stream_function(name: &str, psi: &Poly2, p: Poly2, nu: f64, convective: bool, domain: BoundingBox) -> Self {
        Self::from_polynomials(name, psi.dy(), -psi.dx(), p, nu, convective, domain)
    }
}

/// The potential `chi = Re(z^5)`.
pub fn potential_chi() -> Poly2 {
    Poly2::from_terms(&[(1.0, 5, 0), (-10.0, 3, 2), (5.0, 1, 4)])
}

/// Built-in cases: `noflow`, `vortex` (Stokes) and `potential` (Navier-Stokes).
pub fn builtin_case(name: &str, nu: f64) -> Result<ManufacturedCase> {
    if !(nu > 0.0) {
        return Err(Error::invalid(format!("viscosity must be positive, got {nu}")));
    }
    match name {
        "noflow" => Ok(ManufacturedCase {
            name: name.into(),
            nu,
            domain: BoundingBox::unit_square(),
            u: Arc::new(|_| [0.0, 0.0]),
            grad_u: Arc::new(|_| [[0.0; 2]; 2]),
            p: Arc::new(|x| (2.0 * PI * (x[0] + x[1])).sin()),
            f: Arc::new(|x| {
                let c = 2.0 * PI * (2.0 * PI * (x[0] + x[1])).cos();
                [c, c]
            }),
            g: Arc::new(|_| [0.0, 0.0]),
            p_mean: 0.0,
            convective: false,
            polynomial_degree: None,
            homogeneous: true,
        }),
        "vortex" => Ok(ManufacturedCase {
            name: name.into(),
            nu,
            domain: BoundingBox::unit_square(),
            u: Arc::new(|x| {
                let (sx, sy) = ((PI * x[0]).sin(), (PI * x[1]).sin());
                [PI * sx * sx * (2.0 * PI * x[1]).sin(), -PI * (2.0 * PI * x[0]).sin() * sy * sy]
            }),
            grad_u: Arc::new(|x| {
                let (sx, sy) = ((PI * x[0]).sin(), (PI * x[1]).sin());
                let s2 = (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).sin();
                let pi2 = PI * PI;
                [
                    [pi2 * s2, 2.0 * pi2 * sx * sx * (2.0 * PI * x[1]).cos()],
                    [-2.0 * pi2 * (2.0 * PI * x[0]).cos() * sy * sy, -pi2 * s2],
                ]
            }),
            p: Arc::new(|x| (PI * x[0]).cos() * (PI * x[1]).sin()),
            f: Arc::new(move |x| {
                let pi3 = PI * PI * PI;
                [
                    -nu * 2.0 * pi3 * (2.0 * (2.0 * PI * x[0]).cos() - 1.0) * (2.0 * PI * x[1]).sin()
                        - PI * (PI * x[0]).sin() * (PI * x[1]).sin(),
                    nu * 2.0 * pi3 * (2.0 * PI * x[0]).sin() * (2.0 * (2.0 * PI * x[1]).cos() - 1.0)
                        + PI * (PI * x[0]).cos() * (PI * x[1]).cos(),
                ]
            }),
            g: Arc::new(|_| [0.0, 0.0]),
            p_mean: 0.0,
            convective: false,
            polynomial_degree: None,
            homogeneous: true,
        }),
        "potential" => {
            let chi = potential_chi();
            let (ux, uy) = (chi.dx(), chi.dy());
            let p = (&ux * &ux + &uy * &uy).scale(-0.5);
            let mut case = ManufacturedCase::from_polynomials(name, ux, uy, p, nu, true, BoundingBox::new([-1.0, -1.0], [1.0, 1.0]));
            case.f = Arc::new(|_| [0.0, 0.0]);
            Ok(case)
        }
        other => Err(Error::invalid(format!(
            "unknown case '{other}' (expected noflow, vortex or potential)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Momentum residual `-nu lap u + conv + grad p - f` by central
    /// differences of the exact gradient and pressure.
    fn residual(case: &ManufacturedCase, x: [f64; 2]) -> ([f64; 2], f64) {
        let h = 1e-5;
        let g = |y: [f64; 2]| (case.grad_u)(y);
        let gxp = g([x[0] + h, x[1]]);
        let gxm = g([x[0] - h, x[1]]);
        let gyp = g([x[0], x[1] + h]);
        let gym = g([x[0], x[1] - h]);
        let dp = [
            ((case.p)([x[0] + h, x[1]]) - (case.p)([x[0] - h, x[1]])) / (2.0 * h),
            ((case.p)([x[0], x[1] + h]) - (case.p)([x[0], x[1] - h])) / (2.0 * h),
        ];
        let u = (case.u)(x);
        let gu = g(x);
        let f = (case.f)(x);
        let mut r = [0.0; 2];
        let mut scale: f64 = 1.0;
        for c in 0..2 {
            let lap = (gxp[c][0] - gxm[c][0]) / (2.0 * h) + (gyp[c][1] - gym[c][1]) / (2.0 * h);
            let conv = if case.convective { u[0] * gu[c][0] + u[1] * gu[c][1] } else { 0.0 };
            r[c] = -case.nu * lap + conv + dp[c] - f[c];
            scale = scale.max(f[c].abs()).max(dp[c].abs()).max(conv.abs());
        }
        (r, scale)
    }

    fn sample_points(b: BoundingBox) -> Vec<[f64; 2]> {
        (0..50)
            .map(|i| {
                let s = ((i as f64 * 0.618034) % 1.0) * 0.9 + 0.05;
                let t = ((i as f64 * 0.414214 + 0.3) % 1.0) * 0.9 + 0.05;
                [b.min[0] + s * b.width(), b.min[1] + t * b.height()]
            })
            .collect()
    }

    #[test]
    fn builtin_cases_satisfy_the_equations() {
        for (name, nu) in [("noflow", 1e-4), ("vortex", 1e-3), ("potential", 1e-2)] {
            let case = builtin_case(name, nu).unwrap();
            for x in sample_points(case.domain) {
                let (r, scale) = residual(&case, x);
                assert!(r[0].abs().max(r[1].abs()) < 1e-6 * scale, "{name} at {x:?}: {r:?}");
            }
        }
    }

    #[test]
    fn potential_flow_data() {
        let case = builtin_case("potential", 0.01).unwrap();
        let x = [0.4, -0.3];
        let u = (case.u)(x);
        let (xx, yy) = (x[0], x[1]);
        assert!((u[0] - (5.0 * xx.powi(4) - 30.0 * xx * xx * yy * yy + 5.0 * yy.powi(4))).abs() < 1e-14);
        assert!((u[1] - (-20.0 * xx.powi(3) * yy + 20.0 * xx * yy.powi(3))).abs() < 1e-14);
        let p = (case.p)(x);
        assert!((p + 12.5 * (xx * xx + yy * yy).powi(4)).abs() < 1e-14);
        // div u = lap chi = 0
        let g = (case.grad_u)(x);
        assert!((g[0][0] + g[1][1]).abs() < 1e-13);
        // derived forcing of the symbolic construction vanishes
        let chi = potential_chi();
        let p = (&chi.dx() * &chi.dx() + &chi.dy() * &chi.dy()).scale(-0.5);
        let sym = ManufacturedCase::from_polynomials("x", chi.dx(), chi.dy(), p, 0.01, true, case.domain);
        let f = (sym.f)([0.9, 0.7]);
        assert!(f[0].abs() < 1e-11 && f[1].abs() < 1e-11);
        assert!(case.p_mean < 0.0);
    }

    #[test]
    fn unknown_case_rejected() {
        assert!(builtin_case("cavity", 1.0).is_err());
        assert!(builtin_case("vortex", 0.0).is_err());
    }

    #[test]
    fn noflow_forcing_is_pressure_gradient() {
        let case = builtin_case("noflow", 1.0).unwrap();
        let f = (case.f)([0.1, 0.2]);
        let c = 2.0 * PI * (2.0 * PI * 0.3f64).cos();
        assert!((f[0] - c).abs() < 1e-14 && (f[1] - c).abs() < 1e-14);
    }
}
