//! Command-line front end: table experiments with CSV output and the
//! self-check suite.

mod args;
mod selfcheck;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

pub use args::{Cli, Command, TableArgs};
pub use selfcheck::{run_selfcheck, CheckItem, Fault, SelfcheckReport};

use crate::analysis::{builtin_case, compare_discrete, compute_errors, discrete_velocity_norms, ManufacturedCase};
use crate::error::{Error, Result};
use crate::forms::StabilizationParams;
use crate::mesh::{build_structured_quad_mesh, build_structured_triangle_mesh, load_mesh, BoundingBox, CellKind, Mesh};
use crate::solver::{solve_nse_picard, solve_stokes_cr, solve_stokes_dg, solve_stokes_hdiv, Discretization, SolveResult};

/// Exit code of a run whose rows all converged.
pub const EXIT_OK: i32 = 0;
/// Exit code for configuration, input or solver errors.
pub const EXIT_ERROR: i32 = 1;
/// Exit code when at least one row did not converge.
pub const EXIT_NONCONVERGED: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    /// no-flow, P3/P2 triangles
    Table1,
    /// vortex, distance to the H(div)-DG solution
    Table2,
    /// no-flow, Q3/Q2 quadrilaterals
    Table3,
    /// potential-flow Navier-Stokes, P4/P3 triangles
    Table4,
    /// potential-flow Navier-Stokes, Q4/Q3 quadrilaterals
    Table5,
    /// no-flow with Crouzeix-Raviart/P0
    CrNoflow,
    /// Crouzeix-Raviart convergence rates on the vortex case
    CrRates,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Table1 => "table1",
            Experiment::Table2 => "table2",
            Experiment::Table3 => "table3",
            Experiment::Table4 => "table4",
            Experiment::Table5 => "table5",
            Experiment::CrNoflow => "cr-noflow",
            Experiment::CrRates => "cr-rates",
        }
    }

    fn cell_kind(self) -> CellKind {
        match self {
            Experiment::Table3 | Experiment::Table5 => CellKind::Quadrilateral,
            _ => CellKind::Triangle,
        }
    }

    fn domain(self) -> BoundingBox {
        match self {
            Experiment::Table4 | Experiment::Table5 => BoundingBox::new([-1.0, -1.0], [1.0, 1.0]),
            _ => BoundingBox::unit_square(),
        }
    }
}

/// Grad-div parameters of a sweep: an explicit list (crossed with the `gamma`
/// list) or tied to `gamma` row by row.
#[derive(Clone, Debug, PartialEq)]
pub enum GammaGd {
    List(Vec<f64>),
    Tied,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub k: usize,
    pub n: usize,
    pub mesh_file: Option<PathBuf>,
    pub nu: f64,
    pub sigma: Option<f64>,
    pub gammas: Vec<f64>,
    pub gamma_gd: GammaGd,
    pub picard_tol: f64,
    pub picard_max: usize,
    /// mesh resolutions of `cr-rates`
    pub refinements: Vec<usize>,
    pub threads: usize,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Published setting of each experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let base = ExperimentConfig {
            experiment,
            k: 3,
            n: 32,
            mesh_file: None,
            nu: 1e-4,
            sigma: None,
            gammas: vec![0.0, 0.1, 1.0, 10.0, 100.0, 1000.0],
            gamma_gd: GammaGd::List(vec![0.0]),
            picard_tol: 1e-8,
            picard_max: 50,
            refinements: vec![8, 16, 32],
            threads: 1,
            out: None,
        };
        let decades = |hi: i32, zero: bool| -> Vec<f64> {
            let mut v = if zero { vec![0.0] } else { vec![] };
            v.extend((0..=hi).map(|e| 10f64.powi(e)));
            v
        };
        match experiment {
            Experiment::Table1 => base,
            Experiment::Table2 => ExperimentConfig {
                n: 20,
                nu: 1e-3,
                gammas: decades(3, true),
                ..base
            },
            Experiment::Table3 => ExperimentConfig {
                gammas: decades(3, true),
                gamma_gd: GammaGd::List(decades(3, true)),
                ..base
            },
            Experiment::Table4 => ExperimentConfig {
                k: 4,
                n: 20,
                nu: 1e-2,
                gammas: decades(4, true),
                ..base
            },
            Experiment::Table5 => ExperimentConfig {
                k: 4,
                n: 20,
                nu: 1e-2,
                gammas: [0.0].into_iter().chain((1..=5).map(|e| 10f64.powi(e))).collect(),
                gamma_gd: GammaGd::Tied,
                ..base
            },
            Experiment::CrNoflow => ExperimentConfig {
                k: 1,
                nu: 1.0,
                gammas: vec![0.0, 1.0, 10.0, 100.0],
                ..base
            },
            Experiment::CrRates => ExperimentConfig {
                k: 1,
                nu: 1.0,
                gammas: vec![1.0],
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gammas.is_empty() {
            return Err(Error::invalid("the gamma list is empty"));
        }
        if let GammaGd::List(l) = &self.gamma_gd {
            if l.is_empty() {
                return Err(Error::invalid("the gamma-gd list is empty"));
            }
        }
        let all_gd: Vec<f64> = match &self.gamma_gd {
            GammaGd::List(l) => l.clone(),
            GammaGd::Tied => vec![],
        };
        if self.gammas.iter().chain(&all_gd).any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::invalid("gamma values must be finite and nonnegative"));
        }
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::invalid(format!("nu must be positive, got {}", self.nu)));
        }
        if let Some(s) = self.sigma {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::invalid(format!("sigma must be positive, got {s}")));
            }
        }
        let cr = matches!(self.experiment, Experiment::CrNoflow | Experiment::CrRates);
        if cr && self.k != 1 {
            return Err(Error::invalid("Crouzeix-Raviart experiments use k = 1"));
        }
        if !cr && !(1..=8).contains(&self.k) {
            return Err(Error::invalid(format!("k must lie in 1..=8, got {}", self.k)));
        }
        if self.n == 0 || self.refinements.contains(&0) || self.refinements.is_empty() {
            return Err(Error::invalid("mesh resolutions must be positive"));
        }
        if !(self.picard_tol > 0.0) || self.picard_max == 0 {
            return Err(Error::invalid("picard-tol must be positive and picard-max at least 1"));
        }
        if self.threads == 0 {
            return Err(Error::invalid("threads must be at least 1"));
        }
        Ok(())
    }

    fn sigma(&self) -> f64 {
        self.sigma.unwrap_or_else(|| StabilizationParams::new(self.nu, self.k).sigma)
    }

    /// `(gamma, gamma_gd)` pairs in output order.
    fn pairs(&self) -> Vec<(f64, f64)> {
        match &self.gamma_gd {
            GammaGd::Tied => self.gammas.iter().map(|&g| (g, g)).collect(),
            GammaGd::List(gds) => self.gammas.iter().flat_map(|&g| gds.iter().map(move |&gd| (g, gd))).collect(),
        }
    }

    fn mesh(&self, n: usize) -> Result<Mesh> {
        match &self.mesh_file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::invalid(format!("cannot read mesh file '{}': {e}", path.display())))?;
                let mesh = load_mesh(&text)?;
                if mesh.kind() != self.experiment.cell_kind() {
                    return Err(Error::invalid(format!(
                        "{} needs a {:?} mesh, the file holds {:?} cells",
                        self.experiment.name(),
                        self.experiment.cell_kind(),
                        mesh.kind()
                    )));
                }
                Ok(mesh)
            }
            None => match self.experiment.cell_kind() {
                CellKind::Triangle => build_structured_triangle_mesh(n, self.experiment.domain()),
                CellKind::Quadrilateral => build_structured_quad_mesh(n, self.experiment.domain()),
            },
        }
    }
}

/// One output row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableRow {
    pub n: usize,
    pub gamma: f64,
    pub gamma_gd: f64,
    pub l2_u: f64,
    pub h1_broken_u: f64,
    pub l2_p: f64,
    pub div_broken: f64,
    pub nj: f64,
    pub picard_iters: usize,
    pub converged: bool,
}

impl TableRow {
    fn failed(n: usize, gamma: f64, gamma_gd: f64) -> Self {
        TableRow {
            n,
            gamma,
            gamma_gd,
            l2_u: f64::NAN,
            h1_broken_u: f64::NAN,
            l2_p: f64::NAN,
            div_broken: f64::NAN,
            nj: f64::NAN,
            picard_iters: 0,
            converged: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableOutput {
    pub rows: Vec<TableRow>,
    pub csv: String,
    pub summary: String,
    pub exit_code: i32,
}

/// Six significant digits in scientific notation.
fn sci(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.5e}")
    }
}

fn render_csv(experiment: Experiment, rows: &[TableRow]) -> String {
    let with_n = experiment == Experiment::CrRates;
    let mut out = String::new();
    if with_n {
        out.push_str("n,");
    }
    out.push_str("gamma,gamma_gd,l2_u,h1_broken_u,l2_p,div_broken,nj,picard_iters,converged\n");
    for r in rows {
        if with_n {
            let _ = write!(out, "{},", r.n);
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            sci(r.gamma),
            sci(r.gamma_gd),
            sci(r.l2_u),
            sci(r.h1_broken_u),
            sci(r.l2_p),
            sci(r.div_broken),
            sci(r.nj),
            r.picard_iters,
            r.converged
        );
    }
    out
}

fn render_summary(config: &ExperimentConfig, rows: &[TableRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}: k={} nu={:e} sigma={} {}",
        config.experiment.name(),
        config.k,
        config.nu,
        config.sigma(),
        match &config.mesh_file {
            Some(p) => format!("mesh={}", p.display()),
            None => format!("n={}", config.n),
        }
    );
    let (lu, lp) = if config.experiment == Experiment::Table2 {
        ("|u_h-u^_h|_0", "|p_h-p^_h|_0")
    } else {
        ("|u-u_h|_0", "|p-p_h|_0")
    };
    let _ = writeln!(
        s,
        "{:>5} {:>10} {:>10} {:>12} {:>12} {:>12} {:>12} {:>12} {:>6}",
        "n", "gamma", "gamma_gd", lu, "|grad e|_0", lp, "|div u_h|_0", "|u_h|_nj", "iters"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:>5} {:>10.3e} {:>10.3e} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e} {:>6}{}",
            r.n,
            r.gamma,
            r.gamma_gd,
            r.l2_u,
            r.h1_broken_u,
            r.l2_p,
            r.div_broken,
            r.nj,
            r.picard_iters,
            if r.converged { "" } else { "  NOT CONVERGED" }
        );
    }
    s
}

/// Runs `jobs` closures on up to `threads` workers; results keep job order.
fn run_ordered<T: Send>(jobs: usize, threads: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let slots: Vec<Mutex<Option<T>>> = (0..jobs).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads.min(jobs).max(1) {
            scope.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::SeqCst);
                if j >= jobs {
                    break;
                }
                let r = f(j);
                *slots[j].lock().unwrap() = Some(r);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().unwrap().unwrap()).collect()
}

/// Converts a linear-solver nonconvergence into a flagged row; other errors
/// propagate.
fn row_or_flag(res: Result<TableRow>, n: usize, g: f64, gd: f64) -> Result<TableRow> {
    match res {
        Ok(r) => Ok(r),
        Err(Error::NonConvergence { .. }) => Ok(TableRow::failed(n, g, gd)),
        Err(e) => Err(e),
    }
}

fn errors_row(disc: &Discretization, sol: &SolveResult, case: &ManufacturedCase, sigma: f64, n: usize, g: f64, gd: f64) -> TableRow {
    let e = compute_errors(disc, sol, case, sigma);
    TableRow {
        n,
        gamma: g,
        gamma_gd: gd,
        l2_u: e.l2_u,
        h1_broken_u: e.h1_broken_u,
        l2_p: e.l2_p,
        div_broken: e.div_broken,
        nj: e.nj,
        picard_iters: sol.picard_iters,
        converged: sol.converged,
    }
}

/// Runs one experiment and renders its CSV. Configuration and input errors
/// are returned as `Err` (exit code 1); rows whose solves did not converge
/// are kept with `converged = false` and give exit code 2.
pub fn run_table(config: &ExperimentConfig) -> Result<TableOutput> {
    config.validate()?;
    faer::set_global_parallelism(faer::Par::Seq);
    let sigma = config.sigma();
    let exp = config.experiment;
    let rows: Vec<TableRow> = match exp {
        Experiment::Table1 | Experiment::Table3 => {
            let case = builtin_case("noflow", config.nu)?;
            let disc = Discretization::dg(&Arc::new(config.mesh(config.n)?), config.k)?;
            let pairs = config.pairs();
            run_ordered(pairs.len(), config.threads, |j| {
                let (g, gd) = pairs[j];
                let params = StabilizationParams::new(config.nu, config.k)
                    .with_sigma(sigma)
                    .with_gamma(g)
                    .with_gamma_gd(gd);
                let res = solve_stokes_dg(&disc, &case, &params).map(|s| errors_row(&disc, &s, &case, sigma, config.n, g, gd));
                row_or_flag(res, config.n, g, gd)
            })
            .into_iter()
            .collect::<Result<_>>()?
        }
        Experiment::Table2 => {
            let case = builtin_case("vortex", config.nu)?;
            let disc = Discretization::dg(&Arc::new(config.mesh(config.n)?), config.k)?;
            let hat = solve_stokes_hdiv(&disc, &case, sigma)?;
            let pairs = config.pairs();
            run_ordered(pairs.len(), config.threads, |j| {
                let (g, gd) = pairs[j];
                let params = StabilizationParams::new(config.nu, config.k)
                    .with_sigma(sigma)
                    .with_gamma(g)
                    .with_gamma_gd(gd);
                let res = solve_stokes_dg(&disc, &case, &params).and_then(|s| {
                    let (du, dh1, dp) = compare_discrete(&disc, &s, &hat)?;
                    let (div, nj, _) = discrete_velocity_norms(&disc, &s.u, sigma);
                    Ok(TableRow {
                        n: config.n,
                        gamma: g,
                        gamma_gd: gd,
                        l2_u: du,
                        h1_broken_u: dh1,
                        l2_p: dp,
                        div_broken: div,
                        nj,
                        picard_iters: 0,
                        converged: s.converged,
                    })
                });
                row_or_flag(res, config.n, g, gd)
            })
            .into_iter()
            .collect::<Result<_>>()?
        }
        Experiment::Table4 | Experiment::Table5 => {
            let case = builtin_case("potential", config.nu)?;
            let disc = Discretization::dg(&Arc::new(config.mesh(config.n)?), config.k)?;
            let pairs = config.pairs();
            run_ordered(pairs.len(), config.threads, |j| {
                let (g, gd) = pairs[j];
                let params = StabilizationParams::new(config.nu, config.k)
                    .with_sigma(sigma)
                    .with_gamma(g)
                    .with_gamma_gd(gd);
                let res = solve_nse_picard(&disc, &case, &params, config.picard_tol, config.picard_max)
                    .map(|s| errors_row(&disc, &s, &case, sigma, config.n, g, gd));
                row_or_flag(res, config.n, g, gd)
            })
            .into_iter()
            .collect::<Result<_>>()?
        }
        Experiment::CrNoflow => {
            let case = builtin_case("noflow", config.nu)?;
            let disc = Discretization::crouzeix_raviart(&Arc::new(config.mesh(config.n)?))?;
            let pairs = config.pairs();
            run_ordered(pairs.len(), config.threads, |j| {
                let (g, gd) = pairs[j];
                let params = StabilizationParams::new(config.nu, 1)
                    .with_sigma(sigma)
                    .with_gamma(g)
                    .with_gamma_gd(gd);
                let res = solve_stokes_cr(&disc, &case, &params).map(|s| errors_row(&disc, &s, &case, sigma, config.n, g, gd));
                row_or_flag(res, config.n, g, gd)
            })
            .into_iter()
            .collect::<Result<_>>()?
        }
        Experiment::CrRates => {
            if config.mesh_file.is_some() {
                return Err(Error::invalid("cr-rates builds its own mesh sequence; --mesh-file is not accepted"));
            }
            let case = builtin_case("vortex", config.nu)?;
            let pairs = config.pairs();
            let jobs: Vec<(usize, f64, f64)> = config
                .refinements
                .iter()
                .flat_map(|&n| pairs.iter().map(move |&(g, gd)| (n, g, gd)))
                .collect();
            run_ordered(jobs.len(), config.threads, |j| {
                let (n, g, gd) = jobs[j];
                let res = config.mesh(n).and_then(|m| {
                    let disc = Discretization::crouzeix_raviart(&Arc::new(m))?;
                    let params = StabilizationParams::new(config.nu, 1)
                        .with_sigma(sigma)
                        .with_gamma(g)
                        .with_gamma_gd(gd);
                    let s = solve_stokes_cr(&disc, &case, &params)?;
                    Ok(errors_row(&disc, &s, &case, sigma, n, g, gd))
                });
                row_or_flag(res, n, g, gd)
            })
            .into_iter()
            .collect::<Result<_>>()?
        }
    };
    let exit_code = if rows.iter().all(|r| r.converged) {
        EXIT_OK
    } else {
        EXIT_NONCONVERGED
    };
    Ok(TableOutput {
        csv: render_csv(exp, &rows),
        summary: render_summary(config, &rows),
        rows,
        exit_code,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_pairs() {
        let mut c = ExperimentConfig::defaults(Experiment::Table1);
        assert_eq!(c.pairs().len(), 6);
        c.gamma_gd = GammaGd::List(vec![0.0, 1.0]);
        assert_eq!(c.pairs()[1], (0.0, 1.0));
        assert_eq!(ExperimentConfig::defaults(Experiment::Table3).pairs().len(), 25);
        let t5 = ExperimentConfig::defaults(Experiment::Table5);
        assert!(t5.pairs().iter().all(|(g, gd)| g == gd));
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut c = ExperimentConfig::defaults(Experiment::Table1);
        c.gammas.clear();
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(Experiment::Table1);
        c.gammas.push(-1.0);
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(Experiment::CrNoflow);
        c.k = 2;
        assert!(c.validate().is_err());
    }

    #[test]
    fn csv_layout() {
        let row = TableRow {
            n: 8,
            gamma: 10.0,
            gamma_gd: 0.0,
            l2_u: 3.48912e-8,
            h1_broken_u: 1.0,
            l2_p: 2.0,
            div_broken: 3.0,
            nj: 4.0,
            picard_iters: 0,
            converged: true,
        };
        let csv = render_csv(Experiment::Table1, &[row]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "gamma,gamma_gd,l2_u,h1_broken_u,l2_p,div_broken,nj,picard_iters,converged"
        );
        assert_eq!(
            lines[1],
            "1.00000e1,0.00000e0,3.48912e-8,1.00000e0,2.00000e0,3.00000e0,4.00000e0,0,true"
        );
        assert!(render_csv(Experiment::CrRates, &[row]).starts_with("n,gamma"));
    }

    #[test]
    fn ordered_runner_keeps_order() {
        let out = run_ordered(10, 3, |j| j * j);
        assert_eq!(out, (0..10).map(|j| j * j).collect::<Vec<_>>());
    }

    #[test]
    fn missing_mesh_file_is_an_error() {
        let mut c = ExperimentConfig::defaults(Experiment::Table4);
        c.mesh_file = Some(PathBuf::from("/nonexistent/mesh.txt"));
        let err = run_table(&c).unwrap_err();
        assert!(err.to_string().contains("mesh file"));
    }

    #[test]
    fn small_cr_noflow_run() {
        let mut c = ExperimentConfig::defaults(Experiment::CrNoflow);
        c.n = 4;
        let out = run_table(&c).unwrap();
        assert_eq!(out.rows.len(), 4);
        assert_eq!(out.exit_code, EXIT_OK);
        assert_eq!(out.csv.lines().count(), 5);
    }
}
