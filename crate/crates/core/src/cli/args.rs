use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::{Experiment, ExperimentConfig, GammaGd};
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "dgpl", version, about = "Mass-flux penalized DG Stokes/Navier-Stokes experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Run one table experiment and write its CSV.
    #[command(allow_negative_numbers = true)]
    Run(TableArgs),
    /// Run the fast invariant suite.
    Selfcheck {
        /// Corrupt the constraint rows before the commuting-diagram check.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

/// Flags override `DGPL_*` environment variables, which override the
/// experiment defaults.
#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(value_enum)]
    pub experiment: Experiment,
    #[arg(long, env = "DGPL_K")]
    pub k: Option<usize>,
    #[arg(long, env = "DGPL_N")]
    pub n: Option<usize>,
    #[arg(long, env = "DGPL_NU")]
    pub nu: Option<f64>,
    #[arg(long, env = "DGPL_SIGMA")]
    pub sigma: Option<f64>,
    /// comma-separated list
    #[arg(long, env = "DGPL_GAMMA")]
    pub gamma: Option<String>,
    /// comma-separated list, or `same` to tie it to gamma
    #[arg(long, env = "DGPL_GAMMA_GD")]
    pub gamma_gd: Option<String>,
    #[arg(long, env = "DGPL_MESH_FILE")]
    pub mesh_file: Option<PathBuf>,
    /// CSV destination; stdout when absent
    #[arg(long, env = "DGPL_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, env = "DGPL_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, env = "DGPL_PICARD_TOL")]
    pub picard_tol: Option<f64>,
    #[arg(long, env = "DGPL_PICARD_MAX")]
    pub picard_max: Option<usize>,
}

pub(crate) fn parse_list(flag: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .map_err(|_| Error::invalid(format!("--{flag}: cannot parse '{s}' as a number")))
        })
        .collect()
}

impl TableArgs {
    pub fn into_config(self) -> Result<ExperimentConfig> {
        let mut c = ExperimentConfig::defaults(self.experiment);
        if let Some(k) = self.k {
            c.k = k;
        }
        if let Some(n) = self.n {
            c.n = n;
        }
        if let Some(nu) = self.nu {
            c.nu = nu;
        }
        c.sigma = self.sigma.or(c.sigma);
        if let Some(g) = &self.gamma {
            c.gammas = parse_list("gamma", g)?;
        }
        if let Some(gd) = &self.gamma_gd {
            c.gamma_gd = if gd.trim() == "same" {
                GammaGd::Tied
            } else {
                GammaGd::List(parse_list("gamma-gd", gd)?)
            };
        }
        c.mesh_file = self.mesh_file;
        c.out = self.out;
        if let Some(t) = self.threads {
            c.threads = t;
        }
        if let Some(t) = self.picard_tol {
            c.picard_tol = t;
        }
        if let Some(m) = self.picard_max {
            c.picard_max = m;
        }
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> Result<ExperimentConfig> {
        let cli = Cli::try_parse_from(std::iter::once("dgpl").chain(args.iter().copied())).unwrap();
        match cli.command {
            Command::Run(a) => a.into_config(),
            Command::Selfcheck { .. } => panic!("expected run"),
        }
    }

    #[test]
    fn flags_override_defaults() {
        let c = config(&["run", "table1", "--gamma", "0,0.1,1", "--gamma-gd", "0", "--n", "8"]).unwrap();
        assert_eq!(c.gammas, vec![0.0, 0.1, 1.0]);
        assert_eq!(c.n, 8);
        assert_eq!(c.k, 3);
        let c = config(&["run", "table3", "--gamma-gd", "same"]).unwrap();
        assert_eq!(c.gamma_gd, GammaGd::Tied);
    }

    #[test]
    fn bad_lists_rejected() {
        assert!(config(&["run", "table1", "--gamma", "1,x"]).is_err());
        assert!(config(&["run", "table1", "--gamma=-1"]).is_err());
        assert!(config(&["run", "cr-rates", "--k", "2"]).is_err());
    }
}
