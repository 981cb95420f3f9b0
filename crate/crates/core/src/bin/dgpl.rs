use std::process::ExitCode;

use clap::Parser;
use dgpl_core::cli::{run_selfcheck, run_table, Cli, Command, Fault, EXIT_ERROR};

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // 2 is reserved for Picard nonconvergence
            return if e.use_stderr() { EXIT_ERROR } else { 0 };
        }
    };
    match cli.command {
        Command::Selfcheck { inject_fault } => {
            let report = run_selfcheck(Fault {
                corrupt_constraints: inject_fault,
            });
            print!("{}", report.render());
            report.exit_code()
        }
        Command::Run(args) => {
            let config = match args.into_config() {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_ERROR;
                }
            };
            let out = match run_table(&config) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_ERROR;
                }
            };
            match &config.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &out.csv) {
                        eprintln!("error: cannot write '{}': {e}", path.display());
                        return EXIT_ERROR;
                    }
                    print!("{}", out.summary);
                }
                None => {
                    print!("{}", out.csv);
                    eprint!("{}", out.summary);
                }
            }
            out.exit_code
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run() as u8)
}
