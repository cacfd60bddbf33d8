//! Command-line entry point.
//!
//! Exit codes: 0 success, 2 domain/config errors, 3 numeric tolerance
//! failures, 64 usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hadamard_kit::cli::{
    cmd_cycle, cmd_eval, cmd_oracle, cmd_star, cmd_verify, default_threads, CommonOpts,
    RunConfig, EXIT_USAGE,
};
use hadamard_kit::error::Error;

#[derive(Parser)]
#[command(
    name = "hadamard",
    about = "Hadamard products of holomorphic functions over certified contours",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Primary output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Additionally dump the integration cycle as JSON.
    #[arg(long)]
    dump_cycle: Option<PathBuf>,
    /// Quadrature tolerance override, in (0, 1e-2].
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for randomized checks (recorded in the manifest).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for grid evaluation [default: HADAMARD_KIT_THREADS or 1].
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a product on points or grids; writes CSV plus a manifest.
    Eval(CommonArgs),
    /// Set products and eligibility verdicts for a pair of sets.
    Star(CommonArgs),
    /// Synthesize, certify, and dump an integration cycle.
    Cycle(CommonArgs),
    /// Run a named verification suite.
    Verify {
        /// Suite name, or `list` to print the available suites.
        suite: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Cauchy coefficients and termwise series products.
    Oracle(CommonArgs),
}

fn common_opts(args: &CommonArgs) -> CommonOpts {
    CommonOpts {
        out: args.out.clone(),
        dump_cycle: args.dump_cycle.clone(),
        tol: args.tol,
        seed: args.seed,
        threads: args.threads.unwrap_or_else(default_threads),
    }
}

fn load_config(args: &CommonArgs) -> Result<RunConfig, Error> {
    let path = args
        .config
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("--config is required".into()))?;
    RunConfig::load(path)
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    // machine-readable trailer for wrapping tools
    eprintln!(
        "{}",
        serde_json::json!({ "error": err.to_string(), "exit": err.exit_code() })
    );
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    match cli.command {
        Command::Eval(args) => {
            let common = common_opts(&args);
            match load_config(&args).and_then(|cfg| cmd_eval(&cfg, &common)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(&e),
            }
        }
        Command::Star(args) => {
            let common = common_opts(&args);
            match load_config(&args).and_then(|cfg| cmd_star(&cfg, &common)) {
                Ok(json) => {
                    println!("{json}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Cycle(args) => {
            let common = common_opts(&args);
            match load_config(&args).and_then(|cfg| cmd_cycle(&cfg, &common)) {
                Ok(json) => {
                    println!("{json}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Verify { suite, common } => {
            let common = common_opts(&common);
            if suite == "list" {
                for s in hadamard_kit::verify::SUITES {
                    println!("{s}");
                }
                return ExitCode::SUCCESS;
            }
            match cmd_verify(&suite, &common) {
                Ok((json, pass)) => {
                    println!("{json}");
                    if pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(3)
                    }
                }
                Err(e @ Error::InvalidConfig(_)) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_USAGE as u8)
                }
                Err(e) => fail(&e),
            }
        }
        Command::Oracle(args) => {
            let common = common_opts(&args);
            match load_config(&args).and_then(|cfg| cmd_oracle(&cfg, &common)) {
                Ok(csv) => {
                    if common.out.is_none() {
                        print!("{csv}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
    }
}
