use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bellframe::cli::{self, CliError};
use bellframe::harness::RunOptions;

/// Bell-CHSH experiments under relativistic timing configurations.
#[derive(Debug, Parser)]
#[command(name = "bellframe", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run all models in the standard and before-before geometries.
    Suite {
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the brute-forced local CHSH bound.
    Bound,
}

fn report(err: &CliError) -> ExitCode {
    eprintln!("bellframe: {err}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = RunOptions { workers: cli::workers_from_env() };
    match args.command {
        Command::Run { config, out } => match cli::cmd_run(&config, &out, opts) {
            Ok(r) => {
                println!("{}: S = {} ± {} ({})", r.config.model, r.chsh.s, r.chsh.stderr, r.timing_class);
                ExitCode::SUCCESS
            }
            Err(e) => report(&e),
        },
        Command::Suite { trials, seed, out } => match cli::cmd_suite(trials, seed, &out, opts) {
            Ok(r) => {
                print!("{}", cli::render_suite_csv(&r));
                for m in r.refuted_by_before_before() {
                    println!("# {m}: predicts no before-before violation; the observed experiment shows one");
                }
                ExitCode::SUCCESS
            }
            Err(e) => report(&e),
        },
        Command::Bound => {
            print!("{}", cli::cmd_bound());
            ExitCode::SUCCESS
        }
    }
}
