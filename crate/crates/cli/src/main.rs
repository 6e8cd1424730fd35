use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tsl_core::montecarlo::SimConfig;
use tsl_core::report::{self, AnalyzeOptions};
use tsl_core::solver::DEFAULT_WINDOW;
use tsl_core::spec_file::{parse_spec, Problem};
use tsl_core::algebra::DEFAULT_SUBGROUP_CAP;
use tsl_core::Error;

/// Exact analysis and simulation of backward stochastic equations on
/// finite semigroup actions.
#[derive(Parser)]
#[command(name = "tsl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Limit laws, solution families and classification.
    Analyze {
        spec: PathBuf,
        /// Store solution laws explicitly at k = 0..-K.
        #[arg(long, value_name = "K", default_value_t = DEFAULT_WINDOW)]
        window: usize,
        /// Largest semigroup searched for subgroups.
        #[arg(long, value_name = "N", default_value_t = DEFAULT_SUBGROUP_CAP)]
        subgroup_cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Seeded Monte-Carlo estimates next to the exact values.
    Simulate {
        spec: PathBuf,
        #[arg(long, value_name = "L")]
        depth: usize,
        #[arg(long, value_name = "T")]
        trials: u64,
        #[arg(long, value_name = "S")]
        seed: u64,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Character analysis for noise on a cyclic group.
    Fourier {
        spec: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn load(path: &Path) -> Result<Problem, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text)?.build()
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Analyze {
            spec,
            window,
            subgroup_cap,
            json,
        } => {
            let problem = load(&spec)?;
            let r = report::analyze(&problem, &AnalyzeOptions { window, subgroup_cap })?;
            print!("{}", if json { r.to_json() } else { r.to_text() });
            if r.capacity_exceeded() {
                eprintln!("tsl: subgroup search exceeded --subgroup-cap {subgroup_cap}; raise it to decide P2'");
                return Ok(ExitCode::from(2));
            }
        }
        Command::Simulate {
            spec,
            depth,
            trials,
            seed,
            csv,
            json,
        } => {
            let cfg = SimConfig::new(depth, trials, seed)?;
            let problem = load(&spec)?;
            let r = report::simulate(&problem, &cfg, &AnalyzeOptions::default())?;
            if let Some(path) = csv {
                std::fs::write(&path, r.csv())
                    .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
            }
            print!("{}", if json { r.to_json() } else { r.to_text() });
        }
        Command::Fourier { spec, json } => {
            let problem = load(&spec)?;
            let r = report::fourier(&problem)?;
            print!("{}", if json { r.to_json() } else { r.to_text() });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("tsl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
