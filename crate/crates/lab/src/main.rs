use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ibnls_lab::report::Report;
use ibnls_lab::{load_config, run_study, RunOptions, Study};

#[derive(Debug, Parser)]
#[command(name = "ibnls", version, about = "Radial simulator and diagnostics for the inhomogeneous biharmonic NLS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Reuse finished sweep rows found in the output directory.
    #[arg(long)]
    resume: bool,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Enforce the strict parameter window regardless of the config.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the ground state and its threshold quantities.
    Groundstate(RunArgs),
    /// Evolve one initial datum and record diagnostics.
    Evolve(RunArgs),
    /// Evolve `c·Q` over a list of amplitudes.
    Sweep(RunArgs),
    /// Fit the decay rate of the time-averaged Morawetz quantity.
    Morawetz(RunArgs),
    /// Classify Strichartz exponent pairs.
    CheckPairs(RunArgs),
    /// Verify the exponent identities in exact arithmetic.
    Exponents(RunArgs),
    /// Summarize a finished run directory.
    Report {
        /// Run directory holding `manifest.json`.
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (study, args) = match cli.command {
        Command::Groundstate(a) => (Study::Groundstate, a),
        Command::Evolve(a) => (Study::Evolve, a),
        Command::Sweep(a) => (Study::Sweep, a),
        Command::Morawetz(a) => (Study::Morawetz, a),
        Command::CheckPairs(a) => (Study::CheckPairs, a),
        Command::Exponents(a) => (Study::Exponents, a),
        Command::Report { dir } => {
            return match Report::load(&dir) {
                Ok(report) => {
                    print!("{}", report.render());
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: cannot read run in {}: {e}", dir.display());
                    ExitCode::from(2)
                }
            };
        }
    };
    let cfg = match load_config(&args.config, study, args.strict) {
        Ok(cfg) => cfg,
        Err(e) => {
            let e = ibnls_lab::LabError::from(e);
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let opts = RunOptions { resume: args.resume, threads: args.threads };
    match run_study(study, &cfg, &args.out, opts) {
        Ok(manifest) => {
            let armed = manifest.verdicts.iter().filter(|v| v.armed).count();
            let failed = manifest.verdicts.iter().filter(|v| v.armed && !v.passed).count();
            println!("{study}: wrote {} ({armed} armed checks, {failed} failed)", args.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
