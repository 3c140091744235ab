use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use photomol::scenario::{self, RunOptions, ScenarioConfig};
use photomol::Result;

#[derive(Parser)]
#[command(name = "photomol", version, about = "Light-to-molecule state transfer in a photoassociating condensate")]
struct Cli {
    /// Scenario file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; defaults to the config's `output_dir`, then `out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Also write two-column gnuplot data files.
    #[arg(long, global = true)]
    plot_data: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and quadrature quantities over time (analytic.csv).
    Analytic,
    /// Run a solver (fields.csv, report.csv).
    Simulate {
        /// Use the nonlinear mean-field solver.
        #[arg(long)]
        full: bool,
        /// Check the conservation invariants; exit 3 on failure.
        #[arg(long)]
        validate: bool,
    },
    /// Simulated vs adiabatic envelopes (compare.csv); exit 3 above the bound.
    Compare,
    /// Parameter sweep over the `sweep` / `sweep2` keys (sweep.csv).
    Sweep {
        /// Use the nonlinear mean-field solver at each point.
        #[arg(long)]
        full: bool,
    },
    /// Regime estimates next to the quoted values.
    Estimates,
}

fn run(cli: Cli) -> Result<()> {
    let path = cli.config.ok_or_else(|| photomol::Error::Config("--config PATH is required".into()))?;
    let cfg = ScenarioConfig::read(&path)?;
    let out_dir = cli
        .out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let opts = RunOptions {
        out_dir,
        plot_data: cli.plot_data,
        jobs: cli.jobs,
    };
    match cli.command {
        Command::Analytic => {
            scenario::cmd_analytic(&cfg, &opts)?;
        }
        Command::Simulate { full, validate } => {
            let out = scenario::cmd_simulate(&cfg, &opts, full, validate)?;
            if let Some(eta) = out.report.eta_numeric() {
                println!("eta_numeric = {eta:.6}");
            }
            println!("conservation_residual = {:e}", out.report.conservation_residual);
        }
        Command::Compare => {
            let out = scenario::cmd_compare(&cfg, &opts)?;
            println!("max relative L2 error = {:e} (bound {:e})", out.max_error, out.bound);
        }
        Command::Sweep { full } => {
            let rows = scenario::cmd_sweep(&cfg, &opts, full)?;
            let failed = rows.iter().filter(|r| r.status != "ok").count();
            println!("{} points, {failed} flagged", rows.len());
        }
        Command::Estimates => {
            print!("{}", scenario::cmd_estimates(&cfg)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // usage errors are configuration errors (exit 1), not clap's default 2
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("photomol: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
