use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand};
use subzero::experiments::{
    cmd_plotdata, cmd_run, cmd_solve_ne, cmd_sweep, cmd_validate, ExitCode, Sweep, PLOT_METRICS,
};
use subzero::game::Side;
use subzero::Error;

#[derive(Parser)]
#[command(name = "subzero", version, about = "Distributed mirror descent in subnetwork zero-sum games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured experiment and write its metrics table.
    Run {
        config: PathBuf,
        /// Metrics path; overrides `output.metrics`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute a certified equilibrium of the configured game.
    SolveNe {
        config: PathBuf,
        #[arg(long, default_value = "certificate.jsonl")]
        out: PathBuf,
    },
    /// Repeat a run over step exponents or network connectivities.
    Sweep {
        config: PathBuf,
        /// Comma-separated power-rule exponents.
        #[arg(long, value_delimiter = ',', conflicts_with = "lambda2")]
        kappa: Vec<f64>,
        /// Comma-separated algebraic-connectivity targets.
        #[arg(long, value_delimiter = ',')]
        lambda2: Vec<f64>,
        /// Side whose graph the λ2 sweep replaces.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        side: u8,
        #[arg(long, default_value_t = 0.05)]
        lambda2_tol: f64,
        #[arg(long, default_value = "sweep")]
        out_dir: PathBuf,
    },
    /// Turn metric files into long-format `series,t,value` rows.
    Plotdata {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = PLOT_METRICS.map(String::from))]
        metrics: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        agents: Option<Vec<usize>>,
        /// Output path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check configs without running them.
    Validate {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, out } => {
            println!("{}", cmd_run(&config, out.as_deref())?);
        }
        Command::SolveNe { config, out } => {
            let rec = cmd_solve_ne(&config, &out)?;
            let c = &rec.certificate;
            println!(
                "{}: value {:.12}, gap {:.3e} after {} iterations -> {}",
                rec.game,
                c.value,
                c.gap,
                c.iterations,
                out.display()
            );
        }
        Command::Sweep { config, kappa, lambda2, side, lambda2_tol, out_dir } => {
            let sweep = if !lambda2.is_empty() {
                Sweep::Lambda2 {
                    side: Side::from_number(side).expect("validated by clap"),
                    targets: lambda2,
                    tol: lambda2_tol,
                }
            } else {
                Sweep::Kappa(kappa)
            };
            for p in cmd_sweep(&config, &sweep, &out_dir)? {
                println!("{} (achieved {:.4}): {} -> {}", p.value, p.achieved, p.summary, p.metrics_file.display());
            }
        }
        Command::Plotdata { files, metrics, agents, out } => {
            let table = cmd_plotdata(&files, &metrics, agents.as_deref())?;
            match out {
                Some(p) => std::fs::write(p, table)?,
                None => print!("{table}"),
            }
        }
        Command::Validate { configs } => {
            for line in cmd_validate(&configs)? {
                println!("{line}");
            }
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = execute(Cli::parse()) {
        eprintln!("subzero: {e}");
        process::exit(ExitCode::from(&e) as i32);
    }
}
