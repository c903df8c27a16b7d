use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use inflap_cli::{constants, report, run_file, sweep_files, CliError, ExitStatus};

#[derive(Parser)]
#[command(
    name = "inflap",
    version,
    about = "Infinity-Laplacian Hardy-Henon experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a template config over a grid of (alpha, m) pairs.
    Sweep {
        template: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print beta, tau and the gradient exponent as JSON.
    PrintConstants {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        m: f64,
    },
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("inflap: {err}");
    ExitCode::from(err.exit_status().code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match cli.command {
        Command::Run { config, out } => match run_file(&config, out.as_deref()) {
            Ok((res, dir)) => {
                let rep = &res.report;
                println!(
                    "{}: {:?} ({} checks, report at {})",
                    rep.experiment.name(),
                    rep.status,
                    rep.checks.len(),
                    dir.join("report.json").display()
                );
                for c in rep.checks.iter().filter(|c| !c.pass) {
                    println!("  failed {}: {} (rule {})", c.name, c.value, c.rule);
                }
                if let Some(e) = &rep.error {
                    eprintln!("inflap: {e}");
                }
                res.status
            }
            Err(e) => return fail(&e),
        },
        Command::Sweep {
            template,
            grid,
            out,
        } => match sweep_files(&template, &grid, out.as_deref()) {
            Ok((rows, status, dir)) => {
                let passed = rows.iter().filter(|r| r.pass).count();
                println!(
                    "sweep: {passed}/{} runs passed, summary at {}",
                    rows.len(),
                    dir.join("summary.csv").display()
                );
                status
            }
            Err(e) => return fail(&e),
        },
        Command::PrintConstants { alpha, m } => match constants(alpha, m) {
            Ok(c) => {
                print!("{}", report::to_json(&c));
                ExitStatus::Pass
            }
            Err(e) => return fail(&e),
        },
    };
    ExitCode::from(status.code() as u8)
}
