use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dynvis::OracleKind;
use dynvis_cli::bench::{run_bench, BenchConfig, Family};
use dynvis_cli::{run, CliError, Mode, Scenario};

#[derive(Parser)]
#[command(name = "dynvis", version, about = "Dynamic visibility polygons: replay, verify, benchmark, render")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a scenario file.
    Run {
        file: PathBuf,
        #[arg(long, default_value = "dynamic")]
        mode: Mode,
        #[arg(long, default_value = "accelerated")]
        oracle: OracleKind,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Time incremental updates against recomputation.
    Bench {
        #[arg(long = "gen")]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        updates: usize,
        #[arg(long, default_value = "accelerated")]
        oracle: OracleKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw the state after the first `--at` events as SVG.
    Render {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        at: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { file, mode, oracle, report } => Scenario::load(&file).and_then(|s| {
            let r = run(&s, mode, oracle)?;
            match &report {
                Some(path) => write(path, &r.to_string())?,
                None => print!("{r}"),
            }
            Ok(r.diffs() == 0)
        }),
        Command::Bench { family, n, updates, oracle, seed } => {
            run_bench(&BenchConfig { family, n, updates, oracle, seed }).map(|r| {
                print!("{r}");
                true
            })
        }
        Command::Render { file, at, out } => Scenario::load(&file)
            .and_then(|s| dynvis_cli::render::render(&s, at))
            .and_then(|svg| write(&out, &svg))
            .map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("cross-check found differences");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
