use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use forcelab::{load_file, run, validate_suite_filter, CliError, Flags};

#[derive(Parser)]
#[command(name = "forcelab", version, about = "Finite forcing workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Run the queries and suites of a scenario.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Only run these suites (repeatable).
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximal name rank for generated name suites.
        #[arg(long)]
        pool_rank: Option<u32>,
        /// Cap on enumerated carriers; overrides FORCELAB_MAX_CARRIER.
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Append per-record wall times (reports are then not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Parse and validate a scenario without running it.
    Check { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Check { file } => {
            let loaded = load_file(&file, &Flags::default())?;
            println!("ok {} ({} tasks)", loaded.name, loaded.tasks.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            scenario,
            suites,
            seed,
            pool_rank,
            max_size,
            format,
            timing,
        } => {
            let flags = Flags {
                seed,
                pool_rank,
                max_size,
                suites,
                timing,
            };
            validate_suite_filter(&flags)?;
            let loaded = load_file(&scenario, &flags)?;
            let report = run(&loaded);
            match format {
                Format::Text => print!("{}", report.to_text()),
                Format::Jsonl => print!("{}", report.to_jsonl()),
            }
            Ok(if report.failed() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}
