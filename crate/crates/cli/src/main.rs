use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flexscrew_cli::{run, validate, CliError, RunOptions, OUT_DIR_ENV};

#[derive(Parser)]
#[command(
    name = "flexscrew",
    version,
    about = "Flexible bone-screw mechanics scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every analysis in a scenario and write the report.
    Run {
        file: PathBuf,
        #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
        out: PathBuf,
        /// Also write one CSV per station-array result.
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        quiet: bool,
    },
    /// Run only the sweep analyses of a scenario.
    Sweep {
        file: PathBuf,
        #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
        out: PathBuf,
        /// Worker threads; defaults to one per core.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Parse and check a scenario without running it.
    Validate { file: PathBuf },
    /// Print the tool version.
    Version,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<i32, CliError> = match cli.command {
        Command::Run {
            file,
            out,
            csv,
            quiet,
        } => run(
            &file,
            &RunOptions {
                out_dir: out,
                csv,
                quiet,
                jobs: None,
            },
            false,
        ),
        Command::Sweep { file, out, jobs } => run(
            &file,
            &RunOptions {
                out_dir: out,
                csv: false,
                quiet: false,
                jobs,
            },
            true,
        ),
        Command::Validate { file } => validate(&file).map(|s| {
            println!("{}: ok ({} analyses)", file.display(), s.analyses.len());
            0
        }),
        Command::Version => {
            println!("flexscrew {}", env!("CARGO_PKG_VERSION"));
            Ok(0)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
