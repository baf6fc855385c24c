//! Scenario-file driver for the `flexscrew` library: reads JSON scenarios,
//! runs the requested analyses and writes canonical reports.

pub mod analysis;
pub mod canonical;
pub mod error;
pub mod report;
pub mod scenario;
pub mod sweep;

use std::path::{Path, PathBuf};

pub use error::CliError;
pub use report::{evaluate, Evaluation};
pub use scenario::Scenario;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "FLEXSCREW_OUT_DIR";

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub csv: bool,
    pub quiet: bool,
    pub jobs: Option<usize>,
}

/// Parse and evaluate a scenario file without writing anything.
pub fn evaluate_file(
    path: &Path,
    jobs: Option<usize>,
    sweeps_only: bool,
) -> Result<Evaluation, CliError> {
    let (scenario, bytes) = Scenario::load(path)?;
    Ok(evaluate(scenario, &bytes, jobs, sweeps_only))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// `run` and `sweep` subcommands. Returns the process exit code.
pub fn run(path: &Path, opts: &RunOptions, sweeps_only: bool) -> Result<i32, CliError> {
    let eval = evaluate_file(path, opts.jobs, sweeps_only)?;
    if sweeps_only && eval.records.is_empty() {
        return Err(CliError::input(
            &path.display().to_string(),
            "field analyses",
            "no sweep analysis declared",
        ));
    }
    let suffix = if sweeps_only { "sweep" } else { "report" };
    let report = write(
        &opts.out_dir,
        &format!("{}.{suffix}.json", eval.scenario.name),
        &eval.report_text(),
    )?;
    let mut written = vec![report];
    if opts.csv {
        for (name, text) in eval.csv_files() {
            written.push(write(&opts.out_dir, &name, &text)?);
        }
    }
    for r in &eval.records {
        if let Err(e) = &r.outcome {
            eprintln!(
                "error: {}: analyses[{}] ({}): {e}",
                path.display(),
                r.index,
                r.request.kind()
            );
        }
    }
    if !opts.quiet {
        for line in eval.summary_lines() {
            println!("{line}");
        }
        for p in written {
            println!("wrote {}", p.display());
        }
    }
    Ok(eval.exit_code())
}

/// `validate` subcommand: parse and resolve only.
pub fn validate(path: &Path) -> Result<Scenario, CliError> {
    Scenario::load(path).map(|(s, _)| s)
}
