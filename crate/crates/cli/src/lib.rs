//! The `despar` command-line tool: lasso fits and desparsified-lasso
//! inference on CSV data, the Monte Carlo experiment suites and design
//! diagnostics. Every file written is accompanied by a `manifest.json`.

pub mod args;
pub mod commands;
pub mod csvio;
pub mod error;
pub mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use args::{Cli, Command};
use commands::Report;
use error::{CliError, CliResult};
use manifest::{digest_inputs, read_manifest, RunManifest, MANIFEST_FILE};

/// Resolves `replay` into the recorded command with an optional new output
/// directory.
fn resolve(command: Command) -> CliResult<Command> {
    let Command::Replay(replay) = command else {
        return Ok(command);
    };
    let mut recorded = read_manifest(&replay.manifest)?.config;
    if let Some(out) = replay.out {
        set_out(&mut recorded, out);
    }
    match recorded {
        Command::Replay(_) => Err(CliError::Input("a manifest cannot record a replay".into())),
        other => Ok(other),
    }
}

fn set_out(command: &mut Command, out: PathBuf) {
    let slot = match command {
        Command::Fit(a) => &mut a.out,
        Command::Infer(a) => &mut a.out,
        Command::Simulate(a) => &mut a.out,
        Command::Decay(a) => &mut a.out,
        Command::Diagnose(a) => &mut a.out,
        Command::Replay(a) => &mut a.out,
    };
    *slot = Some(out);
}

fn out_dir(command: &Command) -> Option<&Path> {
    match command {
        Command::Fit(a) => a.out.as_deref(),
        Command::Infer(a) => a.out.as_deref(),
        Command::Simulate(a) => a.out.as_deref(),
        Command::Decay(a) => a.out.as_deref(),
        Command::Diagnose(a) => a.out.as_deref(),
        Command::Replay(a) => a.out.as_deref(),
    }
}

/// Runs a command and returns its report without writing anything.
pub fn execute(command: &Command, quiet: bool) -> CliResult<Report> {
    match command {
        Command::Fit(a) => commands::fit(a),
        Command::Infer(a) => commands::infer_cmd(a),
        Command::Simulate(a) => commands::simulate_cmd(a, quiet),
        Command::Decay(a) => commands::decay_cmd(a),
        Command::Diagnose(a) => commands::diagnose_cmd(a),
        Command::Replay(_) => Err(CliError::Input("replay must be resolved first".into())),
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Writes the report files and the manifest into `dir`.
fn write_outputs(dir: &Path, command: &Command, report: &Report, started: Instant) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = command.name();
    let mut outputs = vec![format!("{name}.json")];
    write_file(&dir.join(&outputs[0]), &report.json)?;
    if let Some(csv) = &report.csv {
        outputs.push(format!("{name}.csv"));
        write_file(&dir.join(&outputs[1]), csv)?;
    }
    let inputs: Vec<&Path> = report.inputs.iter().map(PathBuf::as_path).collect();
    let manifest = RunManifest {
        command: name.to_string(),
        config: command.clone(),
        seed: report.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        duration_seconds: started.elapsed().as_secs_f64(),
        inputs: digest_inputs(&inputs)?,
        outputs,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_file(&dir.join(MANIFEST_FILE), &text)
}

/// Entry point shared by the binary and the tests.
pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let started = Instant::now();
    let command = resolve(cli.command)?;
    let report = execute(&command, cli.quiet)?;
    match out_dir(&command) {
        Some(dir) => write_outputs(dir, &command, &report, started),
        None => {
            let text = match (&report.csv, report.csv_to_stdout) {
                (Some(csv), true) => csv,
                _ => &report.json,
            };
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}
