//! `dblab`: runs one experiment from a JSON configuration and writes a
//! `report.json` plus plot-ready CSV grids.
//!
//! Exit status: 0 on success, 1 when a checking command (`suite`) reports a
//! failed check, 2 for configuration or schema errors, 3 for numerical
//! failures.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use commands::Outcome;
use config::ExperimentConfig;
pub use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "dblab", version, about = "Phase, sampling and multiplier experiments in de Branges spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment configuration; PW(pi) on (-50, 50) if omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Window override, `a,b`.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_window)]
    window: Option<[f64; 2]>,

    /// Seed override for randomized probes.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for report.json and CSV artifacts; nothing is written
    /// to disk without it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// What goes to stdout: the JSON report or the primary CSV grid.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
enum Command {
    /// Phase and its derivative on a grid.
    Phase,
    /// Doubling, local doubling, comparability and distortion diagnostics.
    Doubling,
    /// Finite-radius lower and upper densities of the configured sequence.
    Density,
    /// Empirical frame bounds of the sequence against orthonormal nodes.
    Frame,
    /// Extreme eigenvalues of the normalized Gram matrix of the sequence.
    Riesz,
    /// Interpolates data on the sequence.
    Interpolate,
    /// Builds and verifies a multiplier vanishing on the sequence.
    Multiplier,
    /// Peak-function decay and tail integral.
    Peak,
    /// The acceptance battery; exit status 1 if any criterion fails.
    Suite {
        /// Run only these criteria, e.g. `--only 1,6`.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Phase => "phase",
            Command::Doubling => "doubling",
            Command::Density => "density",
            Command::Frame => "frame",
            Command::Riesz => "riesz",
            Command::Interpolate => "interpolate",
            Command::Multiplier => "multiplier",
            Command::Peak => "peak",
            Command::Suite { .. } => "suite",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

fn parse_window(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts.as_slice() else {
        return Err(format!("expected 'a,b', got '{s}'"));
    };
    let a: f64 = a.parse().map_err(|e| format!("{a}: {e}"))?;
    let b: f64 = b.parse().map_err(|e| format!("{b}: {e}"))?;
    Ok([a, b])
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(w) = cli.window {
        cfg.window = w;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    // Validate the shared parts up front so schema problems exit with 2.
    cfg.window()?;
    cfg.profile()?;
    Ok(cfg)
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("DBLAB_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Config(format!("DBLAB_THREADS must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(CliError::Config("DBLAB_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn dispatch(command: &Command, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Phase => commands::phase(cfg),
        Command::Doubling => commands::doubling(cfg),
        Command::Density => commands::density_cmd(cfg),
        Command::Frame => commands::frame(cfg),
        Command::Riesz => commands::riesz(cfg),
        Command::Interpolate => commands::interpolate(cfg),
        Command::Multiplier => commands::multiplier(cfg),
        Command::Peak => commands::peak(cfg),
        Command::Suite { only } => commands::suite(cfg, only),
    }
}

/// The report; `timing` is the only field that varies between identical runs.
fn report(command: &str, cfg: Option<&ExperimentConfig>, body: Value, timing: Value) -> Value {
    let mut r = json!({
        "command": command,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
    });
    let obj = r.as_object_mut().expect("object");
    if let Value::Object(b) = body {
        obj.extend(b);
    }
    obj.insert("timing".into(), timing);
    r
}

fn write_outputs(cli: &Cli, report: &Value, outcome: Option<&Outcome>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), &text)?;
        for a in outcome.map(|o| o.artifacts.as_slice()).unwrap_or_default() {
            std::fs::write(dir.join(&a.name), &a.contents)?;
        }
    }
    match (cli.format, outcome.and_then(|o| o.artifacts.first())) {
        (Format::Csv, Some(a)) => print!("{}", a.contents),
        _ => print!("{text}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8, (Option<ExperimentConfig>, CliError)> {
    let start = Instant::now();
    let cfg = load_config(cli).map_err(|e| (None, e))?;
    configure_threads().map_err(|e| (Some(cfg.clone()), e))?;
    let outcome = dispatch(&cli.command, &cfg).map_err(|e| (Some(cfg.clone()), e))?;
    let timing = json!({
        "wall_seconds": start.elapsed().as_secs_f64(),
        "detail": outcome.timing,
    });
    let artifacts: Vec<&str> = outcome.artifacts.iter().map(|a| a.name.as_str()).collect();
    let body = json!({
        "passed": outcome.passed,
        "results": outcome.results,
        "artifacts": artifacts,
    });
    let r = report(cli.command.name(), Some(&cfg), body, timing);
    write_outputs(cli, &r, Some(&outcome)).map_err(|e| (Some(cfg.clone()), e))?;
    Ok(if outcome.passed == Some(false) { 1 } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err((cfg, err)) => {
            eprintln!("dblab: {err}");
            let body = json!({
                "error": { "kind": err.kind(), "message": err.to_string(), "exit_code": err.exit_code() },
            });
            let r = report(cli.command.name(), cfg.as_ref(), body, Value::Null);
            // The diagnostic payload is best effort; the exit status is what counts.
            let _ = write_outputs(&cli, &r, None);
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_flag_parses_pairs_only() {
        assert_eq!(parse_window("-3.5, 2").unwrap(), [-3.5, 2.0]);
        assert!(parse_window("1").is_err());
        assert!(parse_window("1,2,3").is_err());
        assert!(parse_window("a,2").is_err());
    }

    #[test]
    fn timing_is_the_only_volatile_field() {
        let r = report("phase", None, json!({ "results": 1 }), json!(0.5));
        let keys: Vec<&String> = r.as_object().unwrap().keys().collect();
        assert!(keys.contains(&&"timing".to_string()));
        assert_eq!(r["results"], 1);
    }
}
