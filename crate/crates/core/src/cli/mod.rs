//! Command-line driver: one JSON config in, CSV artifacts out.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration,
//! 3 accuracy check failed, 4 fit did not converge. Artifacts are written
//! before a 3 or 4 is returned.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Error;
use commands::{Artifacts, Failure};
use config::ExperimentConfig;

/// Directory that relative `--out` paths are resolved against.
pub const OUT_DIR_VAR: &str = "FRACDYN_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ACCURACY: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "fracdyn", version, about = "Fractional open-system dynamics experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dephasing function Q(t), |u(t)| and its asymptote.
    Exact(RunArgs),
    /// Constant-rate and time-local models against the exact coherence.
    Markov(RunArgs),
    /// Fit the fractional relaxation model to the exact coherence.
    Fracfit(RunArgs),
    /// Subordinated dephasing qubit: quadrature, spectral and Monte Carlo.
    Subordinate(RunArgs),
    /// Solve a fractional GKSL equation from a generator file.
    Solve(RunArgs),
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// JSON experiment file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the config seed (Monte Carlo only).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Command {
    fn parts(&self) -> (&'static str, &RunArgs) {
        match self {
            Command::Exact(a) => ("exact", a),
            Command::Markov(a) => ("markov", a),
            Command::Fracfit(a) => ("fracfit", a),
            Command::Subordinate(a) => ("subordinate", a),
            Command::Solve(a) => ("solve", a),
        }
    }
}

/// Resolves `--out`, honouring the output-directory override for relative
/// paths.
pub fn output_path(out: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if out.is_relative() && !dir.is_empty() => Path::new(&dir).join(out),
        _ => out.to_path_buf(),
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::Validation(_) | Error::Domain(_) | Error::Json(_) => EXIT_CONFIG,
        Error::Accuracy { .. } | Error::Instability { .. } | Error::IllConditioned { .. } | Error::Estimation(_) => {
            EXIT_ACCURACY
        }
        Error::Internal(_) => EXIT_IO,
    }
}

fn with_suffix(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = if suffix.is_empty() { format!("{stem}.{ext}") } else { format!("{stem}_{suffix}.{ext}") };
    path.with_file_name(name)
}

/// Loads the config, applies the seed override and returns it with the
/// digest of its effective form.
pub fn load_config(path: &Path, seed: Option<u64>) -> Result<(ExperimentConfig, String), (i32, String)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| (EXIT_CONFIG, format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text).map_err(|e| (EXIT_CONFIG, e.to_string()))?;
    if let (Some(s), ExperimentConfig::Subordinate(c)) = (seed, &mut cfg) {
        c.seed = s;
    }
    let canonical = serde_json::to_vec(&cfg).map_err(|e| (EXIT_IO, e.to_string()))?;
    Ok((cfg, output::digest(&canonical)))
}

fn run_config(cfg: &ExperimentConfig) -> crate::Result<Artifacts> {
    match cfg {
        ExperimentConfig::Exact(c) => commands::exact(c),
        ExperimentConfig::Markov(c) => commands::markov(c),
        ExperimentConfig::Fracfit(c) => commands::fracfit(c),
        ExperimentConfig::Subordinate(c) => commands::subordinate(c, c.seed),
        ExperimentConfig::Solve(c) => commands::solve(c),
    }
}

fn write_artifacts(out: &Path, command: &str, digest: &str, art: &Artifacts) -> crate::Result<()> {
    output::write_file(out, &art.table.render(command, digest))?;
    for (suffix, table) in &art.extra {
        output::write_file(&with_suffix(out, suffix, "csv"), &table.render(command, digest))?;
    }
    if let Some(json) = &art.json {
        output::write_file(&with_suffix(out, "", "json"), json)?;
    }
    Ok(())
}

/// Runs one parsed invocation and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let (name, args) = cli.command.parts();
    let (cfg, digest) = match load_config(&args.config, args.seed) {
        Ok(v) => v,
        Err((code, msg)) => {
            eprintln!("fracdyn: {msg}");
            return code;
        }
    };
    if cfg.command() != name {
        eprintln!("fracdyn: config field `command`: file is for `{}` but `{name}` was invoked", cfg.command());
        return EXIT_CONFIG;
    }

    let result = match args.threads {
        Some(0) => {
            eprintln!("fracdyn: --threads must be at least 1");
            return EXIT_CONFIG;
        }
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run_config(&cfg)),
            Err(e) => {
                eprintln!("fracdyn: cannot start thread pool: {e}");
                return EXIT_IO;
            }
        },
        None => run_config(&cfg),
    };
    let art = match result {
        Ok(a) => a,
        Err(e) => {
            eprintln!("fracdyn: {e}");
            return exit_code(&e);
        }
    };

    let out = output_path(&args.out);
    if let Err(e) = write_artifacts(&out, name, &digest, &art) {
        eprintln!("fracdyn: cannot write {}: {e}", out.display());
        return EXIT_IO;
    }
    match &art.failure {
        None => EXIT_OK,
        Some(Failure::Accuracy(msg)) => {
            eprintln!("fracdyn: {msg}");
            EXIT_ACCURACY
        }
        Some(Failure::NotConverged(msg)) => {
            eprintln!("fracdyn: {msg}");
            EXIT_NOT_CONVERGED
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
