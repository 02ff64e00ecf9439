//! Thin command-line front end over `dqa_track::experiments`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dqa_track::experiments::{
    cmd_krooks_window, cmd_oracle_check, cmd_pause_sweep, cmd_track, cmd_unique_feasible, oracle_check, parse_config,
    BackendConfig, KrooksWindowConfig, OracleCheckConfig, OutputFile, PauseSweepConfig, TrackConfig,
    UniqueFeasibleConfig,
};
use dqa_track::sampler::PauseBackend;
use dqa_track::{Error, Result};
use serde::de::DeserializeOwned;

#[derive(Parser)]
#[command(name = "dqa", version, about = "Annealing and tracking experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config file; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the config seed (for `track`, also the scenario seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for output files; printed to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the backend: exact-dynamics, surrogate or exhaustive.
    #[arg(long, global = true)]
    backend: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Final-state probabilities of biased rooks over an anneal-time grid.
    KrooksWindow,
    /// Unique feasible states accumulated over shots.
    UniqueFeasible,
    /// Unique feasible states versus reverse-anneal pause point.
    PauseSweep,
    /// Hybrid tracking over a generated or loaded scenario.
    Track,
    /// Brute-force invariant checks on small instances.
    OracleCheck,
}

fn load<T: DeserializeOwned + Default>(path: &Option<PathBuf>) -> Result<T> {
    match path {
        Some(p) => parse_config(&std::fs::read_to_string(p)?),
        None => Ok(T::default()),
    }
}

fn run(cli: &Cli) -> Result<Vec<OutputFile>> {
    let backend = cli.backend.as_deref();
    match cli.command {
        Command::KrooksWindow => {
            let mut cfg: KrooksWindowConfig = load(&cli.config)?;
            if let Some(b) = backend.filter(|b| *b != "exact-dynamics") {
                return Err(Error::InvalidArgument(format!("krooks-window only runs exact-dynamics, not `{b}`")));
            }
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            cmd_krooks_window(&cfg)
        }
        Command::UniqueFeasible => {
            let mut cfg: UniqueFeasibleConfig = load(&cli.config)?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            if let Some(b) = backend {
                cfg.backend = BackendConfig::from_name(b)?;
            }
            cmd_unique_feasible(&cfg)
        }
        Command::PauseSweep => {
            let mut cfg: PauseSweepConfig = load(&cli.config)?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            match backend {
                None => {}
                Some("exact-dynamics") => cfg.backend = PauseSweepConfig::default().backend,
                Some("surrogate") => {
                    cfg.backend = PauseBackend::Surrogate {
                        temperature_scale: 1.0,
                        sweeps: 10,
                    }
                }
                Some(b) => return Err(Error::InvalidArgument(format!("pause-sweep does not support `{b}`"))),
            }
            cmd_pause_sweep(&cfg)
        }
        Command::Track => {
            let mut cfg: TrackConfig = load(&cli.config)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
                cfg.scenario.seed = s;
            }
            if let Some(b) = backend {
                cfg.backend = BackendConfig::from_name(b)?;
            }
            cmd_track(&cfg)
        }
        Command::OracleCheck => {
            let mut cfg: OracleCheckConfig = load(&cli.config)?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            let failed: Vec<String> = oracle_check(&cfg)?
                .into_iter()
                .filter(|r| !r.passed)
                .map(|r| format!("{}: {}", r.check, r.detail))
                .collect();
            if !failed.is_empty() {
                return Err(Error::InvalidModel(format!("oracle checks failed: {}", failed.join("; "))));
            }
            cmd_oracle_check(&cfg)
        }
    }
}

fn emit(files: &[OutputFile], out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for f in files {
                std::fs::write(dir.join(&f.name), &f.contents)?;
            }
        }
        None => {
            for f in files {
                if files.len() > 1 {
                    println!("==> {} <==", f.name);
                }
                print!("{}", f.contents);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|files| emit(&files, &cli.out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = serde_json::json!({ "error": e.code(), "message": e.to_string() });
            eprintln!("{msg}");
            ExitCode::FAILURE
        }
    }
}
