//! Experiment runner: config ingestion, orchestration, artifact emission.
//!
//! Exit codes: 0 = all verdicts pass, 2 = a verdict failed (or --check
//! mismatch), 1 = error (bad config, I/O, numeric abort).

use crate::experiments::{run_experiment, ExperimentConfig, Stage, EXPERIMENTS};
use crate::snapshot::write_snapshot;
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "szegolab",
    version,
    about = "pseudo-spectral laboratory for half-wave dynamics and Szegő-type resonant flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StageArg {
    A,
    B,
    Both,
}

impl From<StageArg> for Stage {
    fn from(s: StageArg) -> Stage {
        match s {
            StageArg::A => Stage::A,
            StageArg::B => Stage::B,
            StageArg::Both => Stage::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment described by a JSON config.
    Run {
        /// Path to the JSON experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Output directory for reports, snapshots and the manifest.
        #[arg(long)]
        out: PathBuf,
        /// Worker thread cap (default: SZG_THREADS env, else all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Compare fresh results against reports already in --out.
        #[arg(long)]
        check: bool,
        /// Cascade stage selection.
        #[arg(long, value_enum, default_value = "a")]
        stage: StageArg,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the known experiments with one-line descriptions.
    ListExperiments,
    /// Parse and validate a config without running any numerics.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub version: String,
    pub artifacts: Vec<ArtifactRecord>,
    pub wall_seconds: f64,
    /// "ok" or "aborted: <reason>".
    pub status: String,
}

/// The JSON summary written next to the CSV reports.
#[derive(Debug, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    pub verdicts: BTreeMap<String, bool>,
    pub slopes: BTreeMap<String, f64>,
    #[serde(rename = "R2")]
    pub r2: BTreeMap<String, f64>,
    pub drifts: BTreeMap<String, f64>,
    pub config_hash: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}

fn load_config(path: &Path) -> Result<(ExperimentConfig, String), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| format!("config {} does not parse: {e}", path.display()))?;
    // Hash the canonical serialization so formatting differences don't
    // change the hash.
    let canon = serde_json::to_string(&cfg).expect("config serializes");
    Ok((cfg, sha256_hex(canon.as_bytes())))
}

fn write_artifact(
    out_dir: &Path,
    name: &str,
    bytes: &[u8],
    manifest: &mut RunManifest,
) -> Result<(), String> {
    let path = out_dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    manifest.artifacts.push(ArtifactRecord {
        file: name.to_string(),
        sha256: sha256_hex(bytes),
        bytes: bytes.len() as u64,
    });
    Ok(())
}

fn configure_threads(cli_threads: Option<usize>) {
    let n = cli_threads.or_else(|| {
        std::env::var("SZG_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = n {
        // Ignore the error if a global pool already exists (tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn check_against_stored(out_dir: &Path, fresh: &Summary) -> Result<bool, String> {
    let path = out_dir.join("summary.json");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("--check: cannot read stored {}: {e}", path.display()))?;
    let stored: Summary = serde_json::from_str(&text)
        .map_err(|e| format!("--check: stored summary does not parse: {e}"))?;
    let rtol = 1e-9;
    let close = |a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>| {
        a.len() == b.len()
            && a.iter().all(|(k, v)| {
                b.get(k)
                    .map(|w| (v - w).abs() <= rtol * v.abs().max(w.abs()).max(1e-300))
                    .unwrap_or(false)
            })
    };
    Ok(stored.experiment == fresh.experiment
        && stored.config_hash == fresh.config_hash
        && stored.verdicts == fresh.verdicts
        && close(&stored.slopes, &fresh.slopes)
        && close(&stored.r2, &fresh.r2)
        && close(&stored.drifts, &fresh.drifts))
}

pub fn run_command(
    config: &Path,
    out: &Path,
    threads: Option<usize>,
    check: bool,
    stage: Stage,
    seed: Option<u64>,
) -> i32 {
    configure_threads(threads);
    let started = std::time::Instant::now();
    let (mut cfg, config_hash) = match load_config(config) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Err(e) = std::fs::create_dir_all(out) {
        eprintln!("error: cannot create {}: {e}", out.display());
        return 1;
    }
    let mut manifest = RunManifest {
        config_hash: config_hash.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        artifacts: Vec::new(),
        wall_seconds: 0.0,
        status: "ok".to_string(),
    };

    let outcome = match run_experiment(&cfg, stage) {
        Ok(o) => o,
        Err(e) => {
            manifest.status = format!("aborted: {e}");
            manifest.wall_seconds = started.elapsed().as_secs_f64();
            let _ = std::fs::write(
                out.join("run_manifest.json"),
                serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
            );
            eprintln!("error: {e}");
            return 1;
        }
    };

    let summary = Summary {
        experiment: outcome.experiment.clone(),
        verdicts: outcome.verdicts.clone(),
        slopes: outcome.slopes.clone(),
        r2: outcome.r2.clone(),
        drifts: outcome.drifts.clone(),
        config_hash,
    };

    let check_ok = if check {
        match check_against_stored(out, &summary) {
            Ok(ok) => {
                println!(
                    "check against stored reports: {}",
                    if ok { "match" } else { "MISMATCH" }
                );
                ok
            }
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        }
    } else {
        true
    };

    let mut io = || -> Result<(), String> {
        for (name, contents) in &outcome.csv {
            write_artifact(out, name, contents.as_bytes(), &mut manifest)?;
        }
        for (name, field) in &outcome.snapshots {
            let path = out.join(name);
            write_snapshot(&path, field).map_err(|e| format!("snapshot {name}: {e}"))?;
            let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
            manifest.artifacts.push(ArtifactRecord {
                file: name.clone(),
                sha256: sha256_hex(&bytes),
                bytes: bytes.len() as u64,
            });
        }
        let summary_text =
            serde_json::to_string_pretty(&summary).expect("summary serializes");
        write_artifact(out, "summary.json", summary_text.as_bytes(), &mut manifest)?;
        manifest.wall_seconds = started.elapsed().as_secs_f64();
        let manifest_text =
            serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        std::fs::write(out.join("run_manifest.json"), manifest_text)
            .map_err(|e| format!("cannot write manifest: {e}"))?;
        Ok(())
    };
    if let Err(e) = io() {
        eprintln!("error: {e}");
        return 1;
    }

    for (name, pass) in &summary.verdicts {
        println!("{}: {}", name, if *pass { "pass" } else { "FAIL" });
    }
    if outcome.pass() && check_ok {
        0
    } else {
        2
    }
}

pub fn validate_command(config: &Path) -> i32 {
    match load_config(config) {
        Ok((cfg, hash)) => match cfg.validate() {
            Ok(()) => {
                println!("ok: {} ({})", cfg.experiment, hash);
                0
            }
            Err(e) => {
                eprintln!("invalid: {e}");
                1
            }
        },
        Err(e) => {
            eprintln!("invalid: {e}");
            1
        }
    }
}

pub fn list_command() -> i32 {
    for (name, doc) in EXPERIMENTS {
        println!("{name}: {doc}");
    }
    0
}

/// Entry point used by the binary; returns the process exit code.
pub fn run_cli() -> i32 {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            threads,
            check,
            stage,
            seed,
        } => run_command(&config, &out, threads, check, stage.into(), seed),
        Command::ListExperiments => list_command(),
        Command::Validate { config } => validate_command(&config),
    }
}
