//! Command-line front end: experiments, latency, offline distillation and
//! evaluation, and synthetic data generation.
//!
//! Failures print one line to stderr,
//! `error kind=<Kind> msg="<message>"`, and exit with status 1
//! (2 for usage errors).

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tsil::env::synthetic::{video_logged, wheel_logged, write_mushroom_csv, write_warfarin_csv};
use tsil::env::{LoggedDataset, WheelConfig};
use tsil::harness::{
    bench_from_config, run_experiment, run_offline, write_experiment, write_latency, ExperimentConfig, ImitationConfig,
};
use tsil::imitation::{distill, ImitationPolicy, PropensityTable};
use tsil::rng::Stream;
use tsil::{Result, RngSeed};

#[derive(Parser)]
#[command(name = "tsil", version, about = "Thompson sampling bandits and their imitation policies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every trial of an experiment and write its metrics CSVs.
    Run {
        config: PathBuf,
        /// Overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the decisions of warmed-up policies and write `latency.csv`.
    BenchLatency {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit an imitation policy to a propensity table and save it as JSON.
    Distill {
        table: PathBuf,
        out: PathBuf,
        /// JSON imitation settings; defaults otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Replay a learning policy against logged uniform-random data.
    EvalOffline {
        logged: PathBuf,
        config: PathBuf,
        /// Number of actions, when the log does not show every action.
        #[arg(long)]
        n_actions: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic dataset.
    GenData {
        env: DataKind,
        n: usize,
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DataKind {
    /// Mushroom-like features with an edibility label.
    Mushroom,
    /// Warfarin-like patient features with a therapeutic dose.
    Warfarin,
    /// Uniformly logged tuples from the video-quality model.
    Video,
    /// Uniformly logged tuples from the default Wheel.
    Wheel,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, out } => {
            let mut config = ExperimentConfig::load(config)?;
            if let Some(dir) = out {
                config.output.dir = dir;
            }
            let result = run_experiment(&config)?;
            write_experiment(&result, &config.output)?;
            for log in &result.logs {
                println!("trial={} seed={} final_regret={}", log.trial, log.seed, log.final_regret());
            }
        }
        Command::BenchLatency { config, out } => {
            let config = ExperimentConfig::load(config)?;
            let report = bench_from_config(&config)?;
            write_latency(&report, out.as_deref().unwrap_or(&config.output.dir))?;
            for r in &report.rows {
                println!("{} mean_ms={:.6} two_se_ms={:.6}", r.policy, r.mean_ms, r.two_se_ms);
            }
        }
        Command::Distill {
            table,
            out,
            config,
            seed,
        } => {
            let il: ImitationConfig = match config {
                Some(p) => ImitationConfig::load(&p)?,
                None => ImitationConfig::default(),
            };
            let table = PropensityTable::load(table)?;
            let seed = RngSeed(seed);
            let mut student = ImitationPolicy::new(
                table.context_dim(),
                table.n_actions(),
                &il.hidden,
                &mut seed.derive(Stream::Imitation).derive_index(0).rng(),
            )?;
            student.set_schedule(il.optimizer);
            let report = distill(&table, &mut student, &il.distill, &mut seed.stream(Stream::Imitation))?;
            student.save(&out)?;
            println!("kl_before={} kl_after={}", report.before.kl, report.after.kl);
        }
        Command::EvalOffline {
            logged,
            config,
            n_actions,
            out,
        } => {
            let config = ExperimentConfig::load(config)?;
            let data = LoggedDataset::load(logged, n_actions)?;
            let dir = out.unwrap_or_else(|| config.output.dir.clone());
            std::fs::create_dir_all(&dir)?;
            for trial in 0..config.run.n_trials {
                let log = run_offline(&config, &data, trial)?;
                log.write_csv(create(&dir.join(format!("offline_{trial}.csv")))?)?;
                println!(
                    "trial={trial} accepted={} consumed={} mean_reward={}",
                    log.records.len(),
                    log.consumed,
                    log.mean_reward()
                );
            }
        }
        Command::GenData { env, n, out, seed } => match env {
            DataKind::Mushroom => write_mushroom_csv(n, seed, create(&out)?)?,
            DataKind::Warfarin => write_warfarin_csv(n, seed, create(&out)?)?,
            DataKind::Video => video_logged(n, seed)?.write_csv(create(&out)?)?,
            DataKind::Wheel => wheel_logged(&WheelConfig::default(), n, seed)?.write_csv(create(&out)?)?,
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error kind=UsageError msg={first:?}");
            return ExitCode::from(2);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error kind={} msg={:?}", e.kind(), e.to_string());
            ExitCode::FAILURE
        }
    }
}
