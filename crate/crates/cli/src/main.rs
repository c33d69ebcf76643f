//! `fif`: run forwarding scenarios and sweeps, write CSV results.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use fif_core::exec::Exec;
use fif_core::experiments::{
    accuracy_sweep, ann_bench, collect_rows, emit_csv, run_scenario, sweep_fib_size, sweep_matches, sweep_threshold,
    sweep_wait, AnnBenchConfig, Inputs, ScenarioConfig, ScenarioResult,
};
use fif_core::forwarder::Mode;
use fif_core::ontology::Taxonomy;
use fif_core::semantic::LshParams;

#[derive(Parser)]
#[command(name = "fif", version, about = "Fuzzy Interest Forwarding simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario (every seed) and write per-seed plus aggregate rows.
    Run {
        #[command(flatten)]
        common: Common,
        /// Also write retrieved (interest token, data token) pairs here.
        #[arg(long)]
        pairs_out: Option<PathBuf>,
    },
    /// Sweep FIB size, both modes.
    SweepFib {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "0,100,400,1200")]
        sizes: Vec<usize>,
    },
    /// Sweep the match budget, both modes.
    SweepMatches {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "10,25,50")]
        budgets: Vec<usize>,
    },
    /// Sweep the similarity threshold, both modes.
    SweepThreshold {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.4,0.8", allow_hyphen_values = true)]
        taus: Vec<f64>,
    },
    /// Sweep consumer overlap and wait time with forward-or-wait on (FIF only).
    SweepWait {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
        overlaps: Vec<f64>,
        /// Wait times as multiples of the node-to-producer RTT.
        #[arg(long, value_delimiter = ',', default_value = "3,5")]
        wait_rtts: Vec<f64>,
    },
    /// Score retrieved pairs against a taxonomy (Wu-Palmer), one FIF run per tau.
    EvalAccuracy {
        #[command(flatten)]
        common: Common,
        /// Taxonomy file (`parent child` lines)
        #[arg(long)]
        taxonomy: PathBuf,
        /// Thresholds to run; defaults to the scenario's tau.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        taus: Option<Vec<f64>>,
    },
    /// Measure LSH Forest recall and cost on synthetic vectors.
    AnnBench(AnnArgs),
}

#[derive(Args)]
struct Common {
    /// Scenario file (`key = value` lines).
    #[arg(long)]
    scenario: PathBuf,
    /// CSV output path; written atomically.
    #[arg(long)]
    out: PathBuf,
    /// Override: fif or emf.
    #[arg(long)]
    mode: Option<String>,
    /// Override: similarity threshold in [-1, 1].
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    /// Override: per-Interest match budget.
    #[arg(long)]
    max_matches: Option<usize>,
    /// Override: number of FIB names drawn.
    #[arg(long)]
    fib_size: Option<usize>,
    /// Override: run a single seed.
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// Override: comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Concurrent simulations (1 = sequential).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct AnnArgs {
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 400)]
    dim: usize,
    #[arg(long, default_value_t = 100)]
    clusters: usize,
    #[arg(long, default_value_t = 0.5)]
    cohesion: f64,
    #[arg(long, default_value_t = 100)]
    queries: usize,
    #[arg(long, default_value_t = 0.9)]
    fidelity: f64,
    #[arg(long, default_value_t = 30)]
    trees: usize,
    #[arg(long, default_value_t = 32)]
    key_length: usize,
    #[arg(long, default_value_t = 10)]
    m: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit 2 for bad input, 1 for failures after validation.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

fn runtime<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Runtime(e.into())
}

impl Common {
    /// Loads the scenario and applies flag overrides on top of it.
    fn load(&self) -> Result<(ScenarioConfig, Inputs, Exec), Failure> {
        let mut cfg = ScenarioConfig::load(&self.scenario).map_err(usage)?;
        if let Some(m) = &self.mode {
            cfg.mode = m.parse::<Mode>().map_err(|e| usage(anyhow!(e)))?;
        }
        if let Some(t) = self.tau {
            cfg.tau = t;
        }
        if let Some(k) = self.max_matches {
            cfg.max_matches = k;
        }
        if let Some(f) = self.fib_size {
            cfg.fib_size = f;
        }
        if let Some(s) = self.seed {
            cfg.seeds = vec![s];
        }
        if let Some(s) = &self.seeds {
            cfg.seeds = s.clone();
        }
        if self.jobs == 0 {
            return Err(usage(anyhow!("--jobs must be at least 1")));
        }
        cfg.validate().map_err(usage)?;
        let inputs = Inputs::load(&cfg).map_err(usage)?;
        Ok((cfg, inputs, Exec::with_jobs(self.jobs)))
    }
}

fn write_rows(results: &[ScenarioResult], out: &Path) -> Result<(), Failure> {
    emit_csv(&collect_rows(results), out)
        .with_context(|| format!("writing {}", out.display()))
        .map_err(runtime)
}

fn summarize(results: &[ScenarioResult]) {
    for r in results {
        let a = r.aggregate();
        println!(
            "{} tau={:.2} matches={} fib={} overlap={:.2}: retrieval_rate={:.3}/s [{:.3}, {:.3}]{}",
            a.mode,
            a.tau,
            a.max_matches,
            a.fib_size,
            a.overlap,
            a.retrieval_rate,
            a.retrieval_rate_min,
            a.retrieval_rate_max,
            if a.wait_time_ms > 0.0 {
                format!(
                    " wait={:.0}ms better_after_wait={:.2}% improvement={:.4}",
                    a.wait_time_ms, a.better_after_wait_pct, a.mean_wait_improvement
                )
            } else {
                String::new()
            }
        );
    }
}

fn check_unit(name: &str, xs: &[f64], lo: f64, hi: f64) -> Result<(), Failure> {
    match xs.iter().find(|x| !(lo..=hi).contains(*x)) {
        Some(x) => Err(usage(anyhow!("{name} must be in [{lo}, {hi}], got {x}"))),
        None => Ok(()),
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let started = Instant::now();
    match cli.command {
        Command::Run { common, pairs_out } => {
            let (cfg, inputs, exec) = common.load()?;
            let r = run_scenario(&cfg, &inputs, exec).map_err(runtime)?;
            let results = [r];
            write_rows(&results, &common.out)?;
            if let Some(p) = pairs_out {
                let text: String = results[0].pairs().map(|(a, b)| format!("{a} {b}\n")).collect();
                std::fs::write(&p, text)
                    .with_context(|| format!("writing {}", p.display()))
                    .map_err(runtime)?;
            }
            summarize(&results);
        }
        Command::SweepFib { common, sizes } => {
            let (cfg, inputs, exec) = common.load()?;
            let results = sweep_fib_size(&cfg, &sizes, &inputs, exec).map_err(runtime)?;
            write_rows(&results, &common.out)?;
            summarize(&results);
        }
        Command::SweepMatches { common, budgets } => {
            if budgets.contains(&0) {
                return Err(usage(anyhow!("match budgets must be at least 1")));
            }
            let (cfg, inputs, exec) = common.load()?;
            let results = sweep_matches(&cfg, &budgets, &inputs, exec).map_err(runtime)?;
            write_rows(&results, &common.out)?;
            summarize(&results);
        }
        Command::SweepThreshold { common, taus } => {
            check_unit("tau", &taus, -1.0, 1.0)?;
            let (cfg, inputs, exec) = common.load()?;
            let results = sweep_threshold(&cfg, &taus, &inputs, exec).map_err(runtime)?;
            write_rows(&results, &common.out)?;
            summarize(&results);
        }
        Command::SweepWait {
            common,
            overlaps,
            wait_rtts,
        } => {
            check_unit("overlap", &overlaps, 0.0, 1.0)?;
            check_unit("wait rtt multiple", &wait_rtts, 0.0, f64::MAX)?;
            let (cfg, inputs, exec) = common.load()?;
            let results = sweep_wait(&cfg, &overlaps, &wait_rtts, &inputs, exec).map_err(runtime)?;
            write_rows(&results, &common.out)?;
            summarize(&results);
        }
        Command::EvalAccuracy { common, taxonomy, taus } => {
            let (cfg, inputs, exec) = common.load()?;
            let taus = taus.unwrap_or_else(|| vec![cfg.tau]);
            check_unit("tau", &taus, -1.0, 1.0)?;
            let tax = Taxonomy::load(&taxonomy).map_err(usage)?;
            let rows = accuracy_sweep(&cfg, &taus, &tax, &inputs, exec).map_err(runtime)?;
            emit_csv(&rows, &common.out)
                .with_context(|| format!("writing {}", common.out.display()))
                .map_err(runtime)?;
            for r in rows.iter().filter(|r| r.seed.is_none()) {
                println!(
                    "tau={:.2}: mean_wup={:.4} over {} pairs ({} outside the taxonomy)",
                    r.tau, r.mean_wup, r.pairs_used, r.pairs_skipped_oov
                );
            }
        }
        Command::AnnBench(a) => {
            if a.jobs == 0 {
                return Err(usage(anyhow!("--jobs must be at least 1")));
            }
            let cfg = AnnBenchConfig {
                n: a.n,
                dim: a.dim,
                clusters: a.clusters,
                cohesion: a.cohesion,
                queries: a.queries,
                fidelity: a.fidelity,
                m: a.m,
                lsh: LshParams {
                    num_trees: a.trees,
                    max_key_length: a.key_length,
                    seed: a.seed,
                },
                seed: a.seed,
            };
            if cfg.n == 0 || cfg.dim == 0 || cfg.queries == 0 || !(0.0..=1.0).contains(&cfg.cohesion) {
                return Err(usage(anyhow!("n, dim and queries must be positive; cohesion in [0, 1]")));
            }
            let report = ann_bench(cfg, Exec::with_jobs(a.jobs)).map_err(usage)?;
            if let Some(out) = &a.out {
                emit_csv(std::slice::from_ref(&report), out)
                    .with_context(|| format!("writing {}", out.display()))
                    .map_err(runtime)?;
            }
            println!(
                "recall@1={:.3} mean_evaluations={:.1} (of {}) max_evaluations={} index_bytes={}",
                report.recall_at_1, report.mean_distance_evaluations, cfg.n, report.max_distance_evaluations, report.index_memory_bytes
            );
        }
    }
    eprintln!("done in {:.2}s", started.elapsed().as_secs_f64());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
