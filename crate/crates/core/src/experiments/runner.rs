use std::path::PathBuf;

use thiserror::Error;

use super::config::{ConfigError, ScenarioConfig, WaitTime};
use super::metrics::{f6, CsvRow, MetricsRow, RowKey};
use crate::exec::Exec;
use crate::forwarder::{ForwarderConfig, Mode};
use crate::ontology::{evaluate_accuracy, Taxonomy};
use crate::semantic::{EmbeddingModel, ModelError};
use crate::simcore::{self, ConsumerSpec, ProducerSpec, RunMetrics, SimSetup, Topology, TopologyError};
use crate::time::SimDuration;

/// Per-entry footprint assumed for CS and FIB entries in memory estimates.
pub const TABLE_ENTRY_BYTES: u64 = 64;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no model path: set `model` in the scenario or FIF_MODEL_PATH")]
    MissingModel,
    #[error("model has no tokens")]
    EmptyModel,
}

/// Immutable inputs shared by every run of a sweep.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub topology: Topology,
    pub model: EmbeddingModel,
}

impl Inputs {
    pub fn load(cfg: &ScenarioConfig) -> Result<Self, ExperimentError> {
        let topology = Topology::load(&cfg.topology)?;
        let model_path: PathBuf = cfg.model_path().ok_or(ExperimentError::MissingModel)?;
        let model = EmbeddingModel::load(model_path)?;
        if model.is_empty() {
            return Err(ExperimentError::EmptyModel);
        }
        cfg.validate_nodes(topology.node_count())?;
        Ok(Self { topology, model })
    }
}

#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub metrics: RunMetrics,
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub runs: Vec<SeedRun>,
    /// One row per seed, then the aggregate row.
    pub rows: Vec<MetricsRow>,
}

impl ScenarioResult {
    pub fn aggregate(&self) -> &MetricsRow {
        self.rows.last().expect("at least one seed")
    }

    /// Retrieved `(interest token, data token)` pairs over all seeds.
    pub fn pairs(&self) -> impl Iterator<Item = &(String, String)> {
        self.runs.iter().flat_map(|r| r.metrics.pairs.iter())
    }
}

fn scale(d: SimDuration, k: f64) -> SimDuration {
    SimDuration((d.as_micros() as f64 * k).round() as u64)
}

fn secs(s: f64) -> SimDuration {
    SimDuration((s * 1e6).round() as u64)
}

impl ScenarioConfig {
    /// Nodes that hold fuzzy CS hits when the wait policy is on.
    pub fn effective_wait_nodes(&self) -> Vec<usize> {
        match &self.wait_nodes {
            Some(n) => n.clone(),
            None => self.consumers.iter().map(|c| c.node).collect(),
        }
    }

    pub fn wait_duration(&self, topology: &Topology, node: usize) -> SimDuration {
        match self.wait_time {
            WaitTime::Rtt(k) => scale(topology.rtt(node, self.producer), k),
            WaitTime::Millis(ms) => SimDuration::from_millis_f64(ms),
        }
    }

    fn row_key(&self, topology: &Topology) -> RowKey {
        let wait_ms = match (self.wait_enabled && self.mode == Mode::Fif, self.effective_wait_nodes().first()) {
            (true, Some(&n)) => self.wait_duration(topology, n).as_millis_f64(),
            _ => 0.0,
        };
        RowKey {
            mode: self.mode,
            tau: self.tau,
            max_matches: self.max_matches,
            fib_size: self.fib_size,
            cs_capacity: self.cs_capacity,
            cs_policy: self.cs_policy.to_string(),
            overlap: self.overlap,
            wait_time_ms: wait_ms,
        }
    }

    pub fn sim_setup<'a>(&self, inputs: &'a Inputs, seed: u64) -> SimSetup<'a> {
        let prefixes = self.content_prefixes();
        let wait = if self.wait_enabled {
            self.effective_wait_nodes()
                .into_iter()
                .map(|n| (n, self.wait_duration(&inputs.topology, n)))
                .collect()
        } else {
            Vec::new()
        };
        SimSetup {
            topology: &inputs.topology,
            model: &inputs.model,
            forwarder: ForwarderConfig {
                mode: self.mode,
                tau: self.tau,
                max_matches: self.max_matches,
                cs_capacity: self.cs_capacity,
                cs_policy: self.cs_policy,
                ..ForwarderConfig::default()
            },
            wait,
            consumers: self
                .consumers
                .iter()
                .map(|c| ConsumerSpec {
                    node: c.node,
                    rate: c.rate,
                    prefix: c.prefix.clone(),
                    shared_prefix: self.shared_prefix.clone(),
                    overlap: c.overlap.unwrap_or(self.overlap),
                })
                .collect(),
            producer: Some(ProducerSpec {
                node: self.producer,
                prefix: self.producer_prefix.clone(),
                payload_size: self.payload_size,
            }),
            fib_size: self.fib_size,
            fib_prefixes: prefixes.clone(),
            warmup_prefixes: prefixes,
            suffix: self.suffix.clone(),
            warmup: secs(self.warmup_s),
            duration: secs(self.duration_s),
            hop_limit: self.hop_limit,
            seed,
        }
    }
}

/// Estimated bytes for semantic state: the model at every node under FIF
/// plus CS and FIB entries at every node.
pub fn memory_estimate(cfg: &ScenarioConfig, inputs: &Inputs, fib_entries: usize) -> u64 {
    let n = inputs.topology.node_count() as u64;
    let model = if cfg.mode == Mode::Fif { inputs.model.memory_bytes() } else { 0 };
    n * (model + (fib_entries as u64 + cfg.cs_capacity as u64) * TABLE_ENTRY_BYTES)
}

/// Runs every `(point, seed)` pair, possibly concurrently, and assembles
/// results in point order.
pub fn run_points(points: &[ScenarioConfig], inputs: &Inputs, exec: Exec) -> Result<Vec<ScenarioResult>, ExperimentError> {
    for p in points {
        p.validate()?;
        p.validate_nodes(inputs.topology.node_count())?;
    }
    let jobs: Vec<(usize, u64)> = points
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.seeds.iter().map(move |&s| (i, s)))
        .collect();
    let mut runs = exec
        .map(&jobs, |&(i, seed)| simcore::run(&points[i].sim_setup(inputs, seed)))
        .into_iter();

    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let key = p.row_key(&inputs.topology);
        let mut seed_runs = Vec::with_capacity(p.seeds.len());
        let mut rows = Vec::with_capacity(p.seeds.len() + 1);
        for &seed in &p.seeds {
            let metrics = runs.next().expect("one run per job");
            let mem = memory_estimate(p, inputs, metrics.fib_entries);
            rows.push(MetricsRow::from_run(&key, seed, &metrics, mem));
            seed_runs.push(SeedRun { seed, metrics });
        }
        rows.push(MetricsRow::mean(&rows).expect("non-empty seeds"));
        out.push(ScenarioResult {
            config: p.clone(),
            runs: seed_runs,
            rows,
        });
    }
    Ok(out)
}

pub fn run_scenario(cfg: &ScenarioConfig, inputs: &Inputs, exec: Exec) -> Result<ScenarioResult, ExperimentError> {
    Ok(run_points(std::slice::from_ref(cfg), inputs, exec)?.remove(0))
}

/// All rows of all results, in order.
pub fn collect_rows(results: &[ScenarioResult]) -> Vec<MetricsRow> {
    results.iter().flat_map(|r| r.rows.iter().cloned()).collect()
}

fn both_modes(cfg: ScenarioConfig) -> [ScenarioConfig; 2] {
    [
        ScenarioConfig {
            mode: Mode::Fif,
            ..cfg.clone()
        },
        ScenarioConfig { mode: Mode::Emf, ..cfg },
    ]
}

pub fn sweep_fib_size(base: &ScenarioConfig, sizes: &[usize], inputs: &Inputs, exec: Exec) -> Result<Vec<ScenarioResult>, ExperimentError> {
    let points: Vec<ScenarioConfig> = sizes
        .iter()
        .flat_map(|&fib_size| both_modes(ScenarioConfig { fib_size, ..base.clone() }))
        .collect();
    run_points(&points, inputs, exec)
}

pub fn sweep_matches(base: &ScenarioConfig, budgets: &[usize], inputs: &Inputs, exec: Exec) -> Result<Vec<ScenarioResult>, ExperimentError> {
    let points: Vec<ScenarioConfig> = budgets
        .iter()
        .flat_map(|&max_matches| both_modes(ScenarioConfig { max_matches, ..base.clone() }))
        .collect();
    run_points(&points, inputs, exec)
}

pub fn sweep_threshold(base: &ScenarioConfig, taus: &[f64], inputs: &Inputs, exec: Exec) -> Result<Vec<ScenarioResult>, ExperimentError> {
    let points: Vec<ScenarioConfig> = taus
        .iter()
        .flat_map(|&tau| both_modes(ScenarioConfig { tau, ..base.clone() }))
        .collect();
    run_points(&points, inputs, exec)
}

/// FIF with forward-or-wait on, for every overlap and wait multiple.
pub fn sweep_wait(
    base: &ScenarioConfig,
    overlaps: &[f64],
    wait_rtts: &[f64],
    inputs: &Inputs,
    exec: Exec,
) -> Result<Vec<ScenarioResult>, ExperimentError> {
    let mut points = Vec::new();
    for &overlap in overlaps {
        for &k in wait_rtts {
            points.push(ScenarioConfig {
                mode: Mode::Fif,
                overlap,
                wait_enabled: true,
                wait_time: WaitTime::Rtt(k),
                ..base.clone()
            });
        }
    }
    run_points(&points, inputs, exec)
}

/// Taxonomy agreement of retrieved pairs for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyRow {
    pub tau: f64,
    /// `None` pools the pairs of every seed.
    pub seed: Option<u64>,
    pub pairs: usize,
    pub pairs_used: usize,
    pub pairs_skipped_oov: usize,
    /// Zero when no pair could be evaluated.
    pub mean_wup: f64,
}

impl CsvRow for AccuracyRow {
    fn header() -> &'static [&'static str] {
        &["tau", "seed", "row_kind", "pairs", "pairs_used", "pairs_skipped_oov", "mean_wup"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            f6(self.tau),
            self.seed.map_or_else(|| "pooled".to_string(), |s| s.to_string()),
            if self.seed.is_some() { "seed" } else { "aggregate" }.to_string(),
            self.pairs.to_string(),
            self.pairs_used.to_string(),
            self.pairs_skipped_oov.to_string(),
            f6(self.mean_wup),
        ]
    }
}

fn accuracy_row(tau: f64, seed: Option<u64>, pairs: &[&(String, String)], taxonomy: &Taxonomy) -> AccuracyRow {
    let report = evaluate_accuracy(pairs.iter().map(|p| (p.0.as_str(), p.1.as_str())).collect::<Vec<_>>().as_slice(), taxonomy);
    AccuracyRow {
        tau,
        seed,
        pairs: pairs.len(),
        pairs_used: report.used,
        pairs_skipped_oov: report.skipped,
        mean_wup: report.mean_wup.unwrap_or(0.0),
    }
}

/// Runs FIF at each tau and scores the retrieved pairs against `taxonomy`.
pub fn accuracy_sweep(
    base: &ScenarioConfig,
    taus: &[f64],
    taxonomy: &Taxonomy,
    inputs: &Inputs,
    exec: Exec,
) -> Result<Vec<AccuracyRow>, ExperimentError> {
    let points: Vec<ScenarioConfig> = taus
        .iter()
        .map(|&tau| ScenarioConfig {
            mode: Mode::Fif,
            tau,
            ..base.clone()
        })
        .collect();
    let results = run_points(&points, inputs, exec)?;
    let mut rows = Vec::new();
    for r in &results {
        for run in &r.runs {
            let pairs: Vec<&(String, String)> = run.metrics.pairs.iter().collect();
            rows.push(accuracy_row(r.config.tau, Some(run.seed), &pairs, taxonomy));
        }
        let pooled: Vec<&(String, String)> = r.pairs().collect();
        rows.push(accuracy_row(r.config.tau, None, &pooled, taxonomy));
    }
    Ok(rows)
}
