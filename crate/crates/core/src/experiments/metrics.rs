use std::io;
use std::path::Path;

use crate::forwarder::Mode;
use crate::simcore::RunMetrics;

/// One CSV line: a single seed, or the mean over seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub mode: Mode,
    pub tau: f64,
    pub max_matches: usize,
    pub fib_size: usize,
    pub cs_capacity: usize,
    pub cs_policy: String,
    pub overlap: f64,
    pub wait_time_ms: f64,
    /// `None` on the aggregate row.
    pub seed: Option<u64>,
    pub interests_sent: f64,
    pub data_retrieved: f64,
    pub retrieval_rate: f64,
    pub retrieval_rate_min: f64,
    pub retrieval_rate_max: f64,
    pub cs_exact_hits: f64,
    pub cs_fuzzy_hits: f64,
    pub fib_exact_forwards: f64,
    pub fib_fuzzy_forwards: f64,
    pub attached_forwards: f64,
    pub drops: f64,
    pub waits: f64,
    pub better_after_wait_count: f64,
    pub better_after_wait_pct: f64,
    pub mean_wait_improvement: f64,
    pub distance_evaluations: f64,
    pub model_memory_estimate_bytes: f64,
}

/// Scenario key columns shared by every row of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct RowKey {
    pub mode: Mode,
    pub tau: f64,
    pub max_matches: usize,
    pub fib_size: usize,
    pub cs_capacity: usize,
    pub cs_policy: String,
    pub overlap: f64,
    pub wait_time_ms: f64,
}

impl MetricsRow {
    pub fn is_aggregate(&self) -> bool {
        self.seed.is_none()
    }

    pub fn from_run(key: &RowKey, seed: u64, run: &RunMetrics, memory_bytes: u64) -> Self {
        let c = &run.counters;
        let rate = run.retrieval_rate();
        let finished = c.waits_finished as f64;
        let improved = c.waits_improved as f64;
        Self {
            mode: key.mode,
            tau: key.tau,
            max_matches: key.max_matches,
            fib_size: key.fib_size,
            cs_capacity: key.cs_capacity,
            cs_policy: key.cs_policy.clone(),
            overlap: key.overlap,
            wait_time_ms: key.wait_time_ms,
            seed: Some(seed),
            interests_sent: run.interests_sent as f64,
            data_retrieved: run.data_retrieved as f64,
            retrieval_rate: rate,
            retrieval_rate_min: rate,
            retrieval_rate_max: rate,
            cs_exact_hits: c.cs_exact_hits as f64,
            cs_fuzzy_hits: c.cs_fuzzy_hits as f64,
            fib_exact_forwards: c.fib_exact_forwards as f64,
            fib_fuzzy_forwards: c.fib_fuzzy_forwards as f64,
            attached_forwards: c.attached_forwards as f64,
            drops: c.drops() as f64,
            waits: finished,
            better_after_wait_count: improved,
            better_after_wait_pct: if finished > 0.0 { 100.0 * improved / finished } else { 0.0 },
            mean_wait_improvement: if improved > 0.0 { c.wait_improvement_sum / improved } else { 0.0 },
            distance_evaluations: c.distance_evaluations as f64,
            model_memory_estimate_bytes: memory_bytes as f64,
        }
    }

    /// Exact per-column means of `rows`, with the rate range across them.
    pub fn mean(rows: &[MetricsRow]) -> Option<Self> {
        let first = rows.first()?;
        let k = rows.len() as f64;
        let avg = |f: fn(&MetricsRow) -> f64| rows.iter().map(f).sum::<f64>() / k;
        Some(Self {
            seed: None,
            interests_sent: avg(|r| r.interests_sent),
            data_retrieved: avg(|r| r.data_retrieved),
            retrieval_rate: avg(|r| r.retrieval_rate),
            retrieval_rate_min: rows.iter().map(|r| r.retrieval_rate_min).fold(f64::INFINITY, f64::min),
            retrieval_rate_max: rows.iter().map(|r| r.retrieval_rate_max).fold(f64::NEG_INFINITY, f64::max),
            cs_exact_hits: avg(|r| r.cs_exact_hits),
            cs_fuzzy_hits: avg(|r| r.cs_fuzzy_hits),
            fib_exact_forwards: avg(|r| r.fib_exact_forwards),
            fib_fuzzy_forwards: avg(|r| r.fib_fuzzy_forwards),
            attached_forwards: avg(|r| r.attached_forwards),
            drops: avg(|r| r.drops),
            waits: avg(|r| r.waits),
            better_after_wait_count: avg(|r| r.better_after_wait_count),
            better_after_wait_pct: avg(|r| r.better_after_wait_pct),
            mean_wait_improvement: avg(|r| r.mean_wait_improvement),
            distance_evaluations: avg(|r| r.distance_evaluations),
            model_memory_estimate_bytes: avg(|r| r.model_memory_estimate_bytes),
            ..first.clone()
        })
    }
}

/// Fixed-layout CSV record.
pub trait CsvRow {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

pub(crate) fn f6(x: f64) -> String {
    format!("{x:.6}")
}

impl CsvRow for MetricsRow {
    fn header() -> &'static [&'static str] {
        &[
            "mode",
            "tau",
            "max_matches",
            "fib_size",
            "cs_capacity",
            "cs_policy",
            "overlap",
            "wait_time_ms",
            "seed",
            "row_kind",
            "interests_sent",
            "data_retrieved",
            "retrieval_rate",
            "retrieval_rate_min",
            "retrieval_rate_max",
            "cs_exact_hits",
            "cs_fuzzy_hits",
            "fib_exact_forwards",
            "fib_fuzzy_forwards",
            "attached_forwards",
            "drops",
            "waits",
            "better_after_wait_count",
            "better_after_wait_pct",
            "mean_wait_improvement",
            "distance_evaluations",
            "model_memory_estimate_bytes",
        ]
    }

    fn fields(&self) -> Vec<String> {
        let mut out = vec![
            self.mode.to_string(),
            f6(self.tau),
            self.max_matches.to_string(),
            self.fib_size.to_string(),
            self.cs_capacity.to_string(),
            self.cs_policy.clone(),
            f6(self.overlap),
            f6(self.wait_time_ms),
            self.seed.map_or_else(|| "mean".to_string(), |s| s.to_string()),
            if self.seed.is_some() { "seed" } else { "aggregate" }.to_string(),
        ];
        out.extend(
            [
                self.interests_sent,
                self.data_retrieved,
                self.retrieval_rate,
                self.retrieval_rate_min,
                self.retrieval_rate_max,
                self.cs_exact_hits,
                self.cs_fuzzy_hits,
                self.fib_exact_forwards,
                self.fib_fuzzy_forwards,
                self.attached_forwards,
                self.drops,
                self.waits,
                self.better_after_wait_count,
                self.better_after_wait_pct,
                self.mean_wait_improvement,
                self.distance_evaluations,
                self.model_memory_estimate_bytes,
            ]
            .map(f6),
        );
        out
    }
}

/// CSV text: header plus rows, LF line endings.
pub fn to_csv_string<R: CsvRow>(rows: &[R]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(R::header()).expect("in-memory write");
    for r in rows {
        w.write_record(r.fields()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Writes the CSV atomically: a temporary file in the target directory is
/// renamed over `path` only after everything was written.
pub fn emit_csv<R: CsvRow>(rows: &[R], path: &Path) -> io::Result<()> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(to_csv_string(rows).as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
