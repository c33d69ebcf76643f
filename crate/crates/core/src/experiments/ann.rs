use super::metrics::{f6, CsvRow};
use crate::exec::Exec;
use crate::semantic::synthetic::{clustered_model, perturbed_queries};
use crate::semantic::{brute_force_top, IndexError, LshForestIndex, LshParams};

/// Synthetic recall/cost measurement of the LSH Forest against a full scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnBenchConfig {
    pub n: usize,
    pub dim: usize,
    pub clusters: usize,
    pub cohesion: f64,
    pub queries: usize,
    /// Cosine between each query and the vector it was derived from.
    pub fidelity: f64,
    pub m: usize,
    pub lsh: LshParams,
    pub seed: u64,
}

impl Default for AnnBenchConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            dim: 400,
            clusters: 100,
            cohesion: 0.5,
            queries: 100,
            fidelity: 0.9,
            m: 10,
            lsh: LshParams {
                num_trees: 30,
                ..LshParams::default()
            },
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnBenchReport {
    pub config: AnnBenchConfig,
    /// Fraction of queries whose top index result is the exact nearest neighbor.
    pub recall_at_1: f64,
    pub mean_distance_evaluations: f64,
    pub max_distance_evaluations: usize,
    pub index_memory_bytes: u64,
}

impl CsvRow for AnnBenchReport {
    fn header() -> &'static [&'static str] {
        &[
            "n",
            "dim",
            "queries",
            "m",
            "num_trees",
            "max_key_length",
            "seed",
            "recall_at_1",
            "mean_distance_evaluations",
            "max_distance_evaluations",
            "index_memory_bytes",
        ]
    }

    fn fields(&self) -> Vec<String> {
        let c = &self.config;
        vec![
            c.n.to_string(),
            c.dim.to_string(),
            c.queries.to_string(),
            c.m.to_string(),
            c.lsh.num_trees.to_string(),
            c.lsh.max_key_length.to_string(),
            c.lsh.seed.to_string(),
            f6(self.recall_at_1),
            f6(self.mean_distance_evaluations),
            self.max_distance_evaluations.to_string(),
            self.index_memory_bytes.to_string(),
        ]
    }
}

pub fn ann_bench(cfg: AnnBenchConfig, exec: Exec) -> Result<AnnBenchReport, IndexError> {
    let model = clustered_model(cfg.n, cfg.dim, cfg.clusters, cfg.cohesion, cfg.seed);
    let index = LshForestIndex::build_with(&model, cfg.lsh, exec)?;
    let queries = perturbed_queries(&model, cfg.queries, cfg.fidelity, cfg.seed.wrapping_add(1));
    let outcomes = exec.map(&queries, |(_, q)| {
        let approx = index.query(q, cfg.m)?;
        let exact = brute_force_top(&model, q, 1);
        let hit = approx.neighbors.first().map(|t| &t.token) == exact.first().map(|t| &t.token);
        Ok((hit, approx.distance_evaluations))
    });
    let outcomes: Vec<(bool, usize)> = outcomes.into_iter().collect::<Result<_, IndexError>>()?;
    let k = outcomes.len().max(1) as f64;
    Ok(AnnBenchReport {
        config: cfg,
        recall_at_1: outcomes.iter().filter(|o| o.0).count() as f64 / k,
        mean_distance_evaluations: outcomes.iter().map(|o| o.1 as f64).sum::<f64>() / k,
        max_distance_evaluations: outcomes.iter().map(|o| o.1).max().unwrap_or(0),
        index_memory_bytes: index.memory_bytes(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bench_is_deterministic() {
        let cfg = AnnBenchConfig {
            n: 400,
            dim: 24,
            clusters: 10,
            queries: 20,
            ..AnnBenchConfig::default()
        };
        let a = ann_bench(cfg, Exec::Sequential).unwrap();
        let b = ann_bench(cfg, Exec::ParallelDefault).unwrap();
        assert_eq!(a, b);
        assert!(a.mean_distance_evaluations >= cfg.m as f64);
        assert!((0.0..=1.0).contains(&a.recall_at_1));
    }
}
