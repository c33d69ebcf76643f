//! LSH Forest over random signed hyperplanes.
//!
//! Each tree hashes every vector to a `max_key_length`-bit key (bit `i` is
//! the sign of the dot product with hyperplane `i`) and keeps the vocabulary
//! sorted by key. A query descends every tree to its longest matching key
//! prefix and takes that bucket, then widens the prefix one bit at a time
//! across all trees until enough distinct candidates have been gathered.
//! Only those candidates get an exact cosine evaluation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use super::model::EmbeddingModel;
use super::similarity::{dot, rank_order, SimilarityScore};
use super::matching::ScoredToken;
use crate::exec::Exec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error("cannot index an empty model")]
    EmptyModel,
    #[error("num_trees must be positive")]
    NoTrees,
    #[error("max_key_length must be within 1..=64, got {0}")]
    KeyLength(usize),
    #[error("query dimension {found} does not match index dimension {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("query vector has zero norm")]
    ZeroQuery,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LshParams {
    pub num_trees: usize,
    pub max_key_length: usize,
    pub seed: u64,
}

impl Default for LshParams {
    fn default() -> Self {
        Self {
            num_trees: 10,
            max_key_length: 32,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Tree {
    /// `max_key_length * dim` hyperplane coefficients, row per bit.
    planes: Vec<f64>,
    /// `(key, vocabulary id)` sorted ascending.
    keys: Vec<(u64, u32)>,
}

#[derive(Debug, Clone)]
pub struct LshForestIndex<'m> {
    model: &'m EmbeddingModel,
    params: LshParams,
    trees: Vec<Tree>,
}

/// Result of an approximate query.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnResult {
    pub neighbors: Vec<ScoredToken>,
    /// Exact cosine evaluations spent on this query.
    pub distance_evaluations: usize,
}

fn hash_key(planes: &[f64], dim: usize, key_len: usize, v: &[f64]) -> u64 {
    let mut key = 0u64;
    for bit in 0..key_len {
        let h = &planes[bit * dim..(bit + 1) * dim];
        key = (key << 1) | u64::from(dot(h, v) >= 0.0);
    }
    key
}

fn common_prefix(a: u64, b: u64, key_len: usize) -> usize {
    let diff = a ^ b;
    if diff == 0 {
        key_len
    } else {
        let highest = 63 - diff.leading_zeros() as usize;
        key_len - 1 - highest
    }
}

impl<'m> LshForestIndex<'m> {
    pub fn build(model: &'m EmbeddingModel, params: LshParams) -> Result<Self, IndexError> {
        Self::build_with(model, params, Exec::Sequential)
    }

    /// Builds the forest, hashing vocabulary rows with `exec`.
    pub fn build_with(
        model: &'m EmbeddingModel,
        params: LshParams,
        exec: Exec,
    ) -> Result<Self, IndexError> {
        if model.is_empty() {
            return Err(IndexError::EmptyModel);
        }
        if params.num_trees == 0 {
            return Err(IndexError::NoTrees);
        }
        if !(1..=64).contains(&params.max_key_length) {
            return Err(IndexError::KeyLength(params.max_key_length));
        }
        let dim = model.dim();
        let key_len = params.max_key_length;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let plane_sets: Vec<Vec<f64>> = (0..params.num_trees)
            .map(|_| {
                (0..key_len * dim)
                    .map(|_| StandardNormal.sample(&mut rng))
                    .collect()
            })
            .collect();

        let trees = plane_sets
            .into_iter()
            .map(|planes| {
                let mut keys: Vec<(u64, u32)> = exec.map_range(model.len(), |id| {
                    (hash_key(&planes, dim, key_len, model.vector(id)), id as u32)
                });
                keys.sort_unstable();
                Tree { planes, keys }
            })
            .collect();
        Ok(Self {
            model,
            params,
            trees,
        })
    }

    pub fn params(&self) -> LshParams {
        self.params
    }

    pub fn model(&self) -> &'m EmbeddingModel {
        self.model
    }

    /// Sorted `(key, id)` pairs of one tree.
    pub fn tree_keys(&self, tree: usize) -> &[(u64, u32)] {
        &self.trees[tree].keys
    }

    /// Approximate memory held by hyperplanes and key arrays.
    pub fn memory_bytes(&self) -> u64 {
        self.trees
            .iter()
            .map(|t| t.planes.len() * 8 + t.keys.len() * 16)
            .sum::<usize>() as u64
    }

    fn prefix_range(keys: &[(u64, u32)], query: u64, depth: usize, key_len: usize) -> &[(u64, u32)] {
        let shift = (key_len - depth) as u32;
        let lo = u128::from(query >> shift << shift);
        let hi = lo + (1u128 << shift);
        let start = keys.partition_point(|&(k, _)| u128::from(k) < lo);
        let end = keys.partition_point(|&(k, _)| u128::from(k) < hi);
        &keys[start..end]
    }

    pub fn query(&self, query: &[f64], m: usize) -> Result<AnnResult, IndexError> {
        let dim = self.model.dim();
        if query.len() != dim {
            return Err(IndexError::Dimension {
                expected: dim,
                found: query.len(),
            });
        }
        let query_sq = dot(query, query);
        if query_sq == 0.0 {
            return Err(IndexError::ZeroQuery);
        }
        let key_len = self.params.max_key_length;
        let m = m.max(1);

        let qkeys: Vec<u64> = self
            .trees
            .iter()
            .map(|t| hash_key(&t.planes, dim, key_len, query))
            .collect();
        let depths: Vec<usize> = self
            .trees
            .iter()
            .zip(&qkeys)
            .map(|(t, &q)| {
                let pos = t.keys.partition_point(|&(k, _)| k < q);
                let left = pos.checked_sub(1).map(|i| common_prefix(t.keys[i].0, q, key_len));
                let right = t.keys.get(pos).map(|&(k, _)| common_prefix(k, q, key_len));
                left.max(right).unwrap_or(0)
            })
            .collect();

        let mut seen = vec![false; self.model.len()];
        let mut candidates: Vec<u32> = Vec::new();
        let mut collect = |t: usize, depth: usize, candidates: &mut Vec<u32>| {
            for &(_, id) in Self::prefix_range(&self.trees[t].keys, qkeys[t], depth, key_len) {
                if !seen[id as usize] {
                    seen[id as usize] = true;
                    candidates.push(id);
                }
            }
        };
        // Every tree contributes its deepest bucket, then all trees widen
        // together one bit at a time.
        for (t, &d) in depths.iter().enumerate() {
            collect(t, d, &mut candidates);
        }
        let mut depth = depths.iter().copied().max().unwrap_or(0);
        while candidates.len() < m && depth > 0 {
            depth -= 1;
            for (t, &d) in depths.iter().enumerate() {
                if d > depth {
                    collect(t, depth, &mut candidates);
                }
            }
        }

        let mut scored: Vec<(&str, SimilarityScore)> = candidates
            .iter()
            .map(|&id| {
                let id = id as usize;
                (self.model.token(id), self.model.similarity_to(query, query_sq, id))
            })
            .collect();
        let distance_evaluations = scored.len();
        scored.sort_by(|a, b| rank_order(*a, *b));
        scored.truncate(m);
        Ok(AnnResult {
            neighbors: scored
                .into_iter()
                .map(|(t, score)| ScoredToken {
                    token: t.to_string(),
                    score,
                })
                .collect(),
            distance_evaluations,
        })
    }
}

/// Exhaustive top-`m` ranking with the same tie rule as the index.
pub fn brute_force_top(model: &EmbeddingModel, query: &[f64], m: usize) -> Vec<ScoredToken> {
    let query_sq = dot(query, query);
    let mut scored: Vec<(&str, SimilarityScore)> = (0..model.len())
        .map(|id| (model.token(id), model.similarity_to(query, query_sq, id)))
        .collect();
    scored.sort_by(|a, b| rank_order(*a, *b));
    scored.truncate(m);
    scored
        .into_iter()
        .map(|(t, score)| ScoredToken {
            token: t.to_string(),
            score,
        })
        .collect()
}
