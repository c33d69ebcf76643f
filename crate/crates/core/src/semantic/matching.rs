//! Best-Match and Qualified-Matches selection over a candidate token set.
//!
//! Candidates are scanned in lexicographic order. Equal strings always
//! match with similarity 1; otherwise both tokens must be in the model.

use std::collections::BTreeSet;

use super::model::EmbeddingModel;
use super::similarity::{rank_order, SimilarityScore};

/// A candidate token with its similarity to the query.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredToken {
    pub token: String,
    pub score: SimilarityScore,
}

fn scan_order<'a, I>(candidates: I) -> BTreeSet<&'a str>
where
    I: IntoIterator<Item = &'a str>,
{
    candidates.into_iter().collect()
}

/// Candidate with maximum similarity; ties go to the lexicographically
/// smallest token.
pub fn best_match<'a, I>(query: &str, candidates: I, model: &EmbeddingModel) -> Option<ScoredToken>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut best: Option<(&str, SimilarityScore)> = None;
    for cand in scan_order(candidates) {
        let Some(score) = model.similarity(query, cand) else {
            continue;
        };
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((cand, score));
        }
        if score == SimilarityScore::EXACT && cand == query {
            break;
        }
    }
    best.map(|(t, score)| ScoredToken {
        token: t.to_string(),
        score,
    })
}

/// Up to `k` candidates with similarity at least `tau`, sorted by descending
/// similarity then ascending token. The scan stops as soon as `k`
/// candidates have qualified.
pub fn qualified_matches<'a, I>(
    query: &str,
    candidates: I,
    tau: f64,
    k: usize,
    model: &EmbeddingModel,
) -> Vec<ScoredToken>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut found: Vec<(&str, SimilarityScore)> = Vec::new();
    if k == 0 {
        return Vec::new();
    }
    for cand in scan_order(candidates) {
        let Some(score) = model.similarity(query, cand) else {
            continue;
        };
        if score.value() >= tau {
            found.push((cand, score));
            if found.len() == k {
                break;
            }
        }
    }
    found.sort_by(|a, b| rank_order(*a, *b));
    found
        .into_iter()
        .map(|(t, score)| ScoredToken {
            token: t.to_string(),
            score,
        })
        .collect()
}
