use crate::names::Name;
use crate::semantic::{EmbeddingModel, SimilarityScore};

/// Work done by one lookup.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LookupStats {
    /// Candidates that passed the threshold; this is what consumes the match budget.
    pub qualified: usize,
    /// Cosine evaluations actually computed.
    pub evaluations: u64,
}

/// The fuzzy side of an Interest name, resolved once per lookup.
pub(crate) struct FuzzyQuery<'a> {
    pub exact_prefix: &'a [String],
    pub token: &'a str,
    pub suffix: &'a [String],
    pub token_id: Option<usize>,
    pub depth: usize,
}

impl<'a> FuzzyQuery<'a> {
    pub fn new(name: &'a Name, model: &EmbeddingModel) -> Option<Self> {
        let split = name.split_fuzzy();
        let token = split.fuzzy_component?;
        Some(Self {
            exact_prefix: split.exact_prefix,
            token,
            suffix: split.suffix,
            token_id: model.id_of(token),
            depth: split.exact_prefix.len(),
        })
    }

    /// Similarity of `candidate`'s component at the fuzzy depth, if the
    /// candidate extends the exact prefix. Identical tokens score 1 even when
    /// out of vocabulary; otherwise both tokens must be known.
    pub fn compare(&self, candidate: &[String], model: &EmbeddingModel, stats: &mut LookupStats) -> Option<SimilarityScore> {
        if candidate.len() <= self.depth || candidate[..self.depth] != *self.exact_prefix {
            return None;
        }
        let other = candidate[self.depth].as_str();
        if other == self.token {
            return Some(SimilarityScore::EXACT);
        }
        let q = self.token_id?;
        let o = model.id_of(other)?;
        stats.evaluations += 1;
        Some(model.similarity_ids(q, o))
    }
}
