//! Vector-space semantic matching: word-vector models, cosine similarity,
//! Best-Match / Qualified-Matches selection and LSH Forest lookup.

mod lsh;
mod matching;
mod model;
mod similarity;
pub mod synthetic;

pub use lsh::{brute_force_top, AnnResult, IndexError, LshForestIndex, LshParams};
pub use matching::{best_match, qualified_matches, ScoredToken};
pub use model::{EmbeddingModel, ModelError};
pub use similarity::{cosine_similarity, dot, l2_norm, rank_order, SimilarityError, SimilarityScore};
