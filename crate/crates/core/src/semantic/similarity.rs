use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimilarityError {
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("zero-norm vector")]
    ZeroNorm,
}

/// Cosine similarity `1 - d(v, w)`, always within `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct SimilarityScore(f64);

impl SimilarityScore {
    pub const EXACT: SimilarityScore = SimilarityScore(1.0);

    pub fn new(value: f64) -> Self {
        SimilarityScore(value.clamp(-1.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Cosine distance, the complement of the similarity.
    pub fn distance(self) -> f64 {
        1.0 - self.0
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for SimilarityScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.0)
    }
}

pub fn dot(v: &[f64], w: &[f64]) -> f64 {
    v.iter().zip(w).map(|(a, b)| a * b).sum()
}

pub fn l2_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// `(v . w) / sqrt(|v|^2 |w|^2)` with precomputed squared norms; identical
/// vectors score exactly 1.
#[inline]
pub(crate) fn cosine_with_sq_norms(v: &[f64], w: &[f64], sqv: f64, sqw: f64) -> SimilarityScore {
    SimilarityScore::new(dot(v, w) / (sqv * sqw).sqrt())
}

pub fn cosine_similarity(v: &[f64], w: &[f64]) -> Result<SimilarityScore, SimilarityError> {
    if v.len() != w.len() {
        return Err(SimilarityError::Dimension(v.len(), w.len()));
    }
    let (sqv, sqw) = (dot(v, v), dot(w, w));
    if sqv == 0.0 || sqw == 0.0 {
        return Err(SimilarityError::ZeroNorm);
    }
    Ok(cosine_with_sq_norms(v, w, sqv, sqw))
}

/// Descending similarity, then ascending token.
pub fn rank_order(a: (&str, SimilarityScore), b: (&str, SimilarityScore)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identities() {
        let v = [1.0, 2.0, 3.0];
        assert_eq!(cosine_similarity(&v, &v).unwrap().value(), 1.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap().value(), 0.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[-1.0, 0.0]).unwrap().value(), -1.0);
    }

    #[test]
    fn errors() {
        assert_eq!(
            cosine_similarity(&[1.0], &[1.0, 2.0]),
            Err(SimilarityError::Dimension(1, 2))
        );
        assert_eq!(
            cosine_similarity(&[0.0, 0.0], &[1.0, 2.0]),
            Err(SimilarityError::ZeroNorm)
        );
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(
            v in prop::collection::vec(-10.0f64..10.0, 4),
            w in prop::collection::vec(-10.0f64..10.0, 4),
        ) {
            prop_assume!(l2_norm(&v) > 1e-6 && l2_norm(&w) > 1e-6);
            let a = cosine_similarity(&v, &w).unwrap().value();
            let b = cosine_similarity(&w, &v).unwrap().value();
            prop_assert_eq!(a, b);
            prop_assert!((-1.0..=1.0).contains(&a));
            prop_assert_eq!(cosine_similarity(&v, &v).unwrap().value(), 1.0);
        }
    }
}
