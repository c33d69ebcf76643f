use super::lookup::{FuzzyQuery, LookupStats};
use super::packet::FaceId;
use crate::names::Name;
use crate::semantic::{EmbeddingModel, SimilarityScore};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibEntry {
    pub prefix: Name,
    pub face: FaceId,
    pub seq: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyFibHit<'a> {
    pub entry: &'a FibEntry,
    pub score: SimilarityScore,
}

/// Prefix table kept in insertion order.
#[derive(Debug, Clone, Default)]
pub struct Fib {
    entries: Vec<FibEntry>,
    next_seq: u64,
}

impl Fib {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `(prefix, face)` unless already present. The stored prefix
    /// carries no fuzzy marker.
    pub fn insert(&mut self, prefix: &Name, face: FaceId) -> bool {
        let prefix = prefix.without_marker();
        if self.entries.iter().any(|e| e.face == face && e.prefix == prefix) {
            return false;
        }
        self.entries.push(FibEntry {
            prefix,
            face,
            seq: self.next_seq,
        });
        self.next_seq += 1;
        true
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FibEntry] {
        &self.entries
    }

    /// Longest-prefix match; equal lengths go to the earliest entry.
    pub fn lookup_exact(&self, name: &Name) -> Option<&FibEntry> {
        let mut best: Option<&FibEntry> = None;
        for e in &self.entries {
            if e.prefix.is_prefix_of(name) && best.is_none_or(|b| e.prefix.len() > b.prefix.len()) {
                best = Some(e);
            }
        }
        best
    }

    /// Earliest entry whose prefix is exactly `name`.
    pub fn find(&self, name: &Name) -> Option<&FibEntry> {
        self.entries.iter().find(|e| e.prefix.same_components(name))
    }

    /// Scans in insertion order, stops once `max_matches` entries qualified,
    /// and returns the most similar of them (earliest on ties).
    pub fn lookup_fuzzy(
        &self,
        name: &Name,
        tau: f64,
        max_matches: usize,
        model: &EmbeddingModel,
        stats: &mut LookupStats,
    ) -> Option<FuzzyFibHit<'_>> {
        let query = FuzzyQuery::new(name, model)?;
        let mut best: Option<FuzzyFibHit<'_>> = None;
        let mut qualified = 0;
        if max_matches == 0 {
            return None;
        }
        for e in &self.entries {
            let Some(score) = query.compare(e.prefix.components(), model, stats) else {
                continue;
            };
            if score.value() < tau {
                continue;
            }
            qualified += 1;
            if best.as_ref().is_none_or(|b| score.value() > b.score.value()) {
                best = Some(FuzzyFibHit { entry: e, score });
            }
            if qualified >= max_matches {
                break;
            }
        }
        stats.qualified += qualified;
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forwarder::testutil::animal_model;

    fn n(s: &str) -> Name {
        Name::parse(s).unwrap()
    }

    #[test]
    fn longest_prefix_match() {
        let mut fib = Fib::new();
        fib.insert(&n("/a"), FaceId(1));
        fib.insert(&n("/a/b"), FaceId(2));
        assert_eq!(fib.lookup_exact(&n("/a/b/c")).unwrap().prefix, n("/a/b"));
        assert!(fib.lookup_exact(&n("/y")).is_none());

        let mut fib = Fib::new();
        fib.insert(&n("/x"), FaceId(1));
        assert!(fib.lookup_exact(&n("/y")).is_none());
    }

    #[test]
    fn tie_goes_to_first_inserted() {
        let mut fib = Fib::new();
        fib.insert(&n("/a/b"), FaceId(1));
        fib.insert(&n("/a/b"), FaceId(2));
        assert!(!fib.insert(&n("/a/b"), FaceId(1)));
        assert_eq!(fib.len(), 2);
        assert_eq!(fib.lookup_exact(&n("/a/b")).unwrap().face, FaceId(1));
    }

    #[test]
    fn exact_lookup_ignores_marker() {
        let mut fib = Fib::new();
        fib.insert(&n("/p/dog"), FaceId(3));
        assert_eq!(fib.lookup_exact(&n("/p/~dog/info")).unwrap().face, FaceId(3));
    }

    fn cat_hound_fib() -> Fib {
        let mut fib = Fib::new();
        fib.insert(&n("/p/cat"), FaceId(1));
        fib.insert(&n("/p/hound"), FaceId(2));
        fib.insert(&n("/q/dog"), FaceId(3));
        fib
    }

    #[test]
    fn fuzzy_picks_most_similar_within_budget() {
        let model = animal_model();
        let fib = cat_hound_fib();
        let mut stats = LookupStats::default();
        let hit = fib.lookup_fuzzy(&n("/p/~dog"), 0.4, 50, &model, &mut stats).unwrap();
        assert_eq!(hit.entry.prefix, n("/p/hound"));
        assert!((hit.score.value() - 0.61).abs() < 0.01);
        assert_eq!(stats.qualified, 2);
        assert_eq!(stats.evaluations, 2);
    }

    #[test]
    fn budget_of_one_takes_first_qualifier() {
        let model = animal_model();
        let fib = cat_hound_fib();
        let mut stats = LookupStats::default();
        let hit = fib.lookup_fuzzy(&n("/p/~dog"), 0.4, 1, &model, &mut stats).unwrap();
        assert_eq!(hit.entry.prefix, n("/p/cat"));
        assert_eq!(stats.qualified, 1);
    }

    #[test]
    fn fuzzy_respects_threshold_and_prefix() {
        let model = animal_model();
        let fib = cat_hound_fib();
        let mut stats = LookupStats::default();
        assert!(fib.lookup_fuzzy(&n("/p/~dog"), 0.99, 50, &model, &mut stats).is_none());
        // Exact prefix /r matches nothing; /q/dog is exact-token and scores 1.
        assert!(fib.lookup_fuzzy(&n("/r/~dog"), -1.0, 50, &model, &mut stats).is_none());
        let hit = fib.lookup_fuzzy(&n("/q/~dog"), 0.99, 50, &model, &mut stats).unwrap();
        assert_eq!(hit.score, SimilarityScore::EXACT);
        // Entries no longer than the exact prefix are never candidates.
        let mut short = Fib::new();
        short.insert(&n("/p"), FaceId(1));
        assert!(short.lookup_fuzzy(&n("/p/~dog"), -1.0, 50, &model, &mut stats).is_none());
        // Out-of-vocabulary query token only matches identical strings.
        assert!(fib.lookup_fuzzy(&n("/p/~zebra"), -1.0, 50, &model, &mut stats).is_none());
    }
}
