use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;

use super::lookup::{FuzzyQuery, LookupStats};
use super::packet::Data;
use crate::names::Name;
use crate::semantic::{EmbeddingModel, SimilarityScore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CachePolicy {
    Lru,
    Fifo,
    /// Evict the stored entry most similar to the incoming one.
    Semantic,
}

impl FromStr for CachePolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "lru" => Ok(Self::Lru),
            "fifo" => Ok(Self::Fifo),
            "semantic" => Ok(Self::Semantic),
            _ => Err(format!("unknown cache policy {s:?} (expected lru, fifo or semantic)")),
        }
    }
}

impl fmt::Display for CachePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lru => "lru",
            Self::Fifo => "fifo",
            Self::Semantic => "semantic",
        })
    }
}

#[derive(Debug, Clone)]
struct Slot {
    data: Data,
    last_used: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsHit {
    pub data: Data,
    pub score: SimilarityScore,
    pub exact: bool,
}

/// Content store keyed by the unmarked Data name. Map order is insertion
/// order, which is the FIFO order and the fuzzy scan order.
#[derive(Debug, Clone)]
pub struct ContentStore {
    capacity: usize,
    policy: CachePolicy,
    entries: IndexMap<Name, Slot>,
    clock: u64,
}

impl ContentStore {
    pub fn new(capacity: usize, policy: CachePolicy) -> Self {
        Self {
            capacity,
            policy,
            entries: IndexMap::new(),
            clock: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn policy(&self) -> CachePolicy {
        self.policy
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.entries.contains_key(&name.without_marker())
    }

    /// Stored Data in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &Data> {
        self.entries.values().map(|s| &s.data)
    }

    fn tick(&mut self) -> u64 {
        self.clock += 1;
        self.clock
    }

    /// Exact full-name match first; with `fuzzy`, then the best of the first
    /// `max_matches` stored names that extend the Interest's exact prefix,
    /// agree on the suffix, and reach `tau` at the fuzzy depth.
    pub fn lookup(
        &mut self,
        name: &Name,
        fuzzy: bool,
        tau: f64,
        max_matches: usize,
        model: &EmbeddingModel,
        stats: &mut LookupStats,
    ) -> Option<CsHit> {
        let key = name.without_marker();
        let now = self.tick();
        if let Some(slot) = self.entries.get_mut(&key) {
            slot.last_used = now;
            return Some(CsHit {
                data: slot.data.clone(),
                score: SimilarityScore::EXACT,
                exact: true,
            });
        }
        if !fuzzy || max_matches == 0 {
            return None;
        }
        let query = FuzzyQuery::new(name, model)?;
        let mut best: Option<(usize, SimilarityScore)> = None;
        let mut qualified = 0;
        for (i, stored) in self.entries.keys().enumerate() {
            let comps = stored.components();
            if comps.len() != query.depth + 1 + query.suffix.len() || comps[query.depth + 1..] != *query.suffix {
                continue;
            }
            let Some(score) = query.compare(comps, model, stats) else {
                continue;
            };
            if score.value() < tau {
                continue;
            }
            qualified += 1;
            if best.is_none_or(|(_, b)| score.value() > b.value()) {
                best = Some((i, score));
            }
            if qualified >= max_matches {
                break;
            }
        }
        stats.qualified += qualified;
        let (i, score) = best?;
        let (_, slot) = self.entries.get_index_mut(i).expect("index from scan");
        slot.last_used = now;
        Some(CsHit {
            data: slot.data.clone(),
            score,
            exact: false,
        })
    }

    /// Caches `data`, returning whatever had to make room for it.
    pub fn insert(&mut self, data: Data, model: &EmbeddingModel) -> Option<Data> {
        if self.capacity == 0 {
            return None;
        }
        let key = data.name.without_marker();
        let now = self.tick();
        if let Some(slot) = self.entries.get_mut(&key) {
            slot.data = data;
            slot.last_used = now;
            return None;
        }
        let evicted = if self.entries.len() >= self.capacity {
            let victim = self.victim(&data, model);
            self.entries.shift_remove_index(victim).map(|(_, s)| s.data)
        } else {
            None
        };
        self.entries.insert(key, Slot { data, last_used: now });
        evicted
    }

    fn lru_index(&self) -> usize {
        self.entries
            .values()
            .enumerate()
            .min_by_key(|(_, s)| s.last_used)
            .map(|(i, _)| i)
            .expect("non-empty store")
    }

    fn victim(&self, incoming: &Data, model: &EmbeddingModel) -> usize {
        match self.policy {
            CachePolicy::Fifo => 0,
            CachePolicy::Lru => self.lru_index(),
            CachePolicy::Semantic => self.semantic_victim(incoming, model).unwrap_or_else(|| self.lru_index()),
        }
    }

    fn semantic_victim(&self, incoming: &Data, model: &EmbeddingModel) -> Option<usize> {
        let depth = incoming.name.fuzzy_index()?;
        let id = model.id_of(incoming.name.component(depth)?)?;
        let mut best: Option<(usize, f64, u64)> = None;
        for (i, slot) in self.entries.values().enumerate() {
            if slot.data.name.fuzzy_index() != Some(depth) {
                continue;
            }
            let Some(other) = slot.data.name.component(depth).and_then(|t| model.id_of(t)) else {
                continue;
            };
            let s = model.similarity_ids(id, other).value();
            let better = match best {
                None => true,
                Some((_, bs, bu)) => s > bs || (s == bs && slot.last_used < bu),
            };
            if better {
                best = Some((i, s, slot.last_used));
            }
        }
        best.map(|(i, _, _)| i)
    }
}
