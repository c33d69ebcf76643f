use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::cs::{CachePolicy, ContentStore, CsHit};
use super::fib::Fib;
use super::lookup::LookupStats;
use super::packet::{Data, FaceId, Interest, InterestDigest, Packet};
use super::pit::{Pit, PitInsert};
use crate::semantic::{EmbeddingModel, SimilarityScore};
use crate::time::{SimDuration, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Fuzzy Interest Forwarding.
    Fif,
    /// Exact Matching Forwarding.
    Emf,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fif" => Ok(Self::Fif),
            "emf" => Ok(Self::Emf),
            _ => Err(format!("unknown mode {s:?} (expected fif or emf)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fif => "FIF",
            Self::Emf => "EMF",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwarderConfig {
    pub mode: Mode,
    pub tau: f64,
    pub max_matches: usize,
    pub cs_capacity: usize,
    pub cs_policy: CachePolicy,
    pub pit_lifetime: SimDuration,
    /// Hold fuzzy CS hits for locally originated Interests this long.
    pub wait: Option<SimDuration>,
}

impl Default for ForwarderConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Fif,
            tau: 0.4,
            max_matches: 50,
            cs_capacity: 100,
            cs_policy: CachePolicy::Lru,
            pit_lifetime: SimDuration::from_secs(4),
            wait: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeCounters {
    pub interests_received: u64,
    pub cs_exact_hits: u64,
    pub cs_fuzzy_hits: u64,
    pub aggregated: u64,
    pub attached_forwards: u64,
    pub fib_exact_forwards: u64,
    pub fib_fuzzy_forwards: u64,
    pub drops_no_route: u64,
    pub drops_hop_limit: u64,
    pub drops_duplicate: u64,
    pub unsolicited_data: u64,
    pub data_sent: u64,
    pub waits_started: u64,
    pub waits_finished: u64,
    pub waits_improved: u64,
    pub wait_improvement_sum: f64,
    pub distance_evaluations: u64,
}

impl NodeCounters {
    pub fn drops(&self) -> u64 {
        self.drops_no_route + self.drops_hop_limit + self.drops_duplicate
    }

    pub fn absorb(&mut self, o: &NodeCounters) {
        self.interests_received += o.interests_received;
        self.cs_exact_hits += o.cs_exact_hits;
        self.cs_fuzzy_hits += o.cs_fuzzy_hits;
        self.aggregated += o.aggregated;
        self.attached_forwards += o.attached_forwards;
        self.fib_exact_forwards += o.fib_exact_forwards;
        self.fib_fuzzy_forwards += o.fib_fuzzy_forwards;
        self.drops_no_route += o.drops_no_route;
        self.drops_hop_limit += o.drops_hop_limit;
        self.drops_duplicate += o.drops_duplicate;
        self.unsolicited_data += o.unsolicited_data;
        self.data_sent += o.data_sent;
        self.waits_started += o.waits_started;
        self.waits_finished += o.waits_finished;
        self.waits_improved += o.waits_improved;
        self.wait_improvement_sum += o.wait_improvement_sum;
        self.distance_evaluations += o.distance_evaluations;
    }
}

/// What the node asks its host to do.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Send { face: FaceId, packet: Packet },
    /// Call [`Forwarder::wait_expired`] with `id` at `at`.
    ScheduleWait { id: u64, at: SimTime },
}

#[derive(Debug, Clone)]
struct PendingWait {
    interest: Interest,
    initial: Data,
    initial_score: SimilarityScore,
}

/// Forwarding state of one node.
#[derive(Debug, Clone)]
pub struct Forwarder {
    pub config: ForwarderConfig,
    pub cs: ContentStore,
    pub pit: Pit,
    pub fib: Fib,
    pub counters: NodeCounters,
    waits: BTreeMap<u64, PendingWait>,
    next_wait: u64,
}

impl Forwarder {
    pub fn new(config: ForwarderConfig) -> Self {
        Self {
            cs: ContentStore::new(config.cs_capacity, config.cs_policy),
            pit: Pit::new(config.pit_lifetime),
            fib: Fib::new(),
            counters: NodeCounters::default(),
            waits: BTreeMap::new(),
            next_wait: 0,
            config,
        }
    }

    pub fn pending_waits(&self) -> usize {
        self.waits.len()
    }

    fn reply(&mut self, face: FaceId, data: &Data, digest: InterestDigest) -> Action {
        self.counters.data_sent += 1;
        Action::Send {
            face,
            packet: Packet::Data(Data {
                in_reply_to: digest,
                ..data.clone()
            }),
        }
    }

    fn cs_lookup(&mut self, interest: &Interest, model: &EmbeddingModel) -> (Option<CsHit>, LookupStats) {
        let fuzzy = self.config.mode == Mode::Fif && interest.name().fuzzy_index().is_some();
        let mut stats = LookupStats::default();
        let hit = self.cs.lookup(
            interest.name(),
            fuzzy,
            self.config.tau,
            self.config.max_matches,
            model,
            &mut stats,
        );
        self.counters.distance_evaluations += stats.evaluations;
        (hit, stats)
    }

    pub fn process_interest(
        &mut self,
        interest: Interest,
        ingress: FaceId,
        now: SimTime,
        model: &EmbeddingModel,
    ) -> Vec<Action> {
        self.counters.interests_received += 1;
        if interest.hop_limit == 0 {
            self.counters.drops_hop_limit += 1;
            return Vec::new();
        }
        let fif = self.config.mode == Mode::Fif;

        let (hit, stats) = self.cs_lookup(&interest, model);
        if let Some(hit) = hit {
            if !hit.exact && ingress.is_app() {
                if let Some(wait) = self.config.wait {
                    return self.start_wait(interest, hit, ingress, now + wait, now);
                }
            }
            if hit.exact {
                self.counters.cs_exact_hits += 1;
            } else {
                self.counters.cs_fuzzy_hits += 1;
            }
            return vec![self.reply(ingress, &hit.data, interest.digest())];
        }

        match self.pit.insert(&interest, ingress, now) {
            PitInsert::Duplicate => {
                self.counters.drops_duplicate += 1;
                return Vec::new();
            }
            PitInsert::Aggregated => {
                self.counters.aggregated += 1;
                return Vec::new();
            }
            PitInsert::Created => {}
        }

        let mut out = interest.clone();
        out.hop_limit -= 1;
        let attached = if fif {
            interest.attached_match.as_ref().and_then(|a| self.fib.find(a))
        } else {
            None
        };
        let face = if let Some(e) = attached {
            self.counters.attached_forwards += 1;
            Some(e.face)
        } else if let Some(e) = self.fib.lookup_exact(interest.name()) {
            self.counters.fib_exact_forwards += 1;
            Some(e.face)
        } else if fif {
            let budget = self.config.max_matches.saturating_sub(stats.qualified);
            let mut fs = LookupStats::default();
            let hit = self
                .fib
                .lookup_fuzzy(interest.name(), self.config.tau, budget, model, &mut fs)
                .map(|h| (h.entry.face, h.entry.prefix.clone()));
            self.counters.distance_evaluations += fs.evaluations;
            hit.map(|(face, prefix)| {
                self.counters.fib_fuzzy_forwards += 1;
                out.attached_match = Some(prefix);
                face
            })
        } else {
            None
        };

        match face {
            Some(face) => vec![Action::Send {
                face,
                packet: Packet::Interest(out),
            }],
            None => {
                self.pit.remove(&interest.digest());
                self.counters.drops_no_route += 1;
                Vec::new()
            }
        }
    }

    fn start_wait(&mut self, interest: Interest, hit: CsHit, ingress: FaceId, at: SimTime, now: SimTime) -> Vec<Action> {
        match self.pit.insert(&interest, ingress, now) {
            PitInsert::Duplicate => {
                self.counters.drops_duplicate += 1;
                Vec::new()
            }
            PitInsert::Aggregated => {
                self.counters.aggregated += 1;
                Vec::new()
            }
            PitInsert::Created => {
                let id = self.next_wait;
                self.next_wait += 1;
                self.counters.waits_started += 1;
                self.waits.insert(
                    id,
                    PendingWait {
                        interest,
                        initial: hit.data,
                        initial_score: hit.score,
                    },
                );
                vec![Action::ScheduleWait { id, at }]
            }
        }
    }

    /// Re-runs the CS lookup for a held Interest and answers with the better
    /// of the initial and the current match.
    pub fn wait_expired(&mut self, id: u64, now: SimTime, model: &EmbeddingModel) -> Vec<Action> {
        let Some(w) = self.waits.remove(&id) else {
            return Vec::new();
        };
        let Some(entry) = self.pit.take(&w.interest.digest(), now) else {
            return Vec::new();
        };
        self.counters.waits_finished += 1;
        let (again, _) = self.cs_lookup(&w.interest, model);
        let (data, exact) = match again {
            Some(h) if h.score.value() > w.initial_score.value() => {
                self.counters.waits_improved += 1;
                self.counters.wait_improvement_sum += h.score.value() - w.initial_score.value();
                (h.data, h.exact)
            }
            _ => (w.initial, false),
        };
        if exact {
            self.counters.cs_exact_hits += 1;
        } else {
            self.counters.cs_fuzzy_hits += 1;
        }
        entry
            .downstream
            .iter()
            .map(|d| self.reply(d.face, &data, d.digest))
            .collect()
    }

    pub fn process_data(&mut self, data: Data, _ingress: FaceId, now: SimTime, model: &EmbeddingModel) -> Vec<Action> {
        let Some(entry) = self.pit.take(&data.in_reply_to, now) else {
            self.counters.unsolicited_data += 1;
            return Vec::new();
        };
        let actions = entry
            .downstream
            .iter()
            .map(|d| self.reply(d.face, &data, d.digest))
            .collect();
        self.cs.insert(data, model);
        actions
    }

    pub fn sweep(&mut self, now: SimTime) -> usize {
        self.pit.sweep(now)
    }
}
