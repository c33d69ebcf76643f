#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::PathBuf;

use fif_core::forwarder::{
    Action, CachePolicy, Data, FaceId, Forwarder, ForwarderConfig, Interest, InterestDigest, Mode, Packet,
};
use fif_core::names::Name;
use fif_core::semantic::EmbeddingModel;
use fif_core::simcore::{EventKind, EventQueue};
use fif_core::time::{SimDuration, SimTime};
use proptest::prelude::*;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn bundled_model() -> EmbeddingModel {
    EmbeddingModel::load(data_dir().join("model-500x50.txt")).expect("bundled model")
}

/// Cosine computed from scratch: dot over the product of norms.
pub fn oracle_cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut ab = 0.0;
    let mut aa = 0.0;
    let mut bb = 0.0;
    for (x, y) in a.iter().zip(b) {
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    ab / (aa.sqrt() * bb.sqrt())
}

fn oracle_score(model: &EmbeddingModel, q: &str, c: &str) -> Option<f64> {
    if q == c {
        return Some(1.0);
    }
    Some(oracle_cosine(model.vector_of(q)?, model.vector_of(c)?))
}

fn oracle_rank(mut v: Vec<(String, f64)>) -> Vec<(String, f64)> {
    v.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    v
}

/// Exhaustive best match: highest score, smallest token on ties.
pub fn oracle_best(model: &EmbeddingModel, q: &str, cands: &[&str]) -> Option<(String, f64)> {
    let set: BTreeSet<&str> = cands.iter().copied().collect();
    let scored = set
        .into_iter()
        .filter_map(|c| oracle_score(model, q, c).map(|s| (c.to_string(), s)))
        .collect();
    oracle_rank(scored).into_iter().next()
}

/// First `k` qualifiers in lexicographic scan order, then ranked.
pub fn oracle_qualified(model: &EmbeddingModel, q: &str, cands: &[&str], tau: f64, k: usize) -> Vec<(String, f64)> {
    let set: BTreeSet<&str> = cands.iter().copied().collect();
    let found = set
        .into_iter()
        .filter_map(|c| oracle_score(model, q, c).map(|s| (c.to_string(), s)))
        .filter(|(_, s)| *s >= tau)
        .take(k)
        .collect();
    oracle_rank(found)
}

/// Brute-force top-`m` over a free query vector.
pub fn oracle_top(model: &EmbeddingModel, q: &[f64], m: usize) -> Vec<(String, f64)> {
    let all = (0..model.len())
        .map(|i| (model.token(i).to_string(), oracle_cosine(q, model.vector(i))))
        .collect();
    let mut ranked = oracle_rank(all);
    ranked.truncate(m);
    ranked
}

/// One randomized forwarding scenario on a small connected graph.
#[derive(Debug, Clone)]
pub struct MicroCase {
    pub nodes: usize,
    /// Parent of node `i + 1` in a random spanning tree.
    pub tree: Vec<usize>,
    pub extra_links: Vec<(usize, usize)>,
    pub delays_ms: Vec<u64>,
    pub producer: usize,
    pub mode: Mode,
    pub tau: f64,
    pub max_matches: usize,
    pub cs_capacity: usize,
    pub policy: CachePolicy,
    pub wait_ms: Option<u64>,
    pub vectors: Vec<[f64; 3]>,
    pub fib_tokens: Vec<usize>,
    /// `(time ms, node, token, nonce)`; small nonce ranges force duplicates.
    pub requests: Vec<(u64, usize, usize, u64)>,
    pub hop_limit: u8,
}

const VOCAB: usize = 6;

pub fn micro_case() -> impl Strategy<Value = MicroCase> {
    (2usize..=5)
        .prop_flat_map(|n| {
            let tree = (1..n).map(|i| 0..i).collect::<Vec<_>>();
            (
                Just(n),
                tree,
                prop::collection::vec((0..n, 0..n), 0..3),
                prop::collection::vec(1u64..20, 16),
                0..n,
                prop_oneof![Just(Mode::Fif), Just(Mode::Emf)],
                prop_oneof![Just(-1.0), Just(0.0), Just(0.5), Just(0.9)],
                1usize..4,
                0usize..4,
                prop_oneof![Just(CachePolicy::Lru), Just(CachePolicy::Fifo), Just(CachePolicy::Semantic)],
                prop::option::of(5u64..80),
            )
        })
        .prop_flat_map(|(n, tree, extra, delays, producer, mode, tau, mm, cap, policy, wait)| {
            (
                Just((n, tree, extra, delays, producer, mode, tau, mm, cap, policy, wait)),
                prop::collection::vec(prop::array::uniform3(-1.0f64..1.0), VOCAB),
                prop::collection::vec(0..VOCAB, 0..4),
                prop::collection::vec((0u64..300, 0..n, 0..VOCAB, 0u64..3), 1..25),
                1u8..6,
            )
        })
        .prop_map(
            |((nodes, tree, extra_links, delays_ms, producer, mode, tau, max_matches, cs_capacity, policy, wait_ms), vectors, fib_tokens, requests, hop_limit)| {
                MicroCase {
                    nodes,
                    tree,
                    extra_links,
                    delays_ms,
                    producer,
                    mode,
                    tau,
                    max_matches,
                    cs_capacity,
                    policy,
                    wait_ms,
                    vectors,
                    fib_tokens,
                    requests,
                    hop_limit,
                }
            },
        )
}

fn token(i: usize) -> String {
    format!("w{i}")
}

impl MicroCase {
    fn links(&self) -> Vec<(usize, usize, u64)> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let pairs = self.tree.iter().enumerate().map(|(i, &p)| (i + 1, p)).chain(self.extra_links.iter().copied());
        for (k, (a, b)) in pairs.enumerate() {
            if a != b && seen.insert((a.min(b), a.max(b))) {
                out.push((a, b, self.delays_ms[k % self.delays_ms.len()]));
            }
        }
        out
    }

    fn model(&self) -> EmbeddingModel {
        // A zero vector would be rejected; nudge it.
        let entries = self.vectors.iter().enumerate().map(|(i, v)| {
            let mut v = v.to_vec();
            if v.iter().all(|x| *x == 0.0) {
                v[0] = 1.0;
            }
            (token(i), v)
        });
        EmbeddingModel::from_entries(3, entries).unwrap()
    }
}

/// Counts of what happened in a checked run.
#[derive(Debug, Default, Clone)]
pub struct MicroReport {
    pub interests: usize,
    pub data_delivered: usize,
    pub aggregated: u64,
}

/// Runs the case with real forwarders and checks the table invariants after
/// every event.
pub fn check_micro(case: &MicroCase) -> Result<MicroReport, String> {
    let model = case.model();
    let n = case.nodes;
    let links = case.links();
    let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
    for &(a, b, d) in &links {
        adj[a].push((b, d));
        adj[b].push((a, d));
    }
    // Hop-count next hop toward the producer.
    let mut next_hop = vec![None; n];
    let mut frontier = vec![case.producer];
    let mut visited = vec![false; n];
    visited[case.producer] = true;
    while let Some(u) = frontier.pop() {
        for &(v, _) in &adj[u] {
            if !visited[v] {
                visited[v] = true;
                next_hop[v] = Some(u);
                frontier.insert(0, v);
            }
        }
    }

    let prefix = Name::parse("/p").unwrap();
    let mut nodes: Vec<Forwarder> = (0..n)
        .map(|i| {
            let mut f = Forwarder::new(ForwarderConfig {
                mode: case.mode,
                tau: case.tau,
                max_matches: case.max_matches,
                cs_capacity: case.cs_capacity,
                cs_policy: case.policy,
                pit_lifetime: SimDuration::from_millis(150),
                wait: case.wait_ms.map(SimDuration::from_millis),
            });
            let face = next_hop[i].map_or(FaceId::APP, |h| FaceId(h as u32));
            for &t in &case.fib_tokens {
                f.fib.insert(&prefix.join(&[token(t)]).unwrap(), face);
            }
            f
        })
        .collect();

    let delay = |a: usize, b: usize| adj[a].iter().find(|(v, _)| *v == b).map(|(_, d)| *d).unwrap();
    let mut queue = EventQueue::new();
    let mut pending: Vec<Interest> = Vec::new();
    let mut names: HashMap<InterestDigest, Name> = HashMap::new();
    for &(t, node, tok, nonce) in &case.requests {
        let name = Name::new(["p".to_string(), token(tok)], Some(1)).unwrap();
        let interest = Interest::new(name, nonce, case.hop_limit);
        queue.push(
            SimTime(t * 1000),
            EventKind::Arrival {
                node,
                face: FaceId::APP,
                packet: Packet::Interest(interest.clone()),
            },
        );
        pending.push(interest);
    }

    // Interests received per (node, face), Data sent per (node, face).
    let mut received: HashMap<(usize, FaceId, InterestDigest), usize> = HashMap::new();
    let mut replied: HashMap<(usize, FaceId, InterestDigest), usize> = HashMap::new();
    let mut report = MicroReport {
        interests: pending.len(),
        ..MicroReport::default()
    };

    while let Some(ev) = queue.pop() {
        let now = ev.time;
        let (node, actions, expected): (usize, Vec<Action>, Option<BTreeSet<(FaceId, InterestDigest)>>) = match ev.kind {
            EventKind::Arrival { node, face, packet } => match packet {
                Packet::Interest(i) => {
                    names.insert(i.digest(), i.name().clone());
                    *received.entry((node, face, i.digest())).or_default() += 1;
                    let a = nodes[node].process_interest(i, face, now, &model);
                    (node, a, None)
                }
                Packet::Data(d) => {
                    let expected = nodes[node]
                        .pit
                        .get(&d.in_reply_to)
                        .filter(|e| e.expiry > now)
                        .map(|e| e.downstream.iter().map(|x| (x.face, x.digest)).collect())
                        .unwrap_or_default();
                    let a = nodes[node].process_data(d, face, now, &model);
                    (node, a, Some(expected))
                }
            },
            EventKind::WaitExpiry { node, id } => {
                let before: Vec<BTreeSet<(FaceId, InterestDigest)>> = nodes[node]
                    .pit
                    .iter()
                    .map(|e| e.downstream.iter().map(|x| (x.face, x.digest)).collect())
                    .collect();
                let a = nodes[node].wait_expired(id, now, &model);
                let sent: BTreeSet<_> = data_sends(&a).collect();
                if !sent.is_empty() && !before.contains(&sent) {
                    return Err(format!("wait reply {sent:?} matches no PIT entry"));
                }
                (node, a, None)
            }
            _ => unreachable!(),
        };

        if let Some(expected) = expected {
            let sent: BTreeSet<_> = data_sends(&actions).collect();
            if sent != expected {
                return Err(format!("node {node}: data went to {sent:?}, PIT held {expected:?}"));
            }
        }

        for action in actions {
            match action {
                Action::ScheduleWait { id, at } => {
                    queue.push(at, EventKind::WaitExpiry { node, id });
                }
                Action::Send { face, packet } => {
                    if let Packet::Data(d) = &packet {
                        let key = (node, face, d.in_reply_to);
                        let sent = replied.entry(key).or_default();
                        *sent += 1;
                        if *sent > received.get(&key).copied().unwrap_or(0) {
                            return Err(format!("node {node}: more data than Interests on {face}"));
                        }
                    }
                    if face.is_app() {
                        match packet {
                            Packet::Interest(i) => {
                                // Producer application.
                                let base = i.attached_match.clone().unwrap_or_else(|| i.name().without_marker());
                                let data = Data {
                                    name: base.with_fuzzy(i.name().fuzzy_index().unwrap_or(1)).unwrap(),
                                    payload_size: 10,
                                    in_reply_to: i.digest(),
                                };
                                queue.push(
                                    now,
                                    EventKind::Arrival {
                                        node,
                                        face: FaceId::APP,
                                        packet: Packet::Data(data),
                                    },
                                );
                            }
                            Packet::Data(_) => report.data_delivered += 1,
                        }
                    } else {
                        let to = face.0 as usize;
                        queue.push(
                            now + SimDuration::from_millis(delay(node, to)),
                            EventKind::Arrival {
                                node: to,
                                face: FaceId(node as u32),
                                packet,
                            },
                        );
                    }
                }
            }
        }

        for (i, f) in nodes.iter().enumerate() {
            if f.cs.len() > f.cs.capacity() {
                return Err(format!("node {i}: CS holds {} > {}", f.cs.len(), f.cs.capacity()));
            }
            for e in f.pit.iter() {
                for d in &e.downstream {
                    if names.get(&d.digest) != Some(&e.name) {
                        return Err(format!("node {i}: PIT entry {} aggregated another name", e.name));
                    }
                }
            }
        }
    }
    report.aggregated = nodes.iter().map(|f| f.counters.aggregated).sum();
    Ok(report)
}

fn data_sends(actions: &[Action]) -> impl Iterator<Item = (FaceId, InterestDigest)> + '_ {
    actions.iter().filter_map(|a| match a {
        Action::Send {
            face,
            packet: Packet::Data(d),
        } => Some((*face, d.in_reply_to)),
        _ => None,
    })
}
