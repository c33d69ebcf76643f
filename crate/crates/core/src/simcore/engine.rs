use std::collections::{HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::queue::{EventKind, EventQueue};
use super::topology::Topology;
use crate::forwarder::{Action, Data, FaceId, Forwarder, ForwarderConfig, Interest, InterestDigest, Mode, NodeCounters, Packet};
use crate::names::Name;
use crate::semantic::EmbeddingModel;
use crate::time::{SimDuration, SimTime};

const STREAM_FIB: u64 = 1;
const STREAM_WARMUP: u64 = 2;
const STREAM_SHARED: u64 = 3;
const STREAM_CONSUMER: u64 = 100;

/// Independent RNG stream derived from a run seed (SplitMix64 mixing).
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsumerSpec {
    pub node: usize,
    /// Interests per second.
    pub rate: u32,
    pub prefix: Name,
    /// Used instead of `prefix` with probability `overlap`; such draws take
    /// their token from a stream shared by all consumers.
    pub shared_prefix: Option<Name>,
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProducerSpec {
    pub node: usize,
    pub prefix: Name,
    pub payload_size: u32,
}

/// Fully resolved inputs of one simulation run.
#[derive(Debug, Clone)]
pub struct SimSetup<'a> {
    pub topology: &'a Topology,
    pub model: &'a EmbeddingModel,
    pub forwarder: ForwarderConfig,
    /// Nodes that hold fuzzy CS hits of local Interests, with their wait time.
    pub wait: Vec<(usize, SimDuration)>,
    pub consumers: Vec<ConsumerSpec>,
    pub producer: Option<ProducerSpec>,
    /// Number of FIB names drawn (duplicates collapse).
    pub fib_size: usize,
    /// Exact prefixes the FIB names are built on, used round-robin.
    pub fib_prefixes: Vec<Name>,
    /// Exact prefixes of warmup data, used round-robin.
    pub warmup_prefixes: Vec<Name>,
    /// Components appended after the fuzzy token of every name.
    pub suffix: Vec<String>,
    pub warmup: SimDuration,
    pub duration: SimDuration,
    pub hop_limit: u8,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunMetrics {
    pub interests_sent: u64,
    pub data_retrieved: u64,
    /// Seconds of consumer activity, `duration - warmup`.
    pub active_secs: f64,
    /// `(sent, retrieved)` per consumer.
    pub per_consumer: Vec<(u64, u64)>,
    pub counters: NodeCounters,
    pub node_counters: Vec<NodeCounters>,
    pub packets_transmitted: u64,
    pub packets_delivered: u64,
    pub events: u64,
    pub fib_entries: usize,
    pub max_cs_occupancy: usize,
    /// `(interest token, data token)` for each satisfied Interest.
    pub pairs: Vec<(String, String)>,
}

impl RunMetrics {
    pub fn retrieval_rate(&self) -> f64 {
        if self.active_secs > 0.0 {
            self.data_retrieved as f64 / self.active_secs
        } else {
            0.0
        }
    }
}

struct Outstanding {
    token: String,
    depth: usize,
}

struct Consumer {
    spec: ConsumerSpec,
    rng: ChaCha8Rng,
    /// Replays the same sequence at every consumer.
    shared_rng: ChaCha8Rng,
    sent: u64,
    retrieved: u64,
    outstanding: HashMap<InterestDigest, Outstanding>,
}

fn fuzzy_name(prefix: &Name, token: &str, suffix: &[String]) -> Name {
    let depth = prefix.len();
    let mut comps: Vec<String> = prefix.components().to_vec();
    comps.push(token.to_string());
    comps.extend(suffix.iter().cloned());
    Name::new(comps, Some(depth)).expect("components come from valid names")
}

struct Sim<'a> {
    setup: &'a SimSetup<'a>,
    nodes: Vec<Forwarder>,
    consumers: Vec<Consumer>,
    consumer_at: Vec<Option<usize>>,
    warmup_items: Vec<Vec<Data>>,
    queue: EventQueue,
    now: SimTime,
    m: RunMetrics,
}

impl<'a> Sim<'a> {
    fn new(setup: &'a SimSetup<'a>) -> Self {
        let n = setup.topology.node_count();
        let model = setup.model;
        let mut nodes: Vec<Forwarder> = (0..n)
            .map(|i| {
                let mut cfg = setup.forwarder.clone();
                cfg.wait = None;
                if cfg.mode == Mode::Fif {
                    cfg.wait = setup.wait.iter().find(|(w, _)| *w == i).map(|&(_, d)| d);
                }
                Forwarder::new(cfg)
            })
            .collect();

        if let Some(p) = &setup.producer {
            let mut names = Vec::new();
            if !setup.fib_prefixes.is_empty() && !model.is_empty() {
                let mut rng = stream_rng(setup.seed, STREAM_FIB);
                for j in 0..setup.fib_size {
                    let token = model.token(rng.random_range(0..model.len()));
                    let prefix = &setup.fib_prefixes[j % setup.fib_prefixes.len()];
                    names.push(prefix.join(&[token][..]).expect("valid token"));
                }
            }
            for (i, node) in nodes.iter_mut().enumerate() {
                let face = match setup.topology.shortest_path_next_hop(i, p.node) {
                    Some(v) => FaceId(v as u32),
                    None => {
                        node.fib.insert(&p.prefix, FaceId::APP);
                        FaceId::APP
                    }
                };
                for name in &names {
                    node.fib.insert(name, face);
                }
            }
        }

        let mut warmup_items = vec![Vec::new(); n];
        if !setup.warmup_prefixes.is_empty() && setup.forwarder.cs_capacity > 0 && !model.is_empty() {
            let mut rng = stream_rng(setup.seed, STREAM_WARMUP);
            let mut vocab: Vec<usize> = (0..model.len()).collect();
            vocab.shuffle(&mut rng);
            let chunk = model.len() / n;
            for (i, items) in warmup_items.iter_mut().enumerate() {
                let slice = &vocab[i * chunk..(i + 1) * chunk];
                for (j, &id) in slice.iter().take(setup.forwarder.cs_capacity).enumerate() {
                    let prefix = &setup.warmup_prefixes[j % setup.warmup_prefixes.len()];
                    items.push(Data {
                        name: fuzzy_name(prefix, model.token(id), &setup.suffix),
                        payload_size: setup.producer.as_ref().map_or(1024, |p| p.payload_size),
                        in_reply_to: InterestDigest([0; 32]),
                    });
                }
            }
        }

        let mut consumer_at = vec![None; n];
        let consumers = setup
            .consumers
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                consumer_at[spec.node] = Some(i);
                Consumer {
                    spec: spec.clone(),
                    rng: stream_rng(setup.seed, STREAM_CONSUMER + i as u64),
                    shared_rng: stream_rng(setup.seed, STREAM_SHARED),
                    sent: 0,
                    retrieved: 0,
                    outstanding: HashMap::new(),
                }
            })
            .collect();

        let fib_entries = nodes.first().map_or(0, |f| f.fib.len());
        Self {
            setup,
            nodes,
            consumers,
            consumer_at,
            warmup_items,
            queue: EventQueue::new(),
            now: SimTime::ZERO,
            m: RunMetrics {
                fib_entries,
                ..RunMetrics::default()
            },
        }
    }

    fn send_time(&self, c: usize, k: u64) -> SimTime {
        let rate = self.consumers[c].spec.rate as u64;
        SimTime(self.setup.warmup.as_micros() + k * 1_000_000 / rate)
    }

    fn schedule_initial(&mut self) {
        let end = SimTime(self.setup.duration.as_micros());
        for (node, items) in self.warmup_items.iter().enumerate() {
            let count = items.len() as u64;
            for j in 0..count {
                let t = SimTime(j * self.setup.warmup.as_micros() / count);
                self.queue.push(t, EventKind::WarmupPopulate { node, item: j as usize });
            }
        }
        for c in 0..self.consumers.len() {
            if self.consumers[c].spec.rate > 0 {
                let t = self.send_time(c, 0);
                if t < end {
                    self.queue.push(t, EventKind::AppSend { consumer: c });
                }
            }
        }
        let mut t = SimTime::from_secs(1);
        while t <= end {
            self.queue.push(t, EventKind::PitSweep);
            t = t + SimDuration::from_secs(1);
        }
        self.queue.push(end, EventKind::RunEnd);
    }

    fn run(mut self) -> RunMetrics {
        self.schedule_initial();
        while let Some(ev) = self.queue.pop() {
            debug_assert!(ev.time >= self.now, "event scheduled in the past");
            self.now = ev.time;
            self.m.events += 1;
            match ev.kind {
                EventKind::Arrival { node, face, packet } => {
                    self.m.packets_delivered += 1;
                    self.handle_packet(node, face, packet);
                }
                EventKind::AppSend { consumer } => self.app_send(consumer),
                EventKind::WaitExpiry { node, id } => {
                    let actions = self.nodes[node].wait_expired(id, self.now, self.setup.model);
                    self.dispatch(node, actions);
                }
                EventKind::PitSweep => {
                    for f in &mut self.nodes {
                        f.sweep(self.now);
                    }
                }
                EventKind::WarmupPopulate { node, item } => {
                    let data = self.warmup_items[node][item].clone();
                    self.nodes[node].cs.insert(data, self.setup.model);
                    self.m.max_cs_occupancy = self.m.max_cs_occupancy.max(self.nodes[node].cs.len());
                }
                EventKind::RunEnd => {}
            }
        }
        self.finish()
    }

    fn finish(mut self) -> RunMetrics {
        let active = self.setup.duration.as_micros().saturating_sub(self.setup.warmup.as_micros());
        self.m.active_secs = active as f64 / 1e6;
        for c in &self.consumers {
            self.m.interests_sent += c.sent;
            self.m.data_retrieved += c.retrieved;
            self.m.per_consumer.push((c.sent, c.retrieved));
        }
        for f in &self.nodes {
            self.m.counters.absorb(&f.counters);
            self.m.node_counters.push(f.counters.clone());
        }
        self.m
    }

    fn app_send(&mut self, c: usize) {
        let model = self.setup.model;
        let end = SimTime(self.setup.duration.as_micros());
        let consumer = &mut self.consumers[c];
        let shared = consumer.rng.random::<f64>() < consumer.spec.overlap;
        let (prefix, token_rng) = match (&consumer.spec.shared_prefix, shared) {
            (Some(p), true) => (p.clone(), &mut consumer.shared_rng),
            _ => (consumer.spec.prefix.clone(), &mut consumer.rng),
        };
        let token = model.token(token_rng.random_range(0..model.len())).to_string();
        let nonce: u64 = consumer.rng.random();
        let name = fuzzy_name(&prefix, &token, &self.setup.suffix);
        let interest = Interest::new(name, nonce, self.setup.hop_limit);
        consumer.outstanding.insert(
            interest.digest(),
            Outstanding {
                token,
                depth: prefix.len(),
            },
        );
        consumer.sent += 1;
        let k = consumer.sent;
        let node = consumer.spec.node;

        let next = self.send_time(c, k);
        if next < end {
            self.queue.push(next, EventKind::AppSend { consumer: c });
        }
        let actions = self.nodes[node].process_interest(interest, FaceId::APP, self.now, model);
        self.dispatch(node, actions);
    }

    fn handle_packet(&mut self, node: usize, face: FaceId, packet: Packet) {
        let model = self.setup.model;
        let actions = match packet {
            Packet::Interest(i) => self.nodes[node].process_interest(i, face, self.now, model),
            Packet::Data(d) => self.nodes[node].process_data(d, face, self.now, model),
        };
        self.dispatch(node, actions);
    }

    /// Carries out node actions; deliveries to local applications happen
    /// immediately, link transmissions become future arrivals.
    fn dispatch(&mut self, node: usize, actions: Vec<Action>) {
        let mut work: VecDeque<(usize, Action)> = actions.into_iter().map(|a| (node, a)).collect();
        while let Some((at, action)) = work.pop_front() {
            match action {
                Action::ScheduleWait { id, at: t } => {
                    self.queue.push(t, EventKind::WaitExpiry { node: at, id });
                }
                Action::Send { face, packet } if face.is_app() => match packet {
                    Packet::Data(d) => self.deliver_to_consumer(at, d),
                    Packet::Interest(i) => {
                        if let Some(reply) = self.produce(at, &i) {
                            let more = self.nodes[at].process_data(reply, FaceId::APP, self.now, self.setup.model);
                            work.extend(more.into_iter().map(|a| (at, a)));
                        }
                    }
                },
                Action::Send { face, packet } => {
                    let to = face.0 as usize;
                    let delay = self.setup.topology.delay(at, to).expect("faces follow links");
                    self.m.packets_transmitted += 1;
                    self.queue.push(
                        self.now + delay,
                        EventKind::Arrival {
                            node: to,
                            face: FaceId(at as u32),
                            packet,
                        },
                    );
                }
            }
            self.m.max_cs_occupancy = self.m.max_cs_occupancy.max(self.nodes[at].cs.len());
        }
    }

    fn produce(&self, node: usize, interest: &Interest) -> Option<Data> {
        let p = self.setup.producer.as_ref().filter(|p| p.node == node)?;
        let split = interest.name().split_fuzzy();
        if !p.prefix.is_prefix_of(&split.exact_prefix_name()) {
            return None;
        }
        let name = match (&interest.attached_match, interest.name().fuzzy_index()) {
            (Some(m), Some(depth)) => m
                .join(split.suffix)
                .and_then(|n| n.with_fuzzy(depth))
                .unwrap_or_else(|_| interest.name().clone()),
            _ => interest.name().clone(),
        };
        Some(Data {
            name,
            payload_size: p.payload_size,
            in_reply_to: interest.digest(),
        })
    }

    fn deliver_to_consumer(&mut self, node: usize, data: Data) {
        let Some(c) = self.consumer_at[node] else {
            return;
        };
        let consumer = &mut self.consumers[c];
        if let Some(o) = consumer.outstanding.remove(&data.in_reply_to) {
            consumer.retrieved += 1;
            let got = data.name.component(o.depth).unwrap_or("").to_string();
            self.m.pairs.push((o.token, got));
        }
    }
}

/// Runs one simulation to completion, draining every in-flight event.
pub fn run(setup: &SimSetup<'_>) -> RunMetrics {
    Sim::new(setup).run()
}
