use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::time::SimDuration;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("cannot read topology {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: link refers to unknown node {node}")]
    UnknownNode { line: usize, node: usize },
    #[error("line {line}: link delay must be positive")]
    BadDelay { line: usize },
    #[error("node ids must be 0..{0} without gaps")]
    NodeIds(usize),
    #[error("topology has no nodes")]
    Empty,
    #[error("node {0} is not reachable from node 0")]
    Disconnected(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    pub delay: SimDuration,
}

/// Undirected graph with per-link propagation delay.
#[derive(Debug, Clone)]
pub struct Topology {
    links: Vec<Link>,
    /// Neighbors sorted by id.
    adj: Vec<Vec<(usize, SimDuration)>>,
}

fn syntax(line: usize, msg: impl Into<String>) -> TopologyError {
    TopologyError::Syntax { line, msg: msg.into() }
}

impl Topology {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, TopologyError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| TopologyError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// `node <id>` and `link <a> <b> <delay_ms>` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, TopologyError> {
        let mut nodes: Vec<usize> = Vec::new();
        let mut raw_links: Vec<(usize, usize, usize, SimDuration)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let f: Vec<&str> = body.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| syntax(line, format!("bad node id {s:?}")));
            match f.as_slice() {
                ["node", id] => nodes.push(num(id)?),
                ["link", a, b, d] => {
                    let ms: f64 = d.parse().map_err(|_| syntax(line, format!("bad delay {d:?}")))?;
                    let delay = SimDuration::from_millis_f64(ms);
                    if !(ms > 0.0) || delay == SimDuration::ZERO {
                        return Err(TopologyError::BadDelay { line });
                    }
                    raw_links.push((line, num(a)?, num(b)?, delay));
                }
                _ => return Err(syntax(line, "expected `node <id>` or `link <a> <b> <delay_ms>`")),
            }
        }
        if nodes.is_empty() {
            return Err(TopologyError::Empty);
        }
        let n = nodes.len();
        let distinct: HashSet<usize> = nodes.iter().copied().collect();
        if distinct.len() != n || nodes.iter().any(|&x| x >= n) {
            return Err(TopologyError::NodeIds(n));
        }
        let mut links = Vec::with_capacity(raw_links.len());
        for (line, a, b, delay) in raw_links {
            for x in [a, b] {
                if x >= n {
                    return Err(TopologyError::UnknownNode { line, node: x });
                }
            }
            if a == b {
                return Err(syntax(line, "self-loop"));
            }
            if links.iter().any(|l: &Link| (l.a, l.b) == (a, b) || (l.a, l.b) == (b, a)) {
                return Err(syntax(line, format!("duplicate link {a}-{b}")));
            }
            links.push(Link { a, b, delay });
        }
        Self::from_links(n, links)
    }

    pub fn from_links(n: usize, links: Vec<Link>) -> Result<Self, TopologyError> {
        if n == 0 {
            return Err(TopologyError::Empty);
        }
        let mut adj = vec![Vec::new(); n];
        for l in &links {
            if l.a >= n || l.b >= n {
                return Err(TopologyError::UnknownNode {
                    line: 0,
                    node: l.a.max(l.b),
                });
            }
            if l.delay == SimDuration::ZERO {
                return Err(TopologyError::BadDelay { line: 0 });
            }
            adj[l.a].push((l.b, l.delay));
            adj[l.b].push((l.a, l.delay));
        }
        for list in &mut adj {
            list.sort();
        }
        let topo = Self { links, adj };
        let dist = topo.distances_from(0);
        if let Some(v) = dist.iter().position(Option::is_none) {
            return Err(TopologyError::Disconnected(v));
        }
        Ok(topo)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, SimDuration)] {
        &self.adj[node]
    }

    pub fn delay(&self, a: usize, b: usize) -> Option<SimDuration> {
        self.adj[a].iter().find(|(v, _)| *v == b).map(|&(_, d)| d)
    }

    /// Dijkstra from `src`; `None` marks unreachable nodes.
    pub fn distances_from(&self, src: usize) -> Vec<Option<SimDuration>> {
        let mut dist: Vec<Option<SimDuration>> = vec![None; self.adj.len()];
        let mut heap = BinaryHeap::new();
        dist[src] = Some(SimDuration::ZERO);
        heap.push(Reverse((SimDuration::ZERO, src)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if dist[u].is_some_and(|best| d > best) {
                continue;
            }
            for &(v, w) in &self.adj[u] {
                let nd = d + w;
                if dist[v].is_none_or(|old| nd < old) {
                    dist[v] = Some(nd);
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        dist
    }

    /// First hop on a minimum-delay path, lowest neighbor id on ties.
    /// `None` when `from == to`.
    pub fn shortest_path_next_hop(&self, from: usize, to: usize) -> Option<usize> {
        if from == to {
            return None;
        }
        let to_dest = self.distances_from(to);
        let total = to_dest[from]?;
        self.adj[from]
            .iter()
            .find(|&&(v, w)| to_dest[v].is_some_and(|d| d + w == total))
            .map(|&(v, _)| v)
    }

    /// Round-trip propagation time between two nodes.
    pub fn rtt(&self, a: usize, b: usize) -> SimDuration {
        self.distances_from(a)[b].expect("connected topology") * 2
    }
}
