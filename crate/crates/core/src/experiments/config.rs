use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::forwarder::{CachePolicy, Mode};
use crate::names::Name;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read scenario {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// Wait time of the forward-or-wait policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaitTime {
    /// Multiple of the round-trip time from the waiting node to the producer.
    Rtt(f64),
    Millis(f64),
}

impl std::str::FromStr for WaitTime {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().to_ascii_lowercase();
        let (num, rtt) = if let Some(x) = s.strip_suffix("rtt") {
            (x, true)
        } else if let Some(x) = s.strip_suffix("ms") {
            (x, false)
        } else {
            return Err(format!("wait time {s:?} must end in `rtt` or `ms`"));
        };
        let v: f64 = num.trim().parse().map_err(|_| format!("bad wait time {s:?}"))?;
        if !v.is_finite() || v < 0.0 {
            return Err(format!("wait time must be non-negative, got {s:?}"));
        }
        Ok(if rtt { Self::Rtt(v) } else { Self::Millis(v) })
    }
}

impl fmt::Display for WaitTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rtt(k) => write!(f, "{k}rtt"),
            Self::Millis(ms) => write!(f, "{ms}ms"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsumerConfig {
    pub node: usize,
    pub rate: u32,
    pub prefix: Name,
    /// Per-consumer override of the scenario overlap.
    pub overlap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub topology: PathBuf,
    /// Falls back to `FIF_MODEL_PATH` when absent.
    pub model: Option<PathBuf>,
    pub mode: Mode,
    pub tau: f64,
    pub max_matches: usize,
    pub fib_size: usize,
    pub cs_capacity: usize,
    pub cs_policy: CachePolicy,
    pub duration_s: f64,
    pub warmup_s: f64,
    pub producer: usize,
    pub producer_prefix: Name,
    pub payload_size: u32,
    pub consumers: Vec<ConsumerConfig>,
    pub shared_prefix: Option<Name>,
    pub overlap: f64,
    pub suffix: Vec<String>,
    pub wait_enabled: bool,
    pub wait_time: WaitTime,
    /// Nodes applying forward-or-wait; defaults to the consumer nodes.
    pub wait_nodes: Option<Vec<usize>>,
    pub seeds: Vec<u64>,
    pub hop_limit: u8,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let park = Name::parse("/park").expect("literal");
        let ys = Name::parse("/park/yellowstone").expect("literal");
        Self {
            topology: PathBuf::from("abilene.topo"),
            model: None,
            mode: Mode::Fif,
            tau: 0.4,
            max_matches: 50,
            fib_size: 100,
            cs_capacity: 100,
            cs_policy: CachePolicy::Lru,
            duration_s: 20.0,
            warmup_s: 5.0,
            producer: 10,
            producer_prefix: park,
            payload_size: 1024,
            consumers: vec![
                ConsumerConfig {
                    node: 0,
                    rate: 10,
                    prefix: ys.clone(),
                    overlap: None,
                },
                ConsumerConfig {
                    node: 4,
                    rate: 10,
                    prefix: ys,
                    overlap: None,
                },
            ],
            shared_prefix: None,
            overlap: 0.0,
            suffix: Vec::new(),
            wait_enabled: false,
            wait_time: WaitTime::Rtt(3.0),
            wait_nodes: None,
            seeds: vec![1, 2, 3, 4, 5],
            hop_limit: 32,
        }
    }
}

fn parse_list<T: std::str::FromStr>(v: &str) -> Option<Vec<T>> {
    v.split(',').map(|x| x.trim().parse().ok()).collect()
}

fn parse_bool(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}

impl ScenarioConfig {
    /// Reads a scenario file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// `key = value` lines; `consumer` may repeat. Unlisted keys keep
    /// their defaults, except that any `consumer` line replaces the default
    /// consumer set.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut consumers = Vec::new();
        let mut saw_topology = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    msg: "expected `key = value`".into(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| ConfigError::Syntax {
                line,
                msg: format!("bad {what} value {value:?}"),
            };
            let name = |v: &str| Name::parse(v).map_err(|e| ConfigError::Syntax { line, msg: e.to_string() });
            match key {
                "topology" => {
                    cfg.topology = base_dir.join(value);
                    saw_topology = true;
                }
                "model" => cfg.model = Some(base_dir.join(value)),
                "mode" => cfg.mode = value.parse().map_err(|_| bad(key))?,
                "tau" => cfg.tau = value.parse().map_err(|_| bad(key))?,
                "max_matches" => cfg.max_matches = value.parse().map_err(|_| bad(key))?,
                "fib_size" => cfg.fib_size = value.parse().map_err(|_| bad(key))?,
                "cs_capacity" => cfg.cs_capacity = value.parse().map_err(|_| bad(key))?,
                "cs_policy" => cfg.cs_policy = value.parse().map_err(|_| bad(key))?,
                "duration_s" => cfg.duration_s = value.parse().map_err(|_| bad(key))?,
                "warmup_s" => cfg.warmup_s = value.parse().map_err(|_| bad(key))?,
                "producer" => cfg.producer = value.parse().map_err(|_| bad(key))?,
                "producer_prefix" => cfg.producer_prefix = name(value)?,
                "payload_size" => cfg.payload_size = value.parse().map_err(|_| bad(key))?,
                "consumer" => {
                    let f: Vec<&str> = value.split_whitespace().collect();
                    if !(3..=4).contains(&f.len()) {
                        return Err(bad("consumer (`node rate prefix [overlap]`)"));
                    }
                    consumers.push(ConsumerConfig {
                        node: f[0].parse().map_err(|_| bad(key))?,
                        rate: f[1].parse().map_err(|_| bad(key))?,
                        prefix: name(f[2])?,
                        overlap: match f.get(3) {
                            Some(o) => Some(o.parse().map_err(|_| bad(key))?),
                            None => None,
                        },
                    });
                }
                "shared_prefix" => cfg.shared_prefix = Some(name(value)?),
                "overlap" => cfg.overlap = value.parse().map_err(|_| bad(key))?,
                "suffix" => cfg.suffix = value.split('/').filter(|s| !s.is_empty()).map(str::to_string).collect(),
                "wait_enabled" => cfg.wait_enabled = parse_bool(value).ok_or_else(|| bad(key))?,
                "wait_time" => cfg.wait_time = value.parse().map_err(|_| bad(key))?,
                "wait_nodes" => cfg.wait_nodes = Some(parse_list(value).ok_or_else(|| bad(key))?),
                "seeds" => cfg.seeds = parse_list(value).ok_or_else(|| bad(key))?,
                "hop_limit" => cfg.hop_limit = value.parse().map_err(|_| bad(key))?,
                _ => {
                    return Err(ConfigError::Syntax {
                        line,
                        msg: format!("unknown key {key:?}"),
                    })
                }
            }
        }
        if !saw_topology {
            return Err(invalid("scenario must set `topology`"));
        }
        if !consumers.is_empty() {
            cfg.consumers = consumers;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that does not need the topology or model loaded.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.tau.is_finite() || !(-1.0..=1.0).contains(&self.tau) {
            return Err(invalid(format!("tau must be in [-1, 1], got {}", self.tau)));
        }
        if self.max_matches == 0 {
            return Err(invalid("max_matches must be at least 1"));
        }
        if !(self.warmup_s >= 0.0 && self.duration_s.is_finite() && self.warmup_s < self.duration_s) {
            return Err(invalid(format!(
                "need 0 <= warmup_s < duration_s, got {} and {}",
                self.warmup_s, self.duration_s
            )));
        }
        let in_unit = |x: f64| (0.0..=1.0).contains(&x);
        if !in_unit(self.overlap) || self.consumers.iter().any(|c| c.overlap.is_some_and(|o| !in_unit(o))) {
            return Err(invalid("overlap must be in [0, 1]"));
        }
        if self.consumers.iter().any(|c| c.rate == 0) {
            return Err(invalid("consumer rate must be positive"));
        }
        let mut nodes: Vec<usize> = self.consumers.iter().map(|c| c.node).collect();
        nodes.sort_unstable();
        if nodes.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("at most one consumer per node"));
        }
        if self.seeds.is_empty() {
            return Err(invalid("at least one seed is required"));
        }
        if self.hop_limit == 0 {
            return Err(invalid("hop_limit must be positive"));
        }
        for p in self.consumers.iter().map(|c| &c.prefix).chain(&self.shared_prefix).chain([&self.producer_prefix]) {
            if p.fuzzy_index().is_some() {
                return Err(invalid(format!("prefix {p} must not carry a fuzzy marker")));
            }
        }
        Ok(())
    }

    /// Checks node references against a topology of `node_count` nodes.
    pub fn validate_nodes(&self, node_count: usize) -> Result<(), ConfigError> {
        let nodes = self
            .consumers
            .iter()
            .map(|c| c.node)
            .chain([self.producer])
            .chain(self.wait_nodes.iter().flatten().copied());
        for n in nodes {
            if n >= node_count {
                return Err(invalid(format!("node {n} does not exist (topology has {node_count})")));
            }
        }
        Ok(())
    }

    /// Distinct exact prefixes used by the consumers, in first-seen order.
    pub fn content_prefixes(&self) -> Vec<Name> {
        let mut out: Vec<Name> = Vec::new();
        for p in self.consumers.iter().map(|c| &c.prefix).chain(&self.shared_prefix) {
            if !out.contains(p) {
                out.push(p.clone());
            }
        }
        out
    }

    pub fn model_path(&self) -> Option<PathBuf> {
        self.model
            .clone()
            .or_else(|| std::env::var_os("FIF_MODEL_PATH").map(PathBuf::from))
    }
}
