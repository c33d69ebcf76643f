//! Deterministic discrete-event engine hosting one forwarder per node,
//! consumer applications and a producer.

mod engine;
mod queue;
mod topology;

pub use engine::{run, stream_rng, ConsumerSpec, ProducerSpec, RunMetrics, SimSetup};
pub use queue::{Event, EventKind, EventQueue};
pub use topology::{Link, Topology, TopologyError};
