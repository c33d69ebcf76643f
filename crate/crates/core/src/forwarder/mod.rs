//! Per-node NDN forwarding: content store, pending interest table, FIB and
//! the Interest/Data pipeline with fuzzy matching and forward-or-wait.

mod cs;
mod fib;
mod lookup;
mod node;
mod packet;
mod pit;

pub use cs::{CachePolicy, ContentStore, CsHit};
pub use fib::{Fib, FibEntry, FuzzyFibHit};
pub use lookup::LookupStats;
pub use node::{Action, Forwarder, ForwarderConfig, Mode, NodeCounters};
pub use packet::{Data, FaceId, Interest, InterestDigest, Packet};
pub use pit::{Downstream, Pit, PitEntry, PitInsert};
