use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::forwarder::{FaceId, Packet};
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    /// `packet` reaches `node` through `face`.
    Arrival { node: usize, face: FaceId, packet: Packet },
    AppSend { consumer: usize },
    WaitExpiry { node: usize, id: u64 },
    PitSweep,
    WarmupPopulate { node: usize, item: usize },
    RunEnd,
}

#[derive(Debug, Clone)]
pub struct Event {
    pub time: SimTime,
    pub seq: u64,
    pub kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, o: &Self) -> bool {
        (self.time, self.seq) == (o.time, o.seq)
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Event {
    // Reversed so the max-heap pops the earliest (time, seq).
    fn cmp(&self, o: &Self) -> Ordering {
        (o.time, o.seq).cmp(&(self.time, self.seq))
    }
}

/// Pops in `(time, seq)` order, where `seq` counts insertions.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Event>,
    next_seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time: SimTime, kind: EventKind) -> u64 {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Event { time, seq, kind });
        seq
    }

    pub fn pop(&mut self) -> Option<Event> {
        self.heap.pop()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn pops_in_time_then_insertion_order(times in proptest::collection::vec(0u64..20, 0..60)) {
            let mut q = EventQueue::new();
            for &t in &times {
                q.push(SimTime(t), EventKind::PitSweep);
            }
            let mut popped = Vec::new();
            while let Some(e) = q.pop() {
                popped.push((e.time, e.seq));
            }
            let mut expected: Vec<(SimTime, u64)> =
                times.iter().enumerate().map(|(i, &t)| (SimTime(t), i as u64)).collect();
            expected.sort();
            prop_assert_eq!(popped, expected);
        }
    }
}
