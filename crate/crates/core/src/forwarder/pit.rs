use std::collections::HashMap;

use super::packet::{FaceId, Interest, InterestDigest};
use crate::names::Name;
use crate::time::{SimDuration, SimTime};

/// One aggregated requester: the face it came from and the digest its own
/// Interest carried, so returned Data can be re-addressed to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Downstream {
    pub face: FaceId,
    pub digest: InterestDigest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PitEntry {
    pub name: Name,
    /// Digest of the Interest that created the entry and was forwarded.
    pub digest: InterestDigest,
    pub downstream: Vec<Downstream>,
    nonces: Vec<u64>,
    pub expiry: SimTime,
}

impl PitEntry {
    pub fn faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.downstream.iter().map(|d| d.face)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PitInsert {
    Created,
    Aggregated,
    Duplicate,
}

/// Pending Interests keyed by digest, with a name index for aggregation.
#[derive(Debug, Clone)]
pub struct Pit {
    lifetime: SimDuration,
    by_digest: HashMap<InterestDigest, PitEntry>,
    by_name: HashMap<Name, InterestDigest>,
}

impl Pit {
    pub fn new(lifetime: SimDuration) -> Self {
        Self {
            lifetime,
            by_digest: HashMap::new(),
            by_name: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.by_digest.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_digest.is_empty()
    }

    pub fn get(&self, digest: &InterestDigest) -> Option<&PitEntry> {
        self.by_digest.get(digest)
    }

    /// Entries in no particular order, expired ones included.
    pub fn iter(&self) -> impl Iterator<Item = &PitEntry> {
        self.by_digest.values()
    }

    /// Names match exactly, including which component is fuzzy.
    pub fn insert(&mut self, interest: &Interest, ingress: FaceId, now: SimTime) -> PitInsert {
        if let Some(&d) = self.by_name.get(interest.name()) {
            let live = self.by_digest[&d].expiry > now;
            if live {
                let entry = self.by_digest.get_mut(&d).expect("indexed entry");
                if entry.nonces.contains(&interest.nonce()) {
                    return PitInsert::Duplicate;
                }
                entry.nonces.push(interest.nonce());
                if !entry.downstream.iter().any(|x| x.face == ingress) {
                    entry.downstream.push(Downstream {
                        face: ingress,
                        digest: interest.digest(),
                    });
                }
                return PitInsert::Aggregated;
            }
            self.remove(&d);
        }
        let digest = interest.digest();
        self.by_name.insert(interest.name().clone(), digest);
        self.by_digest.insert(
            digest,
            PitEntry {
                name: interest.name().clone(),
                digest,
                downstream: vec![Downstream { face: ingress, digest }],
                nonces: vec![interest.nonce()],
                expiry: now + self.lifetime,
            },
        );
        PitInsert::Created
    }

    pub fn remove(&mut self, digest: &InterestDigest) -> Option<PitEntry> {
        let entry = self.by_digest.remove(digest)?;
        self.by_name.remove(&entry.name);
        Some(entry)
    }

    /// Removes and returns the live entry for `digest`; an expired one is
    /// discarded instead.
    pub fn take(&mut self, digest: &InterestDigest, now: SimTime) -> Option<PitEntry> {
        let entry = self.remove(digest)?;
        (entry.expiry > now).then_some(entry)
    }

    /// Drops every expired entry, returning how many went.
    pub fn sweep(&mut self, now: SimTime) -> usize {
        let mut dead: Vec<InterestDigest> = self
            .by_digest
            .values()
            .filter(|e| e.expiry <= now)
            .map(|e| e.digest)
            .collect();
        dead.sort();
        for d in &dead {
            self.remove(d);
        }
        dead.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interest(name: &str, nonce: u64) -> Interest {
        Interest::new(Name::parse(name).unwrap(), nonce, 16)
    }

    #[test]
    fn create_aggregate_duplicate() {
        let mut pit = Pit::new(SimDuration::from_secs(4));
        let t = SimTime(0);
        let a = interest("/p/~dog", 1);
        assert_eq!(pit.insert(&a, FaceId(1), t), PitInsert::Created);
        assert_eq!(pit.insert(&a, FaceId(2), t), PitInsert::Duplicate);
        let b = interest("/p/~dog", 2);
        assert_eq!(pit.insert(&b, FaceId(2), t), PitInsert::Aggregated);
        let e = pit.get(&a.digest()).unwrap();
        assert_eq!(e.faces().collect::<Vec<_>>(), [FaceId(1), FaceId(2)]);
        assert_eq!(e.downstream[1].digest, b.digest());
        assert!(pit.get(&b.digest()).is_none());
    }

    #[test]
    fn distinct_names_never_share() {
        let mut pit = Pit::new(SimDuration::from_secs(4));
        let t = SimTime(0);
        assert_eq!(pit.insert(&interest("/p/~dog", 1), FaceId(1), t), PitInsert::Created);
        assert_eq!(pit.insert(&interest("/p/~hound", 1), FaceId(1), t), PitInsert::Created);
        assert_eq!(pit.insert(&interest("/p/dog", 1), FaceId(1), t), PitInsert::Created);
        assert_eq!(pit.len(), 3);
    }

    #[test]
    fn expiry_is_lazy_and_swept() {
        let mut pit = Pit::new(SimDuration::from_secs(4));
        let a = interest("/p/~dog", 1);
        pit.insert(&a, FaceId(1), SimTime(0));
        assert!(pit.take(&a.digest(), SimTime::from_secs(4)).is_none());
        assert!(pit.is_empty());

        pit.insert(&a, FaceId(1), SimTime(0));
        // Same name after expiry starts a fresh entry.
        assert_eq!(pit.insert(&interest("/p/~dog", 9), FaceId(3), SimTime::from_secs(5)), PitInsert::Created);
        assert_eq!(pit.len(), 1);
        pit.insert(&interest("/q/~x", 1), FaceId(1), SimTime::from_secs(6));
        assert_eq!(pit.sweep(SimTime::from_secs(9)), 1);
        assert_eq!(pit.sweep(SimTime::from_secs(10)), 1);
        assert!(pit.is_empty());
    }
}
