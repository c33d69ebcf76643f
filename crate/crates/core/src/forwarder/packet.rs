use std::fmt;

use sha2::{Digest as _, Sha256};

use crate::names::Name;

/// Face identifier. Links use the neighbor's node id; the local
/// application face is [`FaceId::APP`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceId(pub u32);

impl FaceId {
    pub const APP: FaceId = FaceId(u32::MAX);

    pub fn is_app(self) -> bool {
        self == Self::APP
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_app() {
            f.write_str("app")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// SHA-256 of the canonical Interest string `"<name>|<nonce>"`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InterestDigest(pub [u8; 32]);

impl InterestDigest {
    pub fn compute(name: &Name, nonce: u64) -> Self {
        let canonical = format!("{name}|{nonce}");
        InterestDigest(Sha256::digest(canonical.as_bytes()).into())
    }
}

impl fmt::Display for InterestDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for InterestDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InterestDigest({})", &self.to_string()[..12])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interest {
    name: Name,
    nonce: u64,
    pub hop_limit: u8,
    /// FIB entry name chosen by an upstream fuzzy lookup.
    pub attached_match: Option<Name>,
    digest: InterestDigest,
}

impl Interest {
    pub fn new(name: Name, nonce: u64, hop_limit: u8) -> Self {
        let digest = InterestDigest::compute(&name, nonce);
        Self {
            name,
            nonce,
            hop_limit,
            attached_match: None,
            digest,
        }
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn nonce(&self) -> u64 {
        self.nonce
    }

    pub fn digest(&self) -> InterestDigest {
        self.digest
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Data {
    /// May keep a fuzzy marker identifying the semantically compared
    /// component; exact matching ignores it.
    pub name: Name,
    pub payload_size: u32,
    pub in_reply_to: InterestDigest,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Packet {
    Interest(Interest),
    Data(Data),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_sha256_of_canonical_text() {
        let name = Name::parse("/park/~dog").unwrap();
        let d = InterestDigest::compute(&name, 42);
        // sha256("/park/~dog|42")
        let expected: [u8; 32] = Sha256::digest(b"/park/~dog|42").into();
        assert_eq!(d.0, expected);
        assert_eq!(d.to_string().len(), 64);
        assert_ne!(d, InterestDigest::compute(&name, 43));
        assert_ne!(d, InterestDigest::compute(&Name::parse("/park/dog").unwrap(), 42));
    }

    #[test]
    fn attached_match_does_not_change_digest() {
        let mut i = Interest::new(Name::parse("/p/~a").unwrap(), 7, 8);
        let before = i.digest();
        i.attached_match = Some(Name::parse("/p/b").unwrap());
        assert_eq!(i.digest(), before);
    }
}
