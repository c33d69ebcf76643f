//! Single-parent concept taxonomy and Wu-Palmer similarity.
//!
//! Depth convention: the root has depth 1, so similarity is always positive.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("cannot read taxonomy {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: expected \"parent child\"")]
    Malformed { line: usize },
    #[error("line {line}: {child:?} already has parent {existing:?}")]
    DuplicateChild {
        line: usize,
        child: String,
        existing: String,
    },
    #[error("line {line}: {0:?} cannot be its own parent", line = .1)]
    SelfParent(String, usize),
    #[error("parent links form a cycle through {0:?}")]
    Cycle(String),
    #[error("expected exactly one root, found {0:?}")]
    Roots(Vec<String>),
    #[error("empty taxonomy")]
    Empty,
    #[error("unknown concept {0:?}")]
    UnknownConcept(String),
}

#[derive(Debug, Clone)]
pub struct Taxonomy {
    concepts: Vec<String>,
    ids: HashMap<String, usize>,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    root: usize,
}

impl Taxonomy {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, TaxonomyError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| TaxonomyError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Lines of `parent child`; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, TaxonomyError> {
        let mut ids: HashMap<String, usize> = HashMap::new();
        let mut concepts: Vec<String> = Vec::new();
        let mut parent: Vec<Option<usize>> = Vec::new();
        let mut intern = |name: &str, concepts: &mut Vec<String>, parent: &mut Vec<Option<usize>>| {
            *ids.entry(name.to_string()).or_insert_with(|| {
                concepts.push(name.to_string());
                parent.push(None);
                concepts.len() - 1
            })
        };

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut fields = body.split_whitespace();
            let (p, c) = match (fields.next(), fields.next(), fields.next()) {
                (Some(p), Some(c), None) => (p, c),
                _ => return Err(TaxonomyError::Malformed { line }),
            };
            if p == c {
                return Err(TaxonomyError::SelfParent(p.to_string(), line));
            }
            let pid = intern(p, &mut concepts, &mut parent);
            let cid = intern(c, &mut concepts, &mut parent);
            if let Some(existing) = parent[cid] {
                return Err(TaxonomyError::DuplicateChild {
                    line,
                    child: c.to_string(),
                    existing: concepts[existing].clone(),
                });
            }
            parent[cid] = Some(pid);
        }
        if concepts.is_empty() {
            return Err(TaxonomyError::Empty);
        }

        // Walk every parent chain; a chain longer than the concept count loops.
        for start in 0..concepts.len() {
            let mut cur = start;
            let mut steps = 0;
            while let Some(p) = parent[cur] {
                cur = p;
                steps += 1;
                if steps > concepts.len() {
                    return Err(TaxonomyError::Cycle(concepts[start].clone()));
                }
            }
        }
        let roots: Vec<usize> = (0..concepts.len()).filter(|&i| parent[i].is_none()).collect();
        if roots.len() != 1 {
            let mut names: Vec<String> = roots.iter().map(|&i| concepts[i].clone()).collect();
            names.sort();
            return Err(TaxonomyError::Roots(names));
        }
        let root = roots[0];

        let depth = (0..concepts.len())
            .map(|i| {
                let mut d = 1;
                let mut cur = i;
                while let Some(p) = parent[cur] {
                    d += 1;
                    cur = p;
                }
                d
            })
            .collect();
        let ids = concepts.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Ok(Self {
            concepts,
            ids,
            parent,
            depth,
            root,
        })
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn root(&self) -> &str {
        &self.concepts[self.root]
    }

    pub fn contains(&self, concept: &str) -> bool {
        self.ids.contains_key(concept)
    }

    /// Concepts in first-seen file order.
    pub fn concepts(&self) -> &[String] {
        &self.concepts
    }

    fn id(&self, concept: &str) -> Result<usize, TaxonomyError> {
        self.ids
            .get(concept)
            .copied()
            .ok_or_else(|| TaxonomyError::UnknownConcept(concept.to_string()))
    }

    pub fn depth(&self, concept: &str) -> Result<usize, TaxonomyError> {
        Ok(self.depth[self.id(concept)?])
    }

    pub fn parent(&self, concept: &str) -> Result<Option<&str>, TaxonomyError> {
        Ok(self.parent[self.id(concept)?].map(|p| self.concepts[p].as_str()))
    }

    /// Deepest common ancestor; a concept is its own ancestor.
    pub fn lowest_common_subsumer(&self, a: &str, b: &str) -> Result<&str, TaxonomyError> {
        let (mut x, mut y) = (self.id(a)?, self.id(b)?);
        while self.depth[x] > self.depth[y] {
            x = self.parent[x].expect("deeper node has a parent");
        }
        while self.depth[y] > self.depth[x] {
            y = self.parent[y].expect("deeper node has a parent");
        }
        while x != y {
            x = self.parent[x].expect("non-root");
            y = self.parent[y].expect("non-root");
        }
        Ok(&self.concepts[x])
    }

    /// `2 * depth(lcs) / (depth(a) + depth(b))`.
    pub fn wup_similarity(&self, a: &str, b: &str) -> Result<f64, TaxonomyError> {
        let lcs = self.lowest_common_subsumer(a, b)?;
        let (da, db, dl) = (self.depth(a)?, self.depth(b)?, self.depth(lcs)?);
        Ok(2.0 * dl as f64 / (da + db) as f64)
    }

    /// Concepts whose similarity to `query` is at least `1 - tau`.
    pub fn names_within_threshold(&self, query: &str, tau: f64) -> Result<BTreeSet<String>, TaxonomyError> {
        self.id(query)?;
        let floor = 1.0 - tau;
        let mut out = BTreeSet::new();
        for c in &self.concepts {
            if self.wup_similarity(query, c)? >= floor {
                out.insert(c.clone());
            }
        }
        Ok(out)
    }

    /// Concept counts by depth, for summaries.
    pub fn depth_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for &d in &self.depth {
            *hist.entry(d).or_default() += 1;
        }
        hist
    }
}

/// Mean similarity over usable pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    /// `None` when no pair could be evaluated.
    pub mean_wup: Option<f64>,
    pub used: usize,
    pub skipped: usize,
}

/// Averages WUP over `(interest token, data token)` pairs; pairs with a token
/// outside the taxonomy are skipped and counted.
pub fn evaluate_accuracy<A, B>(pairs: &[(A, B)], taxonomy: &Taxonomy) -> AccuracyReport
where
    A: AsRef<str>,
    B: AsRef<str>,
{
    let mut sum = 0.0;
    let mut used = 0;
    let mut skipped = 0;
    for (a, b) in pairs {
        match taxonomy.wup_similarity(a.as_ref(), b.as_ref()) {
            Ok(s) => {
                sum += s;
                used += 1;
            }
            Err(_) => skipped += 1,
        }
    }
    AccuracyReport {
        mean_wup: (used > 0).then(|| sum / used as f64),
        used,
        skipped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# a toy tree
animal mammal
animal bird
mammal dog
mammal cat
dog hound
bird eagle
";

    #[test]
    fn depths_and_root() {
        let t = Taxonomy::parse("animal dog\nanimal cat\n").unwrap();
        assert_eq!(t.root(), "animal");
        assert_eq!(t.depth("animal").unwrap(), 1);
        assert_eq!(t.depth("dog").unwrap(), 2);
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn load_errors() {
        assert!(matches!(
            Taxonomy::parse("a b\nb a\n"),
            Err(TaxonomyError::Cycle(_))
        ));
        assert!(matches!(
            Taxonomy::parse("r a\na b\nb c\nc a\n"),
            Err(TaxonomyError::DuplicateChild { .. })
        ));
        assert!(matches!(
            Taxonomy::parse("x a\ny a\n"),
            Err(TaxonomyError::DuplicateChild { line: 2, .. })
        ));
        assert!(matches!(
            Taxonomy::parse("x a\ny b\n"),
            Err(TaxonomyError::Roots(r)) if r == ["x", "y"]
        ));
        assert!(matches!(
            Taxonomy::parse("x\n"),
            Err(TaxonomyError::Malformed { line: 1 })
        ));
        assert!(matches!(Taxonomy::parse(""), Err(TaxonomyError::Empty)));
        assert!(matches!(
            Taxonomy::parse("a a\n"),
            Err(TaxonomyError::SelfParent(..))
        ));
    }

    #[test]
    fn cycle_detached_from_root() {
        // Root r is fine but b <-> c loop among themselves.
        let err = Taxonomy::parse("r a\nb c\nc b\n").unwrap_err();
        assert!(matches!(err, TaxonomyError::Cycle(_)), "{err:?}");
    }

    #[test]
    fn wup_values() {
        let t = Taxonomy::parse(SMALL).unwrap();
        assert_eq!(t.wup_similarity("dog", "dog").unwrap(), 1.0);
        // root vs depth-2 concept
        assert_eq!(t.wup_similarity("animal", "bird").unwrap(), 2.0 / 3.0);
        // dog, cat: lcs mammal (2), both depth 3
        assert_eq!(t.wup_similarity("dog", "cat").unwrap(), 4.0 / 6.0);
        // hound (4) vs eagle (3): lcs animal
        assert_eq!(t.wup_similarity("hound", "eagle").unwrap(), 2.0 / 7.0);
        assert_eq!(t.lowest_common_subsumer("hound", "dog").unwrap(), "dog");
        assert!(matches!(
            t.wup_similarity("dog", "zebra"),
            Err(TaxonomyError::UnknownConcept(_))
        ));
    }

    #[test]
    fn threshold_sets() {
        let t = Taxonomy::parse(SMALL).unwrap();
        let zero = t.names_within_threshold("dog", 0.0).unwrap();
        assert_eq!(zero.into_iter().collect::<Vec<_>>(), ["dog"]);
        assert_eq!(t.names_within_threshold("dog", 1.0).unwrap().len(), t.len());
        assert!(t.names_within_threshold("wolf", 0.5).is_err());
    }

    #[test]
    fn accuracy_report() {
        let t = Taxonomy::parse(SMALL).unwrap();
        let same = [("dog", "dog"), ("cat", "cat")];
        assert_eq!(evaluate_accuracy(&same, &t).mean_wup, Some(1.0));
        let none: [(&str, &str); 0] = [];
        assert_eq!(evaluate_accuracy(&none, &t).mean_wup, None);

        let pairs = [("dog", "cat"), ("hound", "eagle"), ("dog", "hound"), ("dog", "zebra")];
        let r = evaluate_accuracy(&pairs, &t);
        // 4/6, 2/7, 2*3/(3+4)
        let expected = (4.0 / 6.0 + 2.0 / 7.0 + 6.0 / 7.0) / 3.0;
        assert!((r.mean_wup.unwrap() - expected).abs() < 1e-15);
        assert_eq!((r.used, r.skipped), (3, 1));
    }
}
