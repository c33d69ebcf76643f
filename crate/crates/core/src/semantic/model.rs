//! Word-vector model in the word2vec text interchange format.
//!
//! ```text
//! <count> <dim>
//! <token> <f1> ... <fdim>
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use super::similarity::{cosine_with_sq_norms, dot, SimilarityScore};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot read model {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: malformed header, expected \"<count> <dim>\"")]
    Header { line: usize },
    #[error("line {line}: expected token and {expected} values, found {found} fields")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: value {value:?} is not a finite real")]
    BadValue { line: usize, value: String },
    #[error("line {line}: duplicate token {token:?}")]
    DuplicateToken { line: usize, token: String },
    #[error("line {line}: token {token:?} has a zero vector")]
    ZeroVector { line: usize, token: String },
    #[error("header announces {expected} vectors but file has {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("invalid token {0:?}")]
    BadToken(String),
    #[error("vector dimension {found} does not match model dimension {expected}")]
    Dimension { expected: usize, found: usize },
}

/// Immutable token to vector mapping with precomputed norms.
#[derive(Debug, Clone)]
pub struct EmbeddingModel {
    dim: usize,
    tokens: Vec<String>,
    vectors: Vec<f64>,
    sq_norms: Vec<f64>,
    index: HashMap<String, usize>,
}

impl EmbeddingModel {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or(ModelError::Header { line: 1 })?;
        let mut head = header.split_ascii_whitespace();
        let (count, dim) = match (head.next(), head.next(), head.next()) {
            (Some(c), Some(d), None) => match (c.parse::<usize>(), d.parse::<usize>()) {
                (Ok(c), Ok(d)) if d > 0 => (c, d),
                _ => return Err(ModelError::Header { line: 1 }),
            },
            _ => return Err(ModelError::Header { line: 1 }),
        };

        let mut model = Self::with_capacity(dim, count);
        let mut found = 0usize;
        for (line_no, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            found += 1;
            if found > count {
                continue;
            }
            let mut fields = line.split_ascii_whitespace();
            let token = fields.next().unwrap_or_default();
            let values: Vec<&str> = fields.collect();
            if values.len() != dim {
                return Err(ModelError::FieldCount {
                    line: line_no,
                    expected: dim,
                    found: values.len() + 1,
                });
            }
            let mut vector = Vec::with_capacity(dim);
            for v in values {
                match v.parse::<f64>() {
                    Ok(x) if x.is_finite() => vector.push(x),
                    _ => {
                        return Err(ModelError::BadValue {
                            line: line_no,
                            value: v.to_string(),
                        })
                    }
                }
            }
            model.push(token, vector).map_err(|e| match e {
                ModelError::DuplicateToken { token, .. } => ModelError::DuplicateToken {
                    line: line_no,
                    token,
                },
                ModelError::ZeroVector { token, .. } => ModelError::ZeroVector {
                    line: line_no,
                    token,
                },
                other => other,
            })?;
        }
        if found != count {
            return Err(ModelError::CountMismatch {
                expected: count,
                found,
            });
        }
        Ok(model)
    }

    /// Builds a model from in-memory entries with the same validation as `parse`.
    pub fn from_entries<I, S>(dim: usize, entries: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut model = Self::with_capacity(dim, 0);
        for (token, vector) in entries {
            if vector.iter().any(|x| !x.is_finite()) {
                return Err(ModelError::BadValue {
                    line: model.len() + 2,
                    value: "non-finite".into(),
                });
            }
            let token = token.into();
            model.push(&token, vector)?;
        }
        Ok(model)
    }

    fn with_capacity(dim: usize, count: usize) -> Self {
        Self {
            dim,
            tokens: Vec::with_capacity(count),
            vectors: Vec::with_capacity(count * dim),
            sq_norms: Vec::with_capacity(count),
            index: HashMap::with_capacity(count),
        }
    }

    fn push(&mut self, token: &str, vector: Vec<f64>) -> Result<(), ModelError> {
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return Err(ModelError::BadToken(token.to_string()));
        }
        if vector.len() != self.dim {
            return Err(ModelError::Dimension {
                expected: self.dim,
                found: vector.len(),
            });
        }
        if self.index.contains_key(token) {
            return Err(ModelError::DuplicateToken {
                line: self.len() + 2,
                token: token.to_string(),
            });
        }
        let sq_norm = dot(&vector, &vector);
        if sq_norm == 0.0 {
            return Err(ModelError::ZeroVector {
                line: self.len() + 2,
                token: token.to_string(),
            });
        }
        self.index.insert(token.to_string(), self.tokens.len());
        self.tokens.push(token.to_string());
        self.vectors.extend_from_slice(&vector);
        self.sq_norms.push(sq_norm);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens in file order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    pub fn vector(&self, id: usize) -> &[f64] {
        &self.vectors[id * self.dim..(id + 1) * self.dim]
    }

    pub fn sq_norm(&self, id: usize) -> f64 {
        self.sq_norms[id]
    }

    pub fn id_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn vector_of(&self, token: &str) -> Option<&[f64]> {
        self.id_of(token).map(|id| self.vector(id))
    }

    /// Cosine similarity between two vocabulary entries.
    pub fn similarity_ids(&self, a: usize, b: usize) -> SimilarityScore {
        cosine_with_sq_norms(self.vector(a), self.vector(b), self.sq_norms[a], self.sq_norms[b])
    }

    /// Similarity between a free vector and a vocabulary entry. The caller
    /// supplies the query's squared norm so it is computed once per query.
    pub fn similarity_to(&self, query: &[f64], query_sq_norm: f64, id: usize) -> SimilarityScore {
        cosine_with_sq_norms(query, self.vector(id), query_sq_norm, self.sq_norms[id])
    }

    /// Token-level similarity: equal strings score 1 even when out of
    /// vocabulary; otherwise both tokens must be known.
    pub fn similarity(&self, a: &str, b: &str) -> Option<SimilarityScore> {
        if a == b {
            return Some(SimilarityScore::EXACT);
        }
        let (ia, ib) = (self.id_of(a)?, self.id_of(b)?);
        Some(self.similarity_ids(ia, ib))
    }

    /// Serializes back to the text format with `decimals` fractional digits.
    pub fn to_text(&self, decimals: usize) -> String {
        let mut out = String::with_capacity(self.len() * (self.dim * (decimals + 4) + 16));
        let _ = writeln!(out, "{} {}", self.len(), self.dim);
        for id in 0..self.len() {
            out.push_str(&self.tokens[id]);
            for x in self.vector(id) {
                let _ = write!(out, " {x:.decimals$}");
            }
            out.push('\n');
        }
        out
    }

    /// Rough in-memory footprint: vector storage, norms, token strings and
    /// the hash index.
    pub fn memory_bytes(&self) -> u64 {
        let per_entry = (self.dim + 1) * std::mem::size_of::<f64>()
            + 2 * std::mem::size_of::<String>()
            + std::mem::size_of::<usize>()
            + 16;
        let strings: usize = self.tokens.iter().map(|t| 2 * t.len()).sum();
        (self.len() * per_entry + strings) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_small_file() {
        let m = EmbeddingModel::parse("2 3\na 1 0 0\nb 0 1 0\n").unwrap();
        assert_eq!(m.dim(), 3);
        assert_eq!(m.len(), 2);
        assert_eq!(m.vector_of("b"), Some(&[0.0, 1.0, 0.0][..]));
        assert_eq!(m.similarity("a", "b").unwrap().value(), 0.0);
        assert_eq!(m.similarity("zz", "zz").unwrap().value(), 1.0);
        assert!(m.similarity("a", "zz").is_none());
    }

    #[test]
    fn rejects_bad_files() {
        let cases = [
            ("2 3\na 1 0 0\nb 0 1 0\nc 0 0 1\n", "CountMismatch"),
            ("2 3\na 1 0 0\n", "CountMismatch"),
            ("x 3\na 1 0 0\n", "Header"),
            ("1 0\na\n", "Header"),
            ("1 3 4\na 1 0 0\n", "Header"),
            ("1 3\na 1 0\n", "FieldCount"),
            ("1 3\na 1 0 nan\n", "BadValue"),
            ("1 3\na 1 0 inf\n", "BadValue"),
            ("1 3\na 1 0 x\n", "BadValue"),
            ("2 3\na 1 0 0\na 0 1 0\n", "DuplicateToken"),
            ("1 3\na 0 0 0\n", "ZeroVector"),
        ];
        for (text, kind) in cases {
            let err = EmbeddingModel::parse(text).unwrap_err();
            assert!(format!("{err:?}").starts_with(kind), "{text:?} -> {err:?}");
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = EmbeddingModel::parse("3 2\na 1 0\nb 0 1\nb 1 1\n").unwrap_err();
        assert!(matches!(err, ModelError::DuplicateToken { line: 4, .. }), "{err:?}");
        let err = EmbeddingModel::parse("2 2\na 1 0\nb 0\n").unwrap_err();
        assert!(matches!(err, ModelError::FieldCount { line: 3, .. }), "{err:?}");
        let err = EmbeddingModel::parse("2 2\na 1 0\nb 0 0\n").unwrap_err();
        assert!(matches!(err, ModelError::ZeroVector { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn text_round_trip() {
        let m = EmbeddingModel::from_entries(
            2,
            [("x", vec![0.5, -1.25]), ("y", vec![3.0, 0.125])],
        )
        .unwrap();
        let back = EmbeddingModel::parse(&m.to_text(6)).unwrap();
        assert_eq!(back.tokens(), m.tokens());
        assert_eq!(back.vector(1), m.vector(1));
    }
}
