//! Hierarchical NDN names with an optional fuzzy component.
//!
//! Textual form is URI-like: `/park/yellowstone/~dog/info`. A leading `~`
//! on exactly one component marks it as the component to be compared
//! semantically; every component before it is the exact prefix.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Marker prefix designating the fuzzy component in the textual form.
pub const FUZZY_MARKER: char = '~';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("empty name")]
    Empty,
    #[error("name must start with '/': {0:?}")]
    MissingLeadingSlash(String),
    #[error("empty component at position {position} in {text:?}")]
    EmptyComponent { text: String, position: usize },
    #[error("more than one fuzzy marker in {0:?}")]
    MultipleFuzzy(String),
    #[error("fuzzy component cannot be the first component: {0:?}")]
    EmptyExactPrefix(String),
    #[error("component contains '/': {0:?}")]
    SlashInComponent(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name {
    components: Vec<String>,
    fuzzy_index: Option<usize>,
}

impl Name {
    /// Builds a name from components, validating every invariant.
    pub fn new<S: Into<String>>(
        components: impl IntoIterator<Item = S>,
        fuzzy_index: Option<usize>,
    ) -> Result<Self, NameError> {
        let components: Vec<String> = components.into_iter().map(Into::into).collect();
        if components.is_empty() {
            return Err(NameError::Empty);
        }
        for (position, c) in components.iter().enumerate() {
            if c.is_empty() {
                return Err(NameError::EmptyComponent {
                    text: components.join("/"),
                    position,
                });
            }
            if c.contains('/') {
                return Err(NameError::SlashInComponent(c.clone()));
            }
        }
        if let Some(idx) = fuzzy_index {
            if idx >= components.len() {
                return Err(NameError::EmptyComponent {
                    text: components.join("/"),
                    position: idx,
                });
            }
            if idx == 0 {
                return Err(NameError::EmptyExactPrefix(components.join("/")));
            }
        }
        Ok(Self {
            components,
            fuzzy_index,
        })
    }

    pub fn parse(text: &str) -> Result<Self, NameError> {
        if text.is_empty() {
            return Err(NameError::Empty);
        }
        let body = text
            .strip_prefix('/')
            .ok_or_else(|| NameError::MissingLeadingSlash(text.to_string()))?;
        let mut components = Vec::new();
        let mut fuzzy_index = None;
        for (position, raw) in body.split('/').enumerate() {
            let component = match raw.strip_prefix(FUZZY_MARKER) {
                Some(rest) => {
                    if fuzzy_index.is_some() {
                        return Err(NameError::MultipleFuzzy(text.to_string()));
                    }
                    fuzzy_index = Some(position);
                    rest
                }
                None => raw,
            };
            if component.is_empty() {
                return Err(NameError::EmptyComponent {
                    text: text.to_string(),
                    position,
                });
            }
            components.push(component.to_string());
        }
        if fuzzy_index == Some(0) {
            return Err(NameError::EmptyExactPrefix(text.to_string()));
        }
        Ok(Self {
            components,
            fuzzy_index,
        })
    }

    pub fn components(&self) -> &[String] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    /// Always false; a valid name has at least one component.
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn fuzzy_index(&self) -> Option<usize> {
        self.fuzzy_index
    }

    pub fn fuzzy_component(&self) -> Option<&str> {
        self.fuzzy_index.map(|i| self.components[i].as_str())
    }

    pub fn component(&self, index: usize) -> Option<&str> {
        self.components.get(index).map(String::as_str)
    }

    /// The same component sequence with the fuzzy marker cleared.
    pub fn without_marker(&self) -> Name {
        Name {
            components: self.components.clone(),
            fuzzy_index: None,
        }
    }

    /// Returns a copy with the fuzzy marker placed on `index`.
    pub fn with_fuzzy(&self, index: usize) -> Result<Name, NameError> {
        Name::new(self.components.clone(), Some(index))
    }

    /// Appends components, keeping the current marker.
    pub fn join<S: AsRef<str>>(&self, suffix: &[S]) -> Result<Name, NameError> {
        let mut components = self.components.clone();
        components.extend(suffix.iter().map(|s| s.as_ref().to_string()));
        Name::new(components, self.fuzzy_index)
    }

    /// Component-wise prefix test; markers are ignored.
    pub fn is_prefix_of(&self, name: &Name) -> bool {
        self.components.len() <= name.components.len()
            && self
                .components
                .iter()
                .zip(&name.components)
                .all(|(a, b)| a == b)
    }

    /// Same component sequence, regardless of markers.
    pub fn same_components(&self, other: &Name) -> bool {
        self.components == other.components
    }

    pub fn split_fuzzy(&self) -> FuzzySplit<'_> {
        match self.fuzzy_index {
            Some(idx) => FuzzySplit {
                exact_prefix: &self.components[..idx],
                fuzzy_component: Some(&self.components[idx]),
                suffix: &self.components[idx + 1..],
            },
            None => FuzzySplit {
                exact_prefix: &self.components,
                fuzzy_component: None,
                suffix: &[],
            },
        }
    }
}

/// Borrowed view of a name cut around its fuzzy component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzySplit<'a> {
    pub exact_prefix: &'a [String],
    pub fuzzy_component: Option<&'a str>,
    pub suffix: &'a [String],
}

impl FuzzySplit<'_> {
    pub fn exact_prefix_name(&self) -> Name {
        Name {
            components: self.exact_prefix.to_vec(),
            fuzzy_index: None,
        }
    }

    /// Puts the pieces back together in order.
    pub fn reassemble(&self) -> Vec<String> {
        let mut out = self.exact_prefix.to_vec();
        out.extend(self.fuzzy_component.map(str::to_string));
        out.extend(self.suffix.iter().cloned());
        out
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            f.write_str("/")?;
            if self.fuzzy_index == Some(i) {
                write!(f, "{FUZZY_MARKER}")?;
            }
            f.write_str(c)?;
        }
        Ok(())
    }
}

impl FromStr for Name {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Name::parse(s)
    }
}
