use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
    /// Sort name per argument position, for multi-sorted structures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sorts: Option<Vec<String>>,
}

impl RelationSymbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        RelationSymbol {
            name: name.into(),
            arity,
            sorts: None,
        }
    }

    pub fn with_sorts(name: impl Into<String>, sorts: Vec<String>) -> Self {
        RelationSymbol {
            name: name.into(),
            arity: sorts.len(),
            sorts: Some(sorts),
        }
    }
}

/// A relational signature, kept sorted by relation name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    relations: Vec<RelationSymbol>,
}

impl Signature {
    pub fn new(mut relations: Vec<RelationSymbol>) -> Result<Self> {
        relations.sort_by(|a, b| a.name.cmp(&b.name));
        let mut seen = HashSet::new();
        for r in &relations {
            if !seen.insert(r.name.as_str()) {
                return Err(Error::input(format!("duplicate relation name {:?}", r.name)));
            }
            if r.arity == 0 {
                return Err(Error::input(format!("relation {:?} has arity 0", r.name)));
            }
            if let Some(s) = &r.sorts {
                if s.len() != r.arity {
                    return Err(Error::input(format!(
                        "relation {:?} has arity {} but {} sort annotations",
                        r.name,
                        r.arity,
                        s.len()
                    )));
                }
            }
        }
        Ok(Signature { relations })
    }

    pub fn relations(&self) -> &[RelationSymbol] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations
            .binary_search_by(|r| r.name.as_str().cmp(name))
            .ok()
    }

    pub fn max_arity(&self) -> usize {
        self.relations.iter().map(|r| r.arity).max().unwrap_or(0)
    }
}
