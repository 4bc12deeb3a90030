//! Validation rules that mark value combinations as semantically invalid.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::schema::Schema;

/// A conjunction of (attribute, allowed value set) clauses. A pattern
/// satisfies the rule when every clause's attribute is deterministic with a
/// value from the clause's set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationRule {
    clauses: Vec<(usize, BTreeSet<u32>)>,
}

impl ValidationRule {
    pub fn new(schema: &Schema, clauses: Vec<(usize, BTreeSet<u32>)>) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::Invalid("a validation rule needs at least one clause".into()));
        }
        let mut seen = BTreeSet::new();
        for (attr, values) in &clauses {
            if *attr >= schema.d() {
                return Err(Error::Invalid(format!("rule references attribute {attr}")));
            }
            if !seen.insert(*attr) {
                return Err(Error::Invalid(format!(
                    "rule names attribute `{}` twice",
                    schema.attribute(*attr).name
                )));
            }
            if values.is_empty() {
                return Err(Error::Invalid(format!(
                    "rule clause for `{}` has no values",
                    schema.attribute(*attr).name
                )));
            }
            if let Some(&v) = values.iter().find(|&&v| v >= schema.cardinality(*attr)) {
                return Err(Error::ValueOutOfRange {
                    attribute: *attr,
                    value: v,
                    cardinality: schema.cardinality(*attr),
                });
            }
        }
        Ok(ValidationRule { clauses })
    }

    pub fn clauses(&self) -> &[(usize, BTreeSet<u32>)] {
        &self.clauses
    }

    pub fn satisfied_by(&self, p: &Pattern) -> bool {
        self.clauses
            .iter()
            .all(|(i, vs)| p.get(*i).is_some_and(|v| vs.contains(&v)))
    }

    /// Satisfied by every completion of `prefix` (values for the first
    /// `prefix.len()` attributes).
    fn satisfied_by_prefix(&self, prefix: &[u32]) -> bool {
        self.clauses
            .iter()
            .all(|(i, vs)| prefix.get(*i).is_some_and(|v| vs.contains(v)))
    }

    fn last_attribute(&self) -> usize {
        self.clauses.iter().map(|(i, _)| *i).max().unwrap_or(0)
    }
}

/// Accepts a pattern iff it satisfies none of its rules.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationOracle {
    rules: Vec<ValidationRule>,
}

impl ValidationOracle {
    pub fn new(rules: Vec<ValidationRule>) -> Self {
        ValidationOracle { rules }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn rules(&self) -> &[ValidationRule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn validate(&self, p: &Pattern) -> bool {
        !self.rules.iter().any(|r| r.satisfied_by(p))
    }

    pub fn validate_combination(&self, values: &[u32]) -> bool {
        !self.rules.iter().any(|r| r.satisfied_by_prefix(values))
    }

    /// True if some rule is already satisfied by the partial combination,
    /// in which case every completion is invalid. Only rules whose last
    /// attribute is the newest prefix position are examined; shorter
    /// prefixes were checked on the way down.
    pub fn rejects_new_prefix(&self, prefix: &[u32]) -> bool {
        let Some(last) = prefix.len().checked_sub(1) else {
            return false;
        };
        self.rules
            .iter()
            .any(|r| r.last_attribute() == last && r.satisfied_by_prefix(prefix))
    }

    /// Builds rules from a label-based document.
    pub fn from_document(doc: &RulesDocument, schema: &Schema) -> Result<Self> {
        let mut rules = Vec::with_capacity(doc.rules.len());
        for entry in &doc.rules {
            let mut clauses = Vec::with_capacity(entry.len());
            for (name, labels) in entry {
                let i = schema
                    .position(name)
                    .ok_or_else(|| Error::Invalid(format!("rule names unknown attribute `{name}`")))?;
                let attr = schema.attribute(i);
                let values = labels
                    .iter()
                    .map(|l| {
                        attr.code_of(l).ok_or_else(|| Error::UnknownValue {
                            attribute: name.clone(),
                            value: l.clone(),
                        })
                    })
                    .collect::<Result<BTreeSet<u32>>>()?;
                clauses.push((i, values));
            }
            rules.push(ValidationRule::new(schema, clauses)?);
        }
        Ok(ValidationOracle { rules })
    }

    pub fn to_document(&self, schema: &Schema) -> RulesDocument {
        RulesDocument {
            rules: self
                .rules
                .iter()
                .map(|r| {
                    r.clauses
                        .iter()
                        .map(|(i, vs)| {
                            let a = schema.attribute(*i);
                            (
                                a.name.clone(),
                                vs.iter().map(|&v| a.label(v).to_string()).collect(),
                            )
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// On-disk form: one map per rule from attribute name to value labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RulesDocument {
    pub rules: Vec<BTreeMap<String, Vec<String>>>,
}

impl RulesDocument {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
