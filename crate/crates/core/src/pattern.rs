//! Pattern algebra over a [`Schema`]: parsing, levels, value counts,
//! dominance, parent/child enumeration and the two generator rules that turn
//! the pattern graph into a tree (top-down) or a forest (bottom-up).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::Schema;

/// A length-`d` vector whose elements are either a value code or the
/// wildcard (`None`, written `X`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pattern(Vec<Option<u32>>);

impl Pattern {
    pub fn new(elements: Vec<Option<u32>>) -> Self {
        Pattern(elements)
    }

    /// The all-wildcard pattern.
    pub fn root(d: usize) -> Self {
        Pattern(vec![None; d])
    }

    /// The fully deterministic pattern for a value combination.
    pub fn from_combination(values: &[u32]) -> Self {
        Pattern(values.iter().copied().map(Some).collect())
    }

    pub fn elements(&self) -> &[Option<u32>] {
        &self.0
    }

    pub fn d(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize) -> Option<u32> {
        self.0[i]
    }

    pub fn is_wildcard(&self, i: usize) -> bool {
        self.0[i].is_none()
    }

    /// Number of deterministic elements.
    pub fn level(&self) -> usize {
        self.0.iter().filter(|e| e.is_some()).count()
    }

    /// The value combination, when every element is deterministic.
    pub fn as_combination(&self) -> Option<Vec<u32>> {
        self.0.iter().copied().collect()
    }

    /// Copy of `self` with position `i` set to `value`.
    pub fn with(&self, i: usize, value: Option<u32>) -> Pattern {
        let mut p = self.clone();
        p.0[i] = value;
        p
    }

    pub fn rightmost_deterministic(&self) -> Option<usize> {
        self.0.iter().rposition(Option::is_some)
    }

    pub fn rightmost_wildcard(&self) -> Option<usize> {
        self.0.iter().rposition(Option::is_none)
    }

    /// Checks arity and value ranges against `schema`.
    pub fn check(&self, schema: &Schema) -> Result<()> {
        if self.d() != schema.d() {
            return Err(Error::Arity {
                expected: schema.d(),
                found: self.d(),
            });
        }
        for (i, e) in self.0.iter().enumerate() {
            if let Some(v) = *e {
                let c = schema.cardinality(i);
                if v >= c {
                    return Err(Error::ValueOutOfRange {
                        attribute: i,
                        value: v,
                        cardinality: c,
                    });
                }
            }
        }
        Ok(())
    }

    /// Whether the value combination `t` matches: every deterministic
    /// element agrees with `t`. Panics if the arities differ.
    pub fn matches(&self, t: &[u32]) -> bool {
        assert_eq!(t.len(), self.d(), "tuple/pattern arity mismatch");
        self.0.iter().zip(t).all(|(e, &v)| e.is_none_or(|p| p == v))
    }

    /// Number of value combinations matching `self`: the product of the
    /// cardinalities at wildcard positions (saturating).
    pub fn value_count(&self, schema: &Schema) -> u64 {
        self.0
            .iter()
            .zip(schema.cardinalities())
            .filter(|(e, _)| e.is_none())
            .fold(1u64, |acc, (_, &c)| acc.saturating_mul(c as u64))
    }

    /// Strict dominance: `self` is more general than `other` and agrees with
    /// it on all of its own deterministic positions.
    pub fn dominates(&self, other: &Pattern) -> bool {
        debug_assert_eq!(self.d(), other.d());
        let mut strictly_more_general = false;
        for (g, s) in self.0.iter().zip(&other.0) {
            match (g, s) {
                (None, None) => {}
                (None, Some(_)) => strictly_more_general = true,
                (Some(_), None) => return false,
                (Some(a), Some(b)) if a != b => return false,
                _ => {}
            }
        }
        strictly_more_general
    }

    /// All parents: each deterministic element in turn replaced by `X`,
    /// in position order.
    pub fn parents(&self) -> Vec<Pattern> {
        (0..self.d())
            .filter(|&i| self.0[i].is_some())
            .map(|i| self.with(i, None))
            .collect()
    }

    /// All children: each wildcard in turn replaced by each value.
    pub fn children(&self, schema: &Schema) -> Vec<Pattern> {
        self.children_from(0, schema)
    }

    /// Top-down generator. Only wildcards strictly right of the right-most
    /// deterministic element are filled; emitted by position then value.
    pub fn children_rule1(&self, schema: &Schema) -> Vec<Pattern> {
        let start = self.rightmost_deterministic().map_or(0, |i| i + 1);
        self.children_from(start, schema)
    }

    fn children_from(&self, start: usize, schema: &Schema) -> Vec<Pattern> {
        let mut out = Vec::new();
        for i in start..self.d() {
            if self.0[i].is_none() {
                for v in 0..schema.cardinality(i) {
                    out.push(self.with(i, Some(v)));
                }
            }
        }
        out
    }

    /// Bottom-up generator. Deterministic elements equal to `0` lying strictly
    /// right of the right-most wildcard are wildcarded one at a time.
    pub fn parents_rule2(&self) -> Vec<Pattern> {
        let start = self.rightmost_wildcard().map_or(0, |i| i + 1);
        (start..self.d())
            .filter(|&i| self.0[i] == Some(0))
            .map(|i| self.with(i, None))
            .collect()
    }

    /// Parses either the compact syntax (`X1X0`, one character per element,
    /// allowed only when every cardinality is at most 10) or the delimited
    /// syntax (`X|1|X|0`).
    pub fn parse(text: &str, schema: &Schema) -> Result<Pattern> {
        let text = text.trim();
        let err = |reason: String| Error::PatternParse {
            text: text.to_string(),
            reason,
        };
        let tokens: Vec<&str> = if text.contains('|') || schema.d() == 1 {
            text.split('|').map(str::trim).collect()
        } else {
            if !schema.compact_ok() {
                return Err(err(
                    "compact syntax needs every cardinality <= 10; use `|`-delimited codes".into(),
                ));
            }
            text.char_indices().map(|(i, c)| &text[i..i + c.len_utf8()]).collect()
        };
        if tokens.len() != schema.d() {
            return Err(err(format!(
                "expected {} elements, found {}",
                schema.d(),
                tokens.len()
            )));
        }
        let elements = tokens
            .iter()
            .map(|t| match *t {
                "X" | "x" => Ok(None),
                t => t
                    .parse::<u32>()
                    .map(Some)
                    .map_err(|_| err(format!("`{t}` is neither a value code nor X"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let p = Pattern(elements);
        p.check(schema).map_err(|e| err(e.to_string()))?;
        Ok(p)
    }

    /// Compact form, or `None` if some value needs more than one digit.
    pub fn to_compact(&self) -> Option<String> {
        self.0
            .iter()
            .map(|e| match e {
                None => Some('X'),
                Some(v) if *v < 10 => char::from_digit(*v, 10),
                Some(_) => None,
            })
            .collect()
    }

    /// Compact form when the schema allows it, delimited otherwise.
    pub fn render(&self, schema: &Schema) -> String {
        if schema.compact_ok() {
            if let Some(s) = self.to_compact() {
                return s;
            }
        }
        self.to_string()
    }

    /// Human-readable description using attribute names and value labels.
    pub fn describe(&self, schema: &Schema) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter_map(|(i, e)| {
                e.map(|v| {
                    let a = schema.attribute(i);
                    format!("{}={}", a.name, a.label(v))
                })
            })
            .collect();
        if parts.is_empty() {
            "(any)".to_string()
        } else {
            parts.join(", ")
        }
    }
}

/// Canonical `|`-delimited form.
impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            match e {
                None => f.write_str("X")?,
                Some(v) => write!(f, "{v}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_compact() {
            Some(s) => f.write_str(&s),
            None => write!(f, "{self}"),
        }
    }
}

/// Size of the pattern graph of a schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternGraphStats {
    pub d: usize,
    pub cardinalities: Vec<u32>,
    /// Product of `c_i + 1`.
    pub total_nodes: u64,
    /// Entry `l` is the number of patterns at level `l`.
    pub nodes_per_level: Vec<u64>,
    /// Parent/child edges.
    pub total_edges: u64,
}

impl PatternGraphStats {
    pub fn nodes_at_level(&self, level: usize) -> u64 {
        self.nodes_per_level.get(level).copied().unwrap_or(0)
    }
}

/// Exact node and edge counts. Nodes at level `l` are the elementary
/// symmetric polynomial of degree `l` in the cardinalities; a node gets one
/// edge down per (wildcard position, value), so edges sum `c_i` times the
/// number of patterns with a wildcard at `i`.
pub fn graph_stats(schema: &Schema) -> Result<PatternGraphStats> {
    let cards = schema.cardinalities();
    let d = cards.len();
    let overflow = |what: &str| Error::GraphTooLarge {
        what: format!("{what} exceeds 64-bit range"),
    };

    let mut total: u128 = 1;
    for &c in cards {
        total = total.checked_mul(c as u128 + 1).ok_or_else(|| overflow("node count"))?;
    }

    let mut per_level = vec![0u128; d + 1];
    per_level[0] = 1;
    for (k, &c) in cards.iter().enumerate() {
        for l in (1..=k + 1).rev() {
            per_level[l] = per_level[l]
                .checked_add(per_level[l - 1].checked_mul(c as u128).ok_or_else(|| overflow("level count"))?)
                .ok_or_else(|| overflow("level count"))?;
        }
    }

    let mut edges: u128 = 0;
    for (i, &c) in cards.iter().enumerate() {
        let mut others: u128 = 1;
        for (j, &cj) in cards.iter().enumerate() {
            if j != i {
                others = others.checked_mul(cj as u128 + 1).ok_or_else(|| overflow("edge count"))?;
            }
        }
        edges = others
            .checked_mul(c as u128)
            .and_then(|e| edges.checked_add(e))
            .ok_or_else(|| overflow("edge count"))?;
    }

    let to64 = |x: u128, what: &str| u64::try_from(x).map_err(|_| overflow(what));
    Ok(PatternGraphStats {
        d,
        cardinalities: cards.to_vec(),
        total_nodes: to64(total, "node count")?,
        nodes_per_level: per_level
            .into_iter()
            .map(|x| to64(x, "level count"))
            .collect::<Result<_>>()?,
        total_edges: to64(edges, "edge count")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn p(s: &str, schema: &Schema) -> Pattern {
        Pattern::parse(s, schema).unwrap()
    }

    fn set(ps: Vec<Pattern>) -> HashSet<String> {
        ps.iter().map(|p| format!("{p:?}")).collect()
    }

    fn strs(xs: &[&str]) -> HashSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parse_compact_and_delimited() {
        let s4 = Schema::binary(4);
        assert_eq!(p("X1X0", &s4).elements(), &[None, Some(1), None, Some(0)]);
        let s3 = Schema::binary(3);
        let root = p("X|X|X", &s3);
        assert_eq!(root.level(), 0);
        let s5 = Schema::with_cardinalities(&[2, 3, 3, 2, 2]).unwrap();
        assert_eq!(
            p("1X20X", &s5).elements(),
            &[Some(1), None, Some(2), Some(0), None]
        );
    }

    #[test]
    fn parse_errors() {
        let s = Schema::binary(3);
        assert!(Pattern::parse("X1", &s).is_err());
        assert!(Pattern::parse("X12", &s).is_err());
        assert!(Pattern::parse("X|q|0", &s).is_err());
        let wide = Schema::with_cardinalities(&[12, 2]).unwrap();
        assert!(Pattern::parse("1X", &wide).is_err());
        assert_eq!(p("11|X", &wide).elements(), &[Some(11), None]);
        assert_eq!(p("11|X", &wide).render(&wide), "11|X");
    }

    #[test]
    fn value_counts() {
        let s4 = Schema::binary(4);
        assert_eq!(p("X1X0", &s4).value_count(&s4), 4);
        assert_eq!(p("1010", &s4).value_count(&s4), 1);
        let s3 = Schema::binary(3);
        assert_eq!(p("XXX", &s3).value_count(&s3), 8);
    }

    #[test]
    fn dominance_examples() {
        let s = Schema::binary(4);
        assert!(p("1XXX", &s).dominates(&p("10X1", &s)));
        assert!(!p("10X1", &s).dominates(&p("1XXX", &s)));
        assert!(!p("10X1", &s).dominates(&p("10X1", &s)));
        assert!(!p("X1X0", &s).dominates(&p("10X1", &s)));
        assert!(!p("10X1", &s).dominates(&p("X1X0", &s)));
    }

    #[test]
    fn parents_examples() {
        let s = Schema::binary(4);
        assert_eq!(set(p("10X1", &s).parents()), strs(&["X0X1", "1XX1", "10XX"]));
        assert!(Pattern::root(3).parents().is_empty());
    }

    #[test]
    fn rule1_examples() {
        let s = Schema::binary(3);
        assert_eq!(
            set(p("0XX", &s).children_rule1(&s)),
            strs(&["0X0", "0X1", "00X", "01X"])
        );
        assert_eq!(set(p("X1X", &s).children_rule1(&s)), strs(&["X10", "X11"]));
        assert!(p("101", &s).children_rule1(&s).is_empty());
        // Emission order: position ascending, then value ascending.
        let order: Vec<String> = p("0XX", &s)
            .children_rule1(&s)
            .iter()
            .map(|c| format!("{c:?}"))
            .collect();
        assert_eq!(order, vec!["00X", "01X", "0X0", "0X1"]);
    }

    #[test]
    fn rule2_examples() {
        let s = Schema::binary(3);
        assert_eq!(set(p("X01", &s).parents_rule2()), strs(&["XX1"]));
        assert_eq!(set(p("000", &s).parents_rule2()), strs(&["00X", "0X0", "X00"]));
        assert!(p("111", &s).parents_rule2().is_empty());
    }

    #[test]
    fn graph_stats_examples() {
        let st = graph_stats(&Schema::binary(3)).unwrap();
        assert_eq!(st.total_nodes, 27);
        assert_eq!(st.total_edges, 54);
        assert_eq!(st.nodes_at_level(1), 6);
        assert_eq!(st.nodes_at_level(2), 12);
        let one = graph_stats(&Schema::with_cardinalities(&[5]).unwrap()).unwrap();
        assert_eq!(one.total_nodes, 6);
    }

    #[test]
    fn graph_stats_overflow() {
        let big = Schema::with_cardinalities(&[1000; 10]).unwrap();
        assert!(matches!(graph_stats(&big), Err(Error::GraphTooLarge { .. })));
    }

    #[test]
    fn describe_uses_labels() {
        let s = Schema::binary(2);
        assert_eq!(p("X1", &s).describe(&s), "A2=1");
        assert_eq!(p("XX", &s).describe(&s), "(any)");
    }
}
