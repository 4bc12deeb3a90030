//! Target pattern sets for coverage enhancement.

use std::collections::HashSet;

use crate::bits::BitVec;
use crate::dataset::IndexedDataset;
use crate::discovery::Discovery;
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::schema::Schema;

/// Uncovered patterns to be hit, with their current coverage and the
/// per (attribute, value) hit index. Bit `k` of `hit_vector(i, v)` is set iff
/// target `k` has `X` or `v` at position `i`.
#[derive(Clone, Debug)]
pub struct TargetSet {
    tau: u64,
    patterns: Vec<Pattern>,
    coverage: Vec<u64>,
    hit_index: Vec<Vec<BitVec>>,
}

impl TargetSet {
    /// Builds the hit index. `coverage[k]` is the current coverage of
    /// `patterns[k]`.
    pub fn new(schema: &Schema, tau: u64, patterns: Vec<Pattern>, coverage: Vec<u64>) -> Result<Self> {
        if patterns.len() != coverage.len() {
            return Err(Error::Invalid(format!(
                "{} target patterns but {} coverage values",
                patterns.len(),
                coverage.len()
            )));
        }
        for p in &patterns {
            p.check(schema)?;
        }
        let m = patterns.len();
        let mut hit_index: Vec<Vec<BitVec>> = schema
            .cardinalities()
            .iter()
            .map(|&c| (0..c).map(|_| BitVec::zeros(m)).collect())
            .collect();
        for (k, p) in patterns.iter().enumerate() {
            for (i, row) in hit_index.iter_mut().enumerate() {
                match p.get(i) {
                    Some(v) => row[v as usize].set(k, true),
                    None => row.iter_mut().for_each(|b| b.set(k, true)),
                }
            }
        }
        Ok(TargetSet {
            tau,
            patterns,
            coverage,
            hit_index,
        })
    }

    /// Measures each pattern's coverage against `ds` and keeps the
    /// uncovered ones.
    pub fn from_dataset(ds: &IndexedDataset, tau: u64, patterns: Vec<Pattern>) -> Result<Self> {
        let mut kept = Vec::with_capacity(patterns.len());
        let mut coverage = Vec::with_capacity(patterns.len());
        for p in patterns {
            let c = ds.coverage(&p)?;
            if c < tau {
                kept.push(p);
                coverage.push(c);
            }
        }
        Self::new(ds.schema(), tau, kept, coverage)
    }

    pub fn tau(&self) -> u64 {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn d(&self) -> usize {
        self.hit_index.len()
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn coverage(&self, k: usize) -> u64 {
        self.coverage[k]
    }

    /// Tuples still needed for target `k` to reach the threshold.
    pub fn deficit(&self, k: usize) -> u64 {
        self.tau.saturating_sub(self.coverage[k])
    }

    pub(crate) fn hit_index_cardinality(&self, attribute: usize) -> u32 {
        self.hit_index[attribute].len() as u32
    }

    pub fn hit_vector(&self, attribute: usize, value: u32) -> &BitVec {
        &self.hit_index[attribute][value as usize]
    }

    /// All-ones vector over the targets.
    pub fn all(&self) -> BitVec {
        BitVec::ones(self.len())
    }

    /// Targets in `remaining` that `combination` hits, by ANDing one hit
    /// vector per attribute.
    pub fn filter_walk(&self, combination: &[u32], remaining: &BitVec) -> BitVec {
        assert_eq!(combination.len(), self.d(), "combination arity");
        let mut f = remaining.clone();
        for (i, &v) in combination.iter().enumerate() {
            f.and_assign(self.hit_vector(i, v));
        }
        f
    }
}

/// Replaces every pattern with level at most `lambda` by all of its
/// descendants at exactly `lambda`. Higher-level patterns are dropped.
/// Output is deduplicated and keeps first-seen order.
pub fn expand_to_level(patterns: &[Pattern], schema: &Schema, lambda: usize) -> Result<Vec<Pattern>> {
    if lambda == 0 || lambda > schema.d() {
        return Err(Error::LevelOutOfRange { level: lambda, d: schema.d() });
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for p in patterns {
        p.check(schema)?;
        if p.level() > lambda {
            continue;
        }
        let free: Vec<usize> = (0..p.d()).filter(|&i| p.is_wildcard(i)).collect();
        let k = lambda - p.level();
        for_each_subset(free.len(), k, |pick| {
            let positions: Vec<usize> = pick.iter().map(|&j| free[j]).collect();
            let mut q = p.clone();
            fill(&mut q, &positions, schema, &mut |d| {
                if seen.insert(d.clone()) {
                    out.push(d.clone());
                }
            });
        });
    }
    Ok(out)
}

/// Calls `f` with each k-subset of `0..n`, in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn fill(p: &mut Pattern, positions: &[usize], schema: &Schema, f: &mut impl FnMut(&Pattern)) {
    match positions.split_first() {
        None => f(p),
        Some((&i, rest)) => {
            for v in 0..schema.cardinality(i) {
                *p = p.with(i, Some(v));
                fill(p, rest, schema, f);
            }
            *p = p.with(i, None);
        }
    }
}

/// Every uncovered pattern at level `lambda`, derived from a discovery that
/// is complete at least to `lambda`.
pub fn uncovered_at_level(ds: &IndexedDataset, discovery: &Discovery, lambda: usize) -> Result<TargetSet> {
    if lambda == 0 || lambda > ds.d() {
        return Err(Error::LevelOutOfRange { level: lambda, d: ds.d() });
    }
    if !discovery.complete_to(lambda) {
        return Err(Error::IncompleteMups(lambda));
    }
    let patterns = expand_to_level(discovery.mups.patterns(), ds.schema(), lambda)?;
    TargetSet::from_dataset(ds, discovery.threshold, patterns)
}

/// Targets for the value-count variant: uncovered patterns whose value count
/// is at least `min_value_count`, reduced to the most specific ones (those
/// whose children all fall below the bound). Hitting these hits every
/// uncovered pattern above the bound. With `material`, only descendants (or
/// copies) of those patterns are kept.
pub fn uncovered_with_value_count(
    ds: &IndexedDataset,
    tau: u64,
    min_value_count: u64,
    material: Option<&[Pattern]>,
) -> Result<TargetSet> {
    let schema = ds.schema();
    if min_value_count == 0 {
        return Err(Error::Invalid("minimum value count must be at least 1".into()));
    }
    if let Some(m) = material {
        for p in m {
            p.check(schema)?;
        }
    }
    let cards = schema.cardinalities();
    let mut out = Vec::new();
    let mut coverage = Vec::new();
    let mut stack = vec![Pattern::root(ds.d())];
    while let Some(p) = stack.pop() {
        let vc = p.value_count(schema);
        let children = p.children_rule1(schema);
        for c in children.iter().rev() {
            if c.value_count(schema) >= min_value_count {
                stack.push(c.clone());
            }
        }
        let leaf = (0..p.d())
            .filter(|&i| p.is_wildcard(i))
            .all(|i| vc / u64::from(cards[i]) < min_value_count);
        if !leaf {
            continue;
        }
        if let Some(m) = material {
            if !m.iter().any(|q| q == &p || q.dominates(&p)) {
                continue;
            }
        }
        let c = ds.coverage(&p)?;
        if c < tau {
            out.push(p);
            coverage.push(c);
        }
    }
    TargetSet::new(schema, tau, out, coverage)
}
