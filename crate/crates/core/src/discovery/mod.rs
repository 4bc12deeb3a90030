//! Maximal uncovered pattern (MUP) discovery.
//!
//! Four engines share one contract: given an [`IndexedDataset`] and a
//! threshold `τ`, return every pattern with coverage below `τ` whose parents
//! all have coverage at least `τ`.
//!
//! * [`naive_mups`] counts every pattern of the graph and filters by pairwise
//!   dominance. Exponential in `d`; used as a reference.
//! * [`pattern_breaker`] walks top-down, level by level.
//! * [`pattern_combiner`] walks bottom-up from the fully specified
//!   combinations, summing child coverages.
//! * [`deep_diver`] dives depth-first to an uncovered node, climbs to the MUP
//!   above it, and prunes everything the known MUPs dominate or are dominated by.

mod breaker;
mod combiner;
mod deepdiver;
mod dominance;
mod naive;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dataset::IndexedDataset;
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::schema::Schema;

pub use breaker::pattern_breaker;
pub use combiner::pattern_combiner;
pub use deepdiver::{climb_to_mup, deep_diver};
pub use dominance::DominanceIndex;
pub use naive::{naive_mups, DEFAULT_NODE_CAP};

/// Coverage threshold, absolute or as a fraction of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Threshold {
    Count(u64),
    Rate(f64),
}

impl Threshold {
    /// Absolute count: a rate becomes `ceil(rate * n)`, at least 1.
    pub fn resolve(&self, n: u64) -> Result<u64> {
        match *self {
            Threshold::Count(c) => Ok(c),
            Threshold::Rate(r) if r.is_finite() && r > 0.0 && r <= 1.0 => {
                Ok(((r * n as f64).ceil() as u64).max(1))
            }
            Threshold::Rate(r) => Err(Error::Threshold(format!(
                "rate {r} must lie in (0, 1]"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Naive,
    Breaker,
    Combiner,
    Deepdiver,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Naive,
        Algorithm::Breaker,
        Algorithm::Combiner,
        Algorithm::Deepdiver,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::Breaker => "breaker",
            Algorithm::Combiner => "combiner",
            Algorithm::Deepdiver => "deepdiver",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct DiscoveryConfig {
    pub algorithm: Algorithm,
    pub threshold: Threshold,
    /// Only report MUPs up to this level.
    pub max_level: Option<usize>,
    /// Wall-clock budget; an expired run returns what it confirmed so far.
    pub time_budget: Option<Duration>,
    /// Evaluate sibling coverage queries on the rayon pool (breaker only).
    pub parallel: bool,
    /// Record every pattern whose coverage was queried.
    pub trace: bool,
    /// Pattern-graph size limit for the naive engine.
    pub node_cap: u64,
}

impl DiscoveryConfig {
    pub fn new(algorithm: Algorithm, threshold: Threshold) -> Self {
        DiscoveryConfig {
            algorithm,
            threshold,
            max_level: None,
            time_budget: None,
            parallel: false,
            trace: false,
            node_cap: DEFAULT_NODE_CAP,
        }
    }
}

/// Options shared by the engines once the threshold is resolved.
#[derive(Clone, Debug, Default)]
pub(crate) struct RunOptions {
    pub max_level: Option<usize>,
    pub deadline: Option<Instant>,
    pub parallel: bool,
    pub trace: bool,
    pub node_cap: u64,
}

impl RunOptions {
    pub(crate) fn defaults() -> Self {
        RunOptions {
            node_cap: DEFAULT_NODE_CAP,
            ..Default::default()
        }
    }

    pub(crate) fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    pub(crate) fn level_cap(&self, d: usize) -> usize {
        self.max_level.map_or(d, |l| l.min(d))
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DiscoveryStats {
    /// Coverage evaluations against the index (or the data pass, for naive).
    pub coverage_queries: u64,
    /// Candidate nodes generated.
    pub candidates: u64,
    /// Uncovered patterns seen before maximality filtering (naive only).
    pub uncovered_seen: u64,
    /// Patterns whose coverage was queried, in order; only with `trace`.
    #[serde(skip)]
    pub trace: Vec<Pattern>,
}

/// A set of MUPs plus the dominance index over them.
#[derive(Clone, Debug)]
pub struct MupSet {
    threshold: u64,
    mups: Vec<Pattern>,
    index: DominanceIndex,
}

impl MupSet {
    pub fn new(schema: &Schema, threshold: u64) -> Self {
        MupSet {
            threshold,
            mups: Vec::new(),
            index: DominanceIndex::new(schema.cardinalities()),
        }
    }

    pub fn from_patterns<I: IntoIterator<Item = Pattern>>(
        schema: &Schema,
        threshold: u64,
        patterns: I,
    ) -> Self {
        let mut ms = MupSet::new(schema, threshold);
        for p in patterns {
            ms.insert(p);
        }
        ms
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn insert(&mut self, p: Pattern) {
        self.index.push(&p);
        self.mups.push(p);
    }

    /// Patterns in discovery order.
    pub fn patterns(&self) -> &[Pattern] {
        &self.mups
    }

    /// Patterns ordered by level, then element-wise.
    pub fn sorted(&self) -> Vec<Pattern> {
        let mut v = self.mups.clone();
        v.sort_by(|a, b| a.level().cmp(&b.level()).then_with(|| a.cmp(b)));
        v
    }

    pub fn len(&self) -> usize {
        self.mups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mups.is_empty()
    }

    pub fn index(&self) -> &DominanceIndex {
        &self.index
    }

    /// Some member equals or dominates `p`.
    pub fn dominated_by_mups(&self, p: &Pattern) -> bool {
        self.index.dominated(p)
    }

    /// `p` equals or dominates some member.
    pub fn dominates_mups(&self, p: &Pattern) -> bool {
        self.index.dominates(p)
    }

    /// MUP count per level.
    pub fn level_histogram(&self) -> BTreeMap<usize, usize> {
        level_histogram(&self.mups)
    }

    /// Smallest MUP level minus one; `d` when there are none, `-1` when the
    /// root itself is uncovered.
    pub fn max_covered_level(&self, d: usize) -> i64 {
        max_covered_level(&self.mups, d)
    }
}

pub fn level_histogram(patterns: &[Pattern]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for p in patterns {
        *h.entry(p.level()).or_insert(0) += 1;
    }
    h
}

pub fn max_covered_level(patterns: &[Pattern], d: usize) -> i64 {
    patterns
        .iter()
        .map(|p| p.level() as i64 - 1)
        .min()
        .unwrap_or(d as i64)
}

/// Outcome of one discovery run.
#[derive(Clone, Debug)]
pub struct Discovery {
    pub mups: MupSet,
    pub algorithm: Algorithm,
    pub threshold: u64,
    pub max_level: Option<usize>,
    /// False when the time budget ran out; `mups` then holds only confirmed MUPs.
    pub complete: bool,
    pub stats: DiscoveryStats,
}

impl Discovery {
    /// Whether the MUP set is known to contain every MUP up to `level`.
    pub fn complete_to(&self, level: usize) -> bool {
        self.complete && self.max_level.is_none_or(|l| l >= level)
    }
}

/// Runs the configured engine.
pub fn discover(ds: &IndexedDataset, config: &DiscoveryConfig) -> Result<Discovery> {
    let tau = config.threshold.resolve(ds.n())?;
    if let Some(l) = config.max_level {
        if l == 0 || l > ds.d() {
            return Err(Error::LevelOutOfRange { level: l, d: ds.d() });
        }
    }
    let opts = RunOptions {
        max_level: config.max_level,
        deadline: config.time_budget.map(|b| Instant::now() + b),
        parallel: config.parallel,
        trace: config.trace,
        node_cap: config.node_cap,
    };
    match config.algorithm {
        Algorithm::Naive => naive::run(ds, tau, &opts),
        Algorithm::Breaker => Ok(breaker::run(ds, tau, &opts)),
        Algorithm::Combiner => combiner::run(ds, tau, &opts),
        Algorithm::Deepdiver => Ok(deepdiver::run(ds, tau, &opts)),
    }
}

pub(crate) struct Tracer<'a> {
    enabled: bool,
    stats: &'a mut DiscoveryStats,
}

impl<'a> Tracer<'a> {
    pub(crate) fn new(enabled: bool, stats: &'a mut DiscoveryStats) -> Self {
        Tracer { enabled, stats }
    }

    pub(crate) fn query(&mut self, ds: &IndexedDataset, p: &Pattern) -> u64 {
        self.stats.coverage_queries += 1;
        if self.enabled {
            self.stats.trace.push(p.clone());
        }
        ds.coverage_unchecked(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> Schema {
        Schema::binary(3)
    }

    fn p(s: &str) -> Pattern {
        Pattern::parse(s, &s3()).unwrap()
    }

    #[test]
    fn threshold_resolution() {
        assert_eq!(Threshold::Count(7).resolve(100).unwrap(), 7);
        assert_eq!(Threshold::Rate(1.0).resolve(37).unwrap(), 37);
        assert_eq!(Threshold::Rate(0.001).resolve(100_000).unwrap(), 100);
        assert_eq!(Threshold::Rate(0.001).resolve(10).unwrap(), 1);
        assert!(Threshold::Rate(0.0).resolve(10).is_err());
        assert!(Threshold::Rate(1.5).resolve(10).is_err());
    }

    #[test]
    fn dominance_queries() {
        let ms = MupSet::from_patterns(&s3(), 1, [p("1XX")]);
        assert!(ms.dominated_by_mups(&p("10X")));
        assert!(ms.dominated_by_mups(&p("1XX")));
        assert!(!ms.dominated_by_mups(&p("0XX")));
        assert!(ms.dominates_mups(&p("XXX")));
        assert!(!ms.dominates_mups(&p("X0X")));

        let empty = MupSet::new(&s3(), 1);
        assert!(!empty.dominated_by_mups(&p("10X")));
        assert!(!empty.dominates_mups(&p("XXX")));
    }

    #[test]
    fn dominance_index_layout() {
        let ms = MupSet::from_patterns(&s3(), 1, [p("1XX"), p("X01")]);
        let idx = ms.index();
        assert_eq!(format!("{:?}", idx.value_vector(0, 1)), "10");
        assert_eq!(format!("{:?}", idx.wildcard_vector(0)), "01");
        assert_eq!(format!("{:?}", idx.value_vector(2, 1)), "01");
    }

    #[test]
    fn summaries() {
        let ms = MupSet::from_patterns(&s3(), 1, [p("1XX")]);
        assert_eq!(ms.max_covered_level(3), 0);
        assert_eq!(ms.level_histogram(), BTreeMap::from([(1, 1)]));
        assert_eq!(MupSet::new(&Schema::binary(5), 1).max_covered_level(5), 5);
        let root = MupSet::from_patterns(&s3(), 1, [Pattern::root(3)]);
        assert_eq!(root.max_covered_level(3), -1);
    }

    #[test]
    fn mixed_mup_summaries() {
        let s = Schema::with_cardinalities(&[2, 3, 3, 2, 2]).unwrap();
        let ps: Vec<Pattern> = ["XX01X", "1X20X", "XXXX1", "02XXX", "XX11X", "111XX", "X020X"]
            .iter()
            .map(|t| Pattern::parse(t, &s).unwrap())
            .collect();
        assert_eq!(max_covered_level(&ps, 5), 0);
        assert_eq!(level_histogram(&ps), BTreeMap::from([(1, 1), (2, 3), (3, 3)]));
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("apriori".parse::<Algorithm>().is_err());
    }
}
