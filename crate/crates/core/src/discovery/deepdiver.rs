use std::collections::HashMap;

use crate::dataset::IndexedDataset;
use crate::pattern::Pattern;

use super::{Algorithm, Discovery, DiscoveryStats, MupSet, RunOptions, Tracer};

/// Depth-first dive along the Rule-1 tree with MUP-dominance pruning.
/// With `max_level`, returns exactly the MUPs of level at most `max_level`.
pub fn deep_diver(ds: &IndexedDataset, tau: u64, max_level: Option<usize>) -> Discovery {
    let opts = RunOptions {
        max_level,
        ..RunOptions::defaults()
    };
    run(ds, tau, &opts)
}

struct Diver<'a> {
    ds: &'a IndexedDataset,
    tau: u64,
    mups: MupSet,
    memo: HashMap<Pattern, u64>,
    stats: DiscoveryStats,
    trace: bool,
}

impl Diver<'_> {
    fn covered(&mut self, p: &Pattern) -> bool {
        // Ancestors of a MUP are covered.
        if self.mups.dominates_mups(p) {
            return true;
        }
        let cov = match self.memo.get(p) {
            Some(&c) => c,
            None => {
                let c = Tracer::new(self.trace, &mut self.stats).query(self.ds, p);
                self.memo.insert(p.clone(), c);
                c
            }
        };
        cov >= self.tau
    }

    /// From an uncovered node, move to the first uncovered parent (position
    /// order) until every parent is covered.
    fn climb(&mut self, mut p: Pattern) -> Pattern {
        loop {
            let next = p.parents().into_iter().find(|q| !self.covered(q));
            match next {
                Some(q) => p = q,
                None => return p,
            }
        }
    }
}

/// Climbs from an uncovered pattern to the MUP above it.
pub fn climb_to_mup(ds: &IndexedDataset, tau: u64, p: &Pattern) -> Pattern {
    let mut diver = Diver {
        ds,
        tau,
        mups: MupSet::new(ds.schema(), tau),
        memo: HashMap::new(),
        stats: DiscoveryStats::default(),
        trace: false,
    };
    diver.climb(p.clone())
}

pub(crate) fn run(ds: &IndexedDataset, tau: u64, opts: &RunOptions) -> Discovery {
    let schema = ds.schema();
    let level_cap = opts.level_cap(schema.d());
    let mut diver = Diver {
        ds,
        tau,
        mups: MupSet::new(schema, tau),
        memo: HashMap::new(),
        stats: DiscoveryStats::default(),
        trace: opts.trace,
    };
    let mut complete = true;
    let mut stack = vec![Pattern::root(schema.d())];
    diver.stats.candidates = 1;

    while let Some(p) = stack.pop() {
        if opts.expired() {
            complete = false;
            break;
        }
        if diver.mups.dominated_by_mups(&p) {
            continue;
        }
        let uncovered = if diver.mups.dominates_mups(&p) {
            false
        } else {
            // Climb results are memoized; dive results are not, since the
            // Rule-1 tree pops each node once.
            let cov = match diver.memo.get(&p) {
                Some(&c) => c,
                None => Tracer::new(diver.trace, &mut diver.stats).query(ds, &p),
            };
            cov < tau
        };
        if uncovered {
            let mup = diver.climb(p);
            diver.mups.insert(mup);
        } else if p.level() < level_cap {
            let children = p.children_rule1(schema);
            diver.stats.candidates += children.len() as u64;
            stack.extend(children.into_iter().rev());
        }
    }

    Discovery {
        mups: diver.mups,
        algorithm: Algorithm::Deepdiver,
        threshold: tau,
        max_level: opts.max_level,
        complete,
        stats: diver.stats,
    }
}
