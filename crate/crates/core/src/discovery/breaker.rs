use rayon::prelude::*;

use crate::dataset::IndexedDataset;
use crate::pattern::Pattern;

use super::{Algorithm, Discovery, DiscoveryStats, MupSet, RunOptions, Tracer};

/// Top-down, level-by-level traversal of the Rule-1 tree.
pub fn pattern_breaker(ds: &IndexedDataset, tau: u64) -> Discovery {
    run(ds, tau, &RunOptions::defaults())
}

// A candidate with an uncovered parent is exactly one dominated by a MUP of a
// lower level, all of which are known once the previous level is done. So the
// parent check is a dominance query and the previous level need not be kept.
pub(crate) fn run(ds: &IndexedDataset, tau: u64, opts: &RunOptions) -> Discovery {
    let schema = ds.schema();
    let level_cap = opts.level_cap(schema.d());
    let mut mups = MupSet::new(schema, tau);
    let mut stats = DiscoveryStats::default();
    let mut complete = true;
    let mut queue = vec![Pattern::root(schema.d())];
    stats.candidates = 1;

    for level in 0..=level_cap {
        if queue.is_empty() {
            break;
        }
        if opts.expired() {
            complete = false;
            break;
        }
        let live: Vec<Pattern> = queue
            .into_iter()
            .filter(|p| !mups.dominated_by_mups(p))
            .collect();
        let coverages: Vec<u64> = if opts.parallel {
            stats.coverage_queries += live.len() as u64;
            if opts.trace {
                stats.trace.extend(live.iter().cloned());
            }
            live.par_iter().map(|p| ds.coverage_unchecked(p)).collect()
        } else {
            let mut tracer = Tracer::new(opts.trace, &mut stats);
            let mut out = Vec::with_capacity(live.len());
            for p in &live {
                if opts.expired() {
                    break;
                }
                out.push(tracer.query(ds, p));
            }
            out
        };
        if coverages.len() < live.len() {
            complete = false;
        }
        let mut next = Vec::new();
        for (p, cov) in live.into_iter().zip(coverages) {
            if cov < tau {
                mups.insert(p);
            } else if level < level_cap {
                next.extend(p.children_rule1(schema));
            }
        }
        stats.candidates += next.len() as u64;
        if !complete {
            break;
        }
        queue = next;
    }

    Discovery {
        mups,
        algorithm: Algorithm::Breaker,
        threshold: tau,
        max_level: opts.max_level,
        complete,
        stats,
    }
}
