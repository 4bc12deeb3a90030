use crate::dataset::IndexedDataset;
use crate::error::{Error, Result};
use crate::pattern::{graph_stats, Pattern};

use super::{Algorithm, Discovery, DiscoveryStats, MupSet, RunOptions};

pub const DEFAULT_NODE_CAP: u64 = 1_000_000;

/// Counts every pattern in one pass over the distinct combinations, then
/// drops each uncovered pattern that another uncovered pattern dominates.
pub fn naive_mups(ds: &IndexedDataset, tau: u64) -> Result<Discovery> {
    run(ds, tau, &RunOptions::defaults())
}

pub(crate) fn run(ds: &IndexedDataset, tau: u64, opts: &RunOptions) -> Result<Discovery> {
    let schema = ds.schema();
    let d = schema.d();
    let total = graph_stats(schema)?.total_nodes;
    if total > opts.node_cap {
        return Err(Error::GraphTooLarge {
            what: format!("{total} patterns exceed the naive cap of {}", opts.node_cap),
        });
    }
    // Mixed radix: digit `c_i` at position i stands for the wildcard.
    let radix: Vec<u64> = schema.cardinalities().iter().map(|&c| c as u64 + 1).collect();
    let mut counts = vec![0u64; total as usize];
    let mut stats = DiscoveryStats::default();
    for (combo, &cnt) in ds.combos().iter().zip(ds.counts()) {
        stats.coverage_queries += 1;
        for mask in 0u64..(1 << d) {
            let mut idx = 0u64;
            for i in 0..d {
                let digit = if mask >> i & 1 == 1 {
                    radix[i] - 1
                } else {
                    combo[i] as u64
                };
                idx = idx * radix[i] + digit;
            }
            counts[idx as usize] += cnt;
        }
    }

    let level_cap = opts.level_cap(d);
    let mut uncovered: Vec<Pattern> = Vec::new();
    for (idx, &cnt) in counts.iter().enumerate() {
        if cnt < tau {
            let mut rest = idx as u64;
            let mut elems = vec![None; d];
            for i in (0..d).rev() {
                let digit = rest % radix[i];
                rest /= radix[i];
                if digit + 1 != radix[i] {
                    elems[i] = Some(digit as u32);
                }
            }
            let p = Pattern::new(elems);
            if p.level() <= level_cap {
                uncovered.push(p);
            }
        }
    }
    stats.uncovered_seen = uncovered.len() as u64;
    stats.candidates = total;

    let mut mups = MupSet::new(schema, tau);
    for p in &uncovered {
        if !uncovered.iter().any(|q| q.dominates(p)) {
            mups.insert(p.clone());
        }
    }
    Ok(Discovery {
        mups,
        algorithm: Algorithm::Naive,
        threshold: tau,
        max_level: opts.max_level,
        complete: true,
        stats,
    })
}
