use std::collections::HashMap;

use crate::dataset::IndexedDataset;
use crate::error::{Error, Result};
use crate::pattern::Pattern;

use super::{Algorithm, Discovery, DiscoveryStats, MupSet, RunOptions};

/// Largest number of full value combinations the bottom level may hold.
pub const LEAF_CAP: u64 = 1 << 26;

/// Bottom-up traversal of the Rule-2 forest.
pub fn pattern_combiner(ds: &IndexedDataset, tau: u64) -> Result<Discovery> {
    run(ds, tau, &RunOptions::defaults())
}

pub(crate) fn run(ds: &IndexedDataset, tau: u64, opts: &RunOptions) -> Result<Discovery> {
    let schema = ds.schema();
    let d = schema.d();
    let cards = schema.cardinalities();
    let leaves = schema.combination_count();
    if leaves > LEAF_CAP {
        return Err(Error::GraphTooLarge {
            what: format!("{leaves} value combinations at the bottom level"),
        });
    }
    let mut stats = DiscoveryStats::default();
    let mut mups = MupSet::new(schema, tau);
    let mut complete = true;

    // One data pass gives the coverage of every fully specified pattern.
    let observed: HashMap<&[u32], u64> = ds
        .combos()
        .iter()
        .map(Vec::as_slice)
        .zip(ds.counts().iter().copied())
        .collect();
    stats.coverage_queries += ds.combos().len() as u64;

    let mut count: HashMap<Pattern, u64> = HashMap::new();
    let mut combo = vec![0u32; d];
    'leaves: loop {
        let cnt = observed.get(combo.as_slice()).copied().unwrap_or(0);
        if cnt < tau {
            count.insert(Pattern::from_combination(&combo), cnt);
        }
        stats.candidates += 1;
        // Odometer increment, last attribute fastest.
        let mut i = d;
        loop {
            if i == 0 {
                break 'leaves;
            }
            i -= 1;
            combo[i] += 1;
            if combo[i] < cards[i] {
                break;
            }
            combo[i] = 0;
        }
    }

    while !count.is_empty() {
        if opts.expired() {
            complete = false;
            break;
        }
        let mut next: HashMap<Pattern, u64> = HashMap::new();
        for p in count.keys() {
            for parent in p.parents_rule2() {
                stats.candidates += 1;
                let i = parent
                    .rightmost_wildcard()
                    .expect("a Rule-2 parent has a wildcard");
                // Children fixing position i partition the parent's matches;
                // a child absent from `count` is covered and stands in as τ.
                let cnt = (0..cards[i])
                    .map(|v| {
                        count
                            .get(&parent.with(i, Some(v)))
                            .copied()
                            .unwrap_or(tau)
                    })
                    .fold(0u64, u64::saturating_add);
                if cnt < tau {
                    next.insert(parent, cnt);
                }
            }
        }
        for p in count.keys() {
            if !p.parents().iter().any(|q| next.contains_key(q)) {
                mups.insert(p.clone());
            }
        }
        count = next;
    }

    if let Some(cap) = opts.max_level {
        let kept: Vec<Pattern> = mups
            .patterns()
            .iter()
            .filter(|p| p.level() <= cap)
            .cloned()
            .collect();
        mups = MupSet::from_patterns(schema, tau, kept);
    }
    Ok(Discovery {
        mups,
        algorithm: Algorithm::Combiner,
        threshold: tau,
        max_level: opts.max_level,
        complete,
        stats,
    })
}
