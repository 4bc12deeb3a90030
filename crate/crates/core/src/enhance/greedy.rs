//! Greedy hitting set over a target set, driven by a depth-first search of
//! the attribute-value tree.

use serde::Serialize;

use crate::bits::BitVec;
use crate::enhance::oracle::ValidationOracle;
use crate::enhance::targets::TargetSet;
use crate::pattern::Pattern;

/// No oracle-valid combination hits any of the listed targets.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("no valid value combination hits the {} remaining target pattern(s)", .patterns.len())]
pub struct Infeasible {
    /// Indices into the target set.
    pub patterns: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HitSearch {
    pub count: usize,
    pub combination: Vec<u32>,
}

/// Finds an oracle-valid combination hitting the most targets in
/// `remaining`.
///
/// Children at each depth are tried in descending hit count, ties by
/// ascending value; a branch whose count cannot beat the best so far is cut,
/// and the best is only replaced on a strict improvement.
pub fn hit_count_search(
    ts: &TargetSet,
    remaining: &BitVec,
    oracle: &ValidationOracle,
) -> Result<HitSearch, Infeasible> {
    let mut s = Search {
        ts,
        oracle,
        best_count: 0,
        best: Vec::new(),
        prefix: Vec::with_capacity(ts.d()),
    };
    if remaining.any() {
        s.visit(0, remaining);
    }
    if s.best_count == 0 {
        return Err(Infeasible {
            patterns: remaining.iter_ones().collect(),
        });
    }
    Ok(HitSearch {
        count: s.best_count,
        combination: s.best,
    })
}

struct Search<'a> {
    ts: &'a TargetSet,
    oracle: &'a ValidationOracle,
    best_count: usize,
    best: Vec<u32>,
    prefix: Vec<u32>,
}

impl Search<'_> {
    fn visit(&mut self, depth: usize, filter: &BitVec) {
        let last = depth + 1 == self.ts.d();
        let c = self.ts.hit_index_cardinality(depth);
        let mut kids: Vec<(u32, usize)> = Vec::with_capacity(c as usize);
        for v in 0..c {
            self.prefix.push(v);
            let rejected = self.oracle.rejects_new_prefix(&self.prefix);
            self.prefix.pop();
            if !rejected {
                kids.push((v, filter.and_count(self.ts.hit_vector(depth, v))));
            }
        }
        kids.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (v, cnt) in kids {
            if cnt <= self.best_count {
                break;
            }
            self.prefix.push(v);
            if last {
                self.best_count = cnt;
                self.best = self.prefix.clone();
            } else {
                let next = filter.and(self.ts.hit_vector(depth, v));
                self.visit(depth + 1, &next);
            }
            self.prefix.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pick {
    pub combination: Vec<u32>,
    /// The combination with `X` wherever every target it hit was `X`.
    pub generalized: Pattern,
    /// Targets newly hit by this pick, as indices into the target set.
    pub hits: Vec<usize>,
    /// Copies to collect: the largest coverage deficit among `hits`, at least 1.
    pub multiplicity: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AcquisitionPlan {
    pub picks: Vec<Pick>,
    /// Targets no valid combination can hit.
    pub residual: Vec<usize>,
}

impl AcquisitionPlan {
    pub fn is_complete(&self) -> bool {
        self.residual.is_empty()
    }

    pub fn total_tuples(&self) -> u64 {
        self.picks.iter().map(|p| p.multiplicity).sum()
    }

    /// The plan as weighted rows, ready to append to a dataset.
    pub fn rows(&self) -> Vec<(Vec<u32>, u64)> {
        self.picks
            .iter()
            .map(|p| (p.combination.clone(), p.multiplicity))
            .collect()
    }
}

/// Picks combinations until every target is hit or the rest are unhittable.
pub fn greedy_enhance(ts: &TargetSet, oracle: &ValidationOracle) -> AcquisitionPlan {
    let mut remaining = ts.all();
    let mut plan = AcquisitionPlan::default();
    while remaining.any() {
        match hit_count_search(ts, &remaining, oracle) {
            Ok(found) => {
                let hit = ts.filter_walk(&found.combination, &remaining);
                remaining.and_not_assign(&hit);
                plan.picks.push(make_pick(ts, found.combination, hit.iter_ones().collect()));
            }
            Err(Infeasible { patterns }) => {
                plan.residual = patterns;
                break;
            }
        }
    }
    plan
}

fn make_pick(ts: &TargetSet, combination: Vec<u32>, hits: Vec<usize>) -> Pick {
    let generalized = Pattern::new(
        combination
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let all_x = hits.iter().all(|&k| ts.patterns()[k].is_wildcard(i));
                (!all_x).then_some(v)
            })
            .collect(),
    );
    let multiplicity = hits.iter().map(|&k| ts.deficit(k)).max().unwrap_or(0).max(1);
    Pick {
        combination,
        generalized,
        hits,
        multiplicity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enhance::oracle::ValidationRule;
    use crate::schema::Schema;
    use std::collections::BTreeSet;

    fn mixed_targets() -> (Schema, TargetSet) {
        let schema = Schema::with_cardinalities(&[2, 3, 3, 2, 2]).unwrap();
        let p = ["XX01X", "1X20X", "XXXX1", "02XXX", "XX11X", "111XX"]
            .iter()
            .map(|t| Pattern::parse(t, &schema).unwrap())
            .collect();
        let ts = TargetSet::new(&schema, 1, p, vec![0; 6]).unwrap();
        (schema, ts)
    }

    #[test]
    fn first_pick_hits_three() {
        let (_, ts) = mixed_targets();
        let r = hit_count_search(&ts, &ts.all(), &ValidationOracle::empty()).unwrap();
        assert_eq!(r.count, 3);
        assert_eq!(ts.filter_walk(&r.combination, &ts.all()).count_ones(), 3);
    }

    #[test]
    fn plan_of_three() {
        let (_, ts) = mixed_targets();
        let plan = greedy_enhance(&ts, &ValidationOracle::empty());
        assert_eq!(plan.picks.len(), 3);
        assert!(plan.is_complete());
        let mut all: Vec<usize> = plan.picks.iter().flat_map(|p| p.hits.clone()).collect();
        all.sort();
        assert_eq!(all, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn single_target_multiplicity() {
        let schema = Schema::binary(3);
        let p = vec![Pattern::parse("1X0", &schema).unwrap()];
        let ts = TargetSet::new(&schema, 5, p, vec![1]).unwrap();
        let plan = greedy_enhance(&ts, &ValidationOracle::empty());
        assert_eq!(plan.picks.len(), 1);
        let pick = &plan.picks[0];
        assert_eq!(pick.multiplicity, 4);
        assert_eq!(pick.generalized, Pattern::parse("1X0", &schema).unwrap());
        assert!(Pattern::parse("1X0", &schema).unwrap().matches(&pick.combination));
        assert_eq!(plan.total_tuples(), 4);
    }

    #[test]
    fn generalization_keeps_shared_positions() {
        let schema = Schema::binary(3);
        let p = vec![
            Pattern::parse("1XX", &schema).unwrap(),
            Pattern::parse("X1X", &schema).unwrap(),
        ];
        let ts = TargetSet::new(&schema, 1, p, vec![0, 0]).unwrap();
        let plan = greedy_enhance(&ts, &ValidationOracle::empty());
        assert_eq!(plan.picks.len(), 1);
        assert_eq!(plan.picks[0].generalized, Pattern::parse("11X", &schema).unwrap());
    }

    #[test]
    fn oracle_blocks_only_option() {
        let schema = Schema::binary(2);
        let p = vec![Pattern::parse("11", &schema).unwrap(), Pattern::parse("0X", &schema).unwrap()];
        let ts = TargetSet::new(&schema, 1, p, vec![0, 0]).unwrap();
        let rule = ValidationRule::new(&schema, vec![(0, BTreeSet::from([1])), (1, BTreeSet::from([1]))]).unwrap();
        let oracle = ValidationOracle::new(vec![rule]);
        let plan = greedy_enhance(&ts, &oracle);
        assert_eq!(plan.picks.len(), 1);
        assert_eq!(plan.picks[0].hits, vec![1]);
        assert_eq!(plan.residual, vec![0]);
        assert!(!plan.is_complete());
    }

    #[test]
    fn empty_remaining_is_infeasible() {
        let (_, ts) = mixed_targets();
        let err = hit_count_search(&ts, &BitVec::zeros(6), &ValidationOracle::empty()).unwrap_err();
        assert!(err.patterns.is_empty());
    }
}
