//! Reference implementations and generators for tests and benchmarks.
//!
//! The brute-force routines deliberately share no traversal or index code
//! with the engines: coverage is a plain scan, and parents are built here.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::IndexedDataset;
use crate::enhance::oracle::ValidationOracle;
use crate::enhance::vc::Graph;
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::schema::Schema;

/// Largest pattern graph `brute_force_mups` will walk.
pub const BRUTE_FORCE_NODE_CAP: u64 = 100_000;

/// The n×n identity matrix over binary attributes. Returns the dataset and
/// the threshold `n/2 + 1`, for which every level-`n/2` pattern is a MUP.
pub fn diagonal_dataset(n: usize) -> Result<(IndexedDataset, u64)> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::Invalid(format!("diagonal dataset needs an even n, got {n}")));
    }
    let ds = IndexedDataset::from_rows(Schema::binary(n), diagonal_rows(n))?;
    Ok((ds, n as u64 / 2 + 1))
}

pub fn diagonal_rows(n: usize) -> Vec<Vec<u32>> {
    (0..n)
        .map(|i| (0..n).map(|j| u32::from(i == j)).collect())
        .collect()
}

fn scan_coverage(ds: &IndexedDataset, p: &[Option<u32>]) -> u64 {
    ds.combos()
        .iter()
        .zip(ds.counts())
        .filter(|(row, _)| p.iter().zip(row.iter()).all(|(e, v)| e.is_none_or(|e| e == *v)))
        .map(|(_, c)| *c)
        .sum()
}

/// Every MUP, found by listing all patterns, scanning the data for each, and
/// checking each uncovered pattern's parents directly. Sorted by level,
/// then element-wise.
pub fn brute_force_mups(ds: &IndexedDataset, tau: u64) -> Result<Vec<Pattern>> {
    let cards = ds.schema().cardinalities();
    let total = cards
        .iter()
        .try_fold(1u64, |acc, &c| acc.checked_mul(c as u64 + 1))
        .filter(|&t| t <= BRUTE_FORCE_NODE_CAP)
        .ok_or_else(|| Error::GraphTooLarge {
            what: format!("more than {BRUTE_FORCE_NODE_CAP} patterns for brute force"),
        })?;
    let mut cov: HashMap<Vec<Option<u32>>, u64> = HashMap::with_capacity(total as usize);
    let mut cur = vec![None; cards.len()];
    loop {
        cov.insert(cur.clone(), scan_coverage(ds, &cur));
        // Odometer where None counts as the digit after the last value.
        let mut i = 0;
        loop {
            if i == cards.len() {
                let mut out: Vec<Pattern> = cov
                    .iter()
                    .filter(|(p, &c)| c < tau && all_parents_covered(p, &cov, tau))
                    .map(|(p, _)| Pattern::new(p.clone()))
                    .collect();
                out.sort_by(|a, b| a.level().cmp(&b.level()).then_with(|| a.cmp(b)));
                return Ok(out);
            }
            cur[i] = match cur[i] {
                None => Some(0),
                Some(v) if v + 1 < cards[i] => Some(v + 1),
                Some(_) => None,
            };
            if cur[i].is_some() {
                break;
            }
            i += 1;
        }
    }
}

fn all_parents_covered(p: &[Option<u32>], cov: &HashMap<Vec<Option<u32>>, u64>, tau: u64) -> bool {
    (0..p.len()).filter(|&i| p[i].is_some()).all(|i| {
        let mut q = p.to_vec();
        q[i] = None;
        cov[&q] >= tau
    })
}

/// Largest combination space `brute_force_min_hitting_set` accepts.
pub const BRUTE_FORCE_COMBINATIONS: u64 = 10_000;
/// Most target patterns `brute_force_min_hitting_set` accepts.
pub const BRUTE_FORCE_TARGETS: usize = 12;

/// Size of a smallest set of oracle-valid combinations hitting every
/// pattern, or `None` if some pattern has no valid match. Breadth-first over
/// subsets of targets encoded as bitmasks.
pub fn brute_force_min_hitting_set(
    patterns: &[Pattern],
    cards: &[u32],
    oracle: &ValidationOracle,
) -> Result<Option<usize>> {
    let space: u64 = cards.iter().map(|&c| c as u64).product();
    if space > BRUTE_FORCE_COMBINATIONS || patterns.len() > BRUTE_FORCE_TARGETS {
        return Err(Error::Invalid("instance too large for brute force".into()));
    }
    let full: u32 = (1u32 << patterns.len()) - 1;
    let mut masks = HashSet::new();
    let mut combo = vec![0u32; cards.len()];
    for _ in 0..space {
        if oracle.validate_combination(&combo) {
            let mut m = 0u32;
            for (k, p) in patterns.iter().enumerate() {
                let hit = p
                    .elements()
                    .iter()
                    .zip(&combo)
                    .all(|(e, v)| e.is_none_or(|e| e == *v));
                if hit {
                    m |= 1 << k;
                }
            }
            if m != 0 {
                masks.insert(m);
            }
        }
        for i in (0..cards.len()).rev() {
            combo[i] += 1;
            if combo[i] < cards[i] {
                break;
            }
            combo[i] = 0;
        }
    }
    let masks: Vec<u32> = masks.into_iter().collect();
    let mut dist: HashMap<u32, usize> = HashMap::from([(0, 0)]);
    let mut queue = VecDeque::from([0u32]);
    while let Some(s) = queue.pop_front() {
        if s == full {
            return Ok(Some(dist[&s]));
        }
        let d = dist[&s];
        for &m in &masks {
            let t = s | m;
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(t) {
                e.insert(d + 1);
                queue.push_back(t);
            }
        }
    }
    Ok(None)
}

/// Size of a minimum vertex cover, by trying vertex subsets in order of size.
pub fn min_vertex_cover(graph: &Graph) -> usize {
    assert!(graph.vertices <= 20, "too many vertices for brute force");
    (0u32..1 << graph.vertices)
        .filter(|s| graph.edges.iter().all(|&(u, v)| s >> u & 1 == 1 || s >> v & 1 == 1))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

/// `n` rows with independent attributes. With `skew` 0 values are uniform;
/// otherwise value `k` of an attribute has weight `(1 - skew)^k`.
pub fn random_rows(seed: u64, cards: &[u32], n: usize, skew: f64) -> Vec<Vec<u32>> {
    assert!((0.0..1.0).contains(&skew), "skew must be in [0, 1)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dists: Vec<WeightedIndex<f64>> = cards
        .iter()
        .map(|&c| WeightedIndex::new((0..c).map(|k| (1.0 - skew).powi(k as i32))).unwrap())
        .collect();
    (0..n)
        .map(|_| dists.iter().map(|w| w.sample(&mut rng) as u32).collect())
        .collect()
}

pub fn random_dataset(seed: u64, cards: &[u32], n: usize, skew: f64) -> Result<IndexedDataset> {
    let schema = Schema::with_cardinalities(cards)?;
    IndexedDataset::from_rows(schema, random_rows(seed, cards, n, skew))
}
