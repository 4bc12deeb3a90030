use crate::bits::BitVec;
use crate::pattern::Pattern;

/// Inverted bit vectors over a growing list of MUPs: one vector per
/// (attribute, value) and one per attribute for the wildcard. Bit `b` of
/// vector `(i, v)` is set iff MUP `b` has value `v` at position `i`.
#[derive(Clone, Debug)]
pub struct DominanceIndex {
    values: Vec<Vec<BitVec>>,
    wildcard: Vec<BitVec>,
    len: usize,
}

impl DominanceIndex {
    pub fn new(cardinalities: &[u32]) -> Self {
        DominanceIndex {
            values: cardinalities
                .iter()
                .map(|&c| vec![BitVec::new(); c as usize])
                .collect(),
            wildcard: vec![BitVec::new(); cardinalities.len()],
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, p: &Pattern) {
        for (i, e) in p.elements().iter().enumerate() {
            self.wildcard[i].push(e.is_none());
            for (v, bv) in self.values[i].iter_mut().enumerate() {
                bv.push(*e == Some(v as u32));
            }
        }
        self.len += 1;
    }

    pub fn value_vector(&self, attribute: usize, value: u32) -> &BitVec {
        &self.values[attribute][value as usize]
    }

    pub fn wildcard_vector(&self, attribute: usize) -> &BitVec {
        &self.wildcard[attribute]
    }

    /// True if some indexed pattern equals or dominates `p`. Per position the
    /// wildcard vector is collected (plus the value vector when `p` is
    /// deterministic there); the AND runs word by word and stops at the first
    /// nonzero word.
    pub fn dominated(&self, p: &Pattern) -> bool {
        if self.len == 0 {
            return false;
        }
        let words = self.wildcard[0].words().len();
        'word: for w in 0..words {
            let mut acc = u64::MAX;
            for (i, e) in p.elements().iter().enumerate() {
                let mut word = self.wildcard[i].words()[w];
                if let Some(v) = e {
                    word |= self.values[i][*v as usize].words()[w];
                }
                acc &= word;
                if acc == 0 {
                    continue 'word;
                }
            }
            return true;
        }
        false
    }

    /// True if `p` equals or dominates some indexed pattern: AND of the value
    /// vectors at `p`'s deterministic positions, wildcards skipped.
    pub fn dominates(&self, p: &Pattern) -> bool {
        if self.len == 0 {
            return false;
        }
        let det: Vec<&[u64]> = p
            .elements()
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.map(|v| self.values[i][v as usize].words()))
            .collect();
        if det.is_empty() {
            return true;
        }
        'word: for w in 0..det[0].len() {
            let mut acc = u64::MAX;
            for v in &det {
                acc &= v[w];
                if acc == 0 {
                    continue 'word;
                }
            }
            return true;
        }
        false
    }
}
