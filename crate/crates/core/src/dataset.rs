//! Deduplicated value combinations with multiplicities and the per
//! (attribute, value) bit-vector index used for coverage queries.

use std::collections::BTreeMap;

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::schema::Schema;

/// One row projected onto the attributes of interest, as value codes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DatasetTuple {
    pub values: Vec<u32>,
}

impl DatasetTuple {
    pub fn new(values: Vec<u32>) -> Self {
        DatasetTuple { values }
    }

    pub fn matches(&self, p: &Pattern) -> Result<bool> {
        if p.d() != self.values.len() {
            return Err(Error::Arity {
                expected: self.values.len(),
                found: p.d(),
            });
        }
        Ok(p.matches(&self.values))
    }
}

/// An immutable, indexed dataset. Bit `k` of `index(i, v)` is set iff
/// `combos()[k][i] == v`.
#[derive(Clone, Debug)]
pub struct IndexedDataset {
    schema: Schema,
    n: u64,
    combos: Vec<Vec<u32>>,
    counts: Vec<u64>,
    index: Vec<Vec<BitVec>>,
}

impl IndexedDataset {
    pub fn from_rows<I>(schema: Schema, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<u32>>,
    {
        Self::from_weighted_rows(schema, rows.into_iter().map(|r| (r, 1)))
    }

    /// Rows with explicit multiplicities. Combinations are stored in
    /// lexicographic order.
    pub fn from_weighted_rows<I>(schema: Schema, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, u64)>,
    {
        let d = schema.d();
        let mut agg: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for (row, mult) in rows {
            if row.len() != d {
                return Err(Error::Arity {
                    expected: d,
                    found: row.len(),
                });
            }
            for (i, &v) in row.iter().enumerate() {
                if v >= schema.cardinality(i) {
                    return Err(Error::ValueOutOfRange {
                        attribute: i,
                        value: v,
                        cardinality: schema.cardinality(i),
                    });
                }
            }
            if mult > 0 {
                *agg.entry(row).or_default() += mult;
            }
        }
        if agg.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let (combos, counts): (Vec<_>, Vec<_>) = agg.into_iter().unzip();
        let mut index: Vec<Vec<BitVec>> = schema
            .cardinalities()
            .iter()
            .map(|&c| vec![BitVec::zeros(combos.len()); c as usize])
            .collect();
        for (k, combo) in combos.iter().enumerate() {
            for (i, &v) in combo.iter().enumerate() {
                index[i][v as usize].set(k, true);
            }
        }
        Ok(IndexedDataset {
            n: counts.iter().sum(),
            schema,
            combos,
            counts,
            index,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn d(&self) -> usize {
        self.schema.d()
    }

    /// Total rows, with multiplicity.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn combos(&self) -> &[Vec<u32>] {
        &self.combos
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn index(&self, attribute: usize, value: u32) -> &BitVec {
        &self.index[attribute][value as usize]
    }

    /// Number of rows matching `p`.
    pub fn coverage(&self, p: &Pattern) -> Result<u64> {
        p.check(&self.schema)?;
        Ok(self.coverage_unchecked(p))
    }

    /// AND of the vectors of the deterministic elements, then a dot product
    /// with the counts. `p` must conform to the schema.
    pub(crate) fn coverage_unchecked(&self, p: &Pattern) -> u64 {
        let vectors: Vec<&[u64]> = p
            .elements()
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.map(|v| self.index[i][v as usize].words()))
            .collect();
        let Some((first, rest)) = vectors.split_first() else {
            return self.n;
        };
        let mut total = 0;
        for (w, &word) in first.iter().enumerate() {
            let mut acc = word;
            for v in rest {
                acc &= v[w];
                if acc == 0 {
                    break;
                }
            }
            while acc != 0 {
                let k = w * 64 + acc.trailing_zeros() as usize;
                total += self.counts[k];
                acc &= acc - 1;
            }
        }
        total
    }

    /// Rows as (combination, multiplicity) pairs.
    pub fn weighted_rows(&self) -> impl Iterator<Item = (Vec<u32>, u64)> + '_ {
        self.combos.iter().cloned().zip(self.counts.iter().copied())
    }

    /// A new dataset with `extra` rows appended.
    pub fn with_additional_rows<I>(&self, extra: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, u64)>,
    {
        Self::from_weighted_rows(self.schema.clone(), self.weighted_rows().chain(extra))
    }
}
