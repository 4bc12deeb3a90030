//! Builds a coverage-enhancement instance from a vertex cover instance.
//!
//! One binary attribute per edge. Each vertex becomes a row with 1 exactly on
//! its incident edges, and three all-zero rows are added. With threshold 3
//! the single-attribute patterns `A_e = 1` are the MUPs. The oracle forbids
//! combinations whose 1-positions are not the edges around a single vertex,
//! so every valid hitting combination corresponds to a vertex and a minimum
//! plan is a minimum vertex cover.

use std::collections::BTreeSet;

use crate::dataset::IndexedDataset;
use crate::enhance::oracle::{ValidationOracle, ValidationRule};
use crate::error::{Error, Result};
use crate::schema::Schema;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::Invalid("graph needs at least one edge".into()));
        }
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            if u >= vertices || v >= vertices {
                return Err(Error::Invalid(format!("edge ({u}, {v}) names a missing vertex")));
            }
            if u == v {
                return Err(Error::Invalid(format!("self-loop on vertex {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::Invalid(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Graph { vertices, edges })
    }

    fn share_vertex(&self, a: usize, b: usize) -> bool {
        let (x, y) = self.edges[a];
        let (u, v) = self.edges[b];
        x == u || x == v || y == u || y == v
    }

    fn common_vertex(&self, a: usize, b: usize, c: usize) -> bool {
        let (x, y) = self.edges[a];
        [x, y].iter().any(|&w| {
            [self.edges[b], self.edges[c]]
                .iter()
                .all(|&(u, v)| u == w || v == w)
        })
    }
}

#[derive(Clone, Debug)]
pub struct VcInstance {
    pub dataset: IndexedDataset,
    pub rows: Vec<Vec<u32>>,
    pub threshold: u64,
    pub lambda: usize,
    pub oracle: ValidationOracle,
}

pub fn vc_instance(graph: &Graph) -> Result<VcInstance> {
    let m = graph.edges.len();
    let schema = Schema::binary(m);
    let mut rows: Vec<Vec<u32>> = (0..graph.vertices)
        .map(|w| {
            graph
                .edges
                .iter()
                .map(|&(u, v)| u32::from(u == w || v == w))
                .collect()
        })
        .collect();
    rows.extend(std::iter::repeat_n(vec![0; m], 3));

    let one = || BTreeSet::from([1]);
    let mut rules = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            if !graph.share_vertex(a, b) {
                rules.push(ValidationRule::new(&schema, vec![(a, one()), (b, one())])?);
            }
        }
    }
    // Three pairwise-adjacent edges without a common vertex form a triangle.
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                if graph.share_vertex(a, b)
                    && graph.share_vertex(a, c)
                    && graph.share_vertex(b, c)
                    && !graph.common_vertex(a, b, c)
                {
                    rules.push(ValidationRule::new(
                        &schema,
                        vec![(a, one()), (b, one()), (c, one())],
                    )?);
                }
            }
        }
    }

    let dataset = IndexedDataset::from_rows(schema, rows.clone())?;
    Ok(VcInstance {
        dataset,
        rows,
        threshold: 3,
        lambda: 1,
        oracle: ValidationOracle::new(rules),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_graphs() {
        assert!(Graph::new(3, vec![]).is_err());
        assert!(Graph::new(3, vec![(0, 3)]).is_err());
        assert!(Graph::new(3, vec![(1, 1)]).is_err());
        assert!(Graph::new(3, vec![(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn triangle_rule() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let inst = vc_instance(&g).unwrap();
        assert_eq!(inst.oracle.rules().len(), 1);
        assert!(!inst.oracle.validate_combination(&[1, 1, 1]));
        assert!(inst.oracle.validate_combination(&[1, 1, 0]));
    }

    #[test]
    fn star_rows() {
        let g = Graph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let inst = vc_instance(&g).unwrap();
        assert_eq!(inst.rows[0], vec![1, 1, 1]);
        assert_eq!(inst.rows[1], vec![1, 0, 0]);
        assert_eq!(inst.dataset.n(), 7);
        assert!(inst.oracle.is_empty());
    }
}
