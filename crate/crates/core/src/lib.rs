//! Coverage auditing for categorical datasets.
//!
//! A *pattern* fixes some attributes to values and leaves the rest as `X`.
//! It is uncovered when fewer than `tau` rows match it, and a maximal
//! uncovered pattern (MUP) is one whose parents are all covered. This crate
//! finds the MUPs of a dataset and plans which value combinations to collect
//! so that every pattern up to a chosen level becomes covered.
//!
//! ```
//! use mupcov::{discover, Algorithm, DiscoveryConfig, IndexedDataset, Schema, Threshold};
//!
//! let rows = vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 1]];
//! let ds = IndexedDataset::from_rows(Schema::binary(3), rows).unwrap();
//! let cfg = DiscoveryConfig::new(Algorithm::Deepdiver, Threshold::Count(1));
//! let found = discover(&ds, &cfg).unwrap();
//! let mups: Vec<String> = found.mups.sorted().iter().map(|p| p.render(ds.schema())).collect();
//! assert_eq!(mups, ["1XX"]);
//! ```

pub mod bits;
pub mod dataset;
pub mod discovery;
pub mod enhance;
pub mod error;
pub mod pattern;
pub mod report;
pub mod schema;
pub mod testkit;

pub use dataset::{DatasetTuple, IndexedDataset};
pub use discovery::{discover, Algorithm, Discovery, DiscoveryConfig, MupSet, Threshold};
pub use enhance::{
    expand_to_level, greedy_enhance, uncovered_at_level, uncovered_with_value_count, AcquisitionPlan,
    TargetSet, ValidationOracle,
};
pub use error::{Error, Result};
pub use pattern::{graph_stats, Pattern, PatternGraphStats};
pub use schema::{ingest, ingest_path, read_headers, write_rows, Attribute, IngestConfig, Schema};
