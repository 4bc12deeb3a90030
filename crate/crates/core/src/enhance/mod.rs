//! Coverage enhancement: pick value combinations to collect so that
//! uncovered patterns reach the threshold.

pub mod greedy;
pub mod oracle;
pub mod targets;
pub mod vc;

pub use greedy::{greedy_enhance, hit_count_search, AcquisitionPlan, HitSearch, Infeasible, Pick};
pub use oracle::{RulesDocument, ValidationOracle, ValidationRule};
pub use targets::{expand_to_level, uncovered_at_level, uncovered_with_value_count, TargetSet};
pub use vc::{vc_instance, Graph, VcInstance};
