//! Runs the guide's code blocks as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/patterns.md")]
pub mod patterns {}

#[doc = include_str!("../../../book/src/coverage.md")]
pub mod coverage {}

#[doc = include_str!("../../../book/src/discovery.md")]
pub mod discovery {}

#[doc = include_str!("../../../book/src/enhancement.md")]
pub mod enhancement {}

#[doc = include_str!("../../../book/src/validation.md")]
pub mod validation {}

#[doc = include_str!("../../../book/src/ingest.md")]
pub mod ingest {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
