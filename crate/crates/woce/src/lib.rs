//! Weighted cluster-ensemble toolkit.
//!
//! The pipeline runs in four stages:
//!
//! 1. **Mapping** ([`preprocess`]): center the data and rotate it onto the
//!    covariance eigenbasis so features decorrelate; optionally keep only the
//!    top `d` directions.
//! 2. **Committee generation** ([`generators`]): a bank of seventeen base
//!    clusterers (k-means, fuzzy c-means, Gaussian mixture, subtractive,
//!    twelve linkage/metric combinations, sparse spectral) plus seed-varied
//!    repeats, each with its own target cluster count drawn round-robin from
//!    `[2, k + 2]`. With pairwise constraints, a projection learned from
//!    must-link/cannot-link scatter ([`preprocess::constraint_projection`])
//!    transforms the data first.
//! 3. **Diversity scoring** ([`diversity`]): the uniformity metric scores
//!    each partition against the committee from cluster-size entropy terms;
//!    scores become per-partition consensus weights.
//! 4. **Aggregation** ([`consensus`]): weighted evidence accumulation builds
//!    a co-association matrix, average-linkage merging builds a dendrogram,
//!    and a cut at `k` yields the final partition.
//!
//! The [`harness`] module adds CSV ingestion, z-score normalization,
//! constraint sampling from ground truth, accuracy/NMI scoring, a synthetic
//! half-ring generator and a multi-run benchmark driver.

pub mod consensus;
pub mod diversity;
pub mod error;
pub mod generators;
pub mod harness;
pub mod linalg;
pub mod linkage;
pub mod preprocess;
pub mod types;

pub use consensus::{run_woce, WoceConfig, WoceOutcome};
pub use error::{Error, Result};
pub use types::{CoAssociationMatrix, ConstraintSet, DataMatrix, Partition, ReferenceSet};
