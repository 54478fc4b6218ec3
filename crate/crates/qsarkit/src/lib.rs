//! QSAR model-building toolkit.
//!
//! Takes precomputed molecular-descriptor matrices and bioactivity values and
//! runs the classic 2D-QSAR workflow: IC50 → pIC50 transformation, descriptor
//! preprocessing (constant and cross-correlated column removal),
//! sphere-exclusion train/test splitting, simulated-annealing descriptor
//! selection, MLR/PCR/PLS model fitting, and an internal/external/
//! randomization validation battery with report emission.
//!
//! The crate is organized around the pipeline stages:
//!
//! - [`ingest`] — activity and descriptor table loading, pIC50 transform
//! - [`preprocess`] — constant-column and cross-correlation filters, standardization
//! - [`split`] — sphere-exclusion train/test partitioning
//! - [`select`] — simulated-annealing descriptor subset selection
//! - [`regression`] — MLR, PCR and PLS fitting, prediction, contributions
//! - [`validation`] — r², LOO q², pred_r², F-test, Y-randomization, gate
//! - [`pipeline`] — end-to-end orchestration from a single seeded config
//! - [`report`] — CSV/SVG/plain-text renderings of run artifacts
//!
//! Everything is deterministic given the master seed: stochastic stages draw
//! from ChaCha8 generators seeded from (master seed, stage label).

pub mod ingest;
pub mod linalg;
pub mod pipeline;
pub mod preprocess;
pub mod regression;
pub mod report;
pub mod rng;
pub mod select;
pub mod split;
pub mod validation;

pub use ingest::{
    compute_pic50, load_dataset, residual, CompoundRecord, Dataset, DescriptorMatrix,
};
pub use pipeline::{RunArtifacts, RunConfig};
pub use regression::{FittedModel, Method, ModelSpec};
pub use split::SplitAssignment;
pub use validation::{GateVerdict, RandomizationResult, ValidationReport};
