//! Covariate drift detection over timestamped tabular data.
//!
//! Stage one ([`profile::learn_reference`]) bins every feature over a
//! reference period and builds an empirical null distribution of
//! Jensen-Shannon divergences from randomly placed reference windows. Stage
//! two ([`drift::evaluate`]) scores each evaluation window against that null,
//! normalizes p-values across features with Holm's step-down procedure, and
//! raises alarms below the significance level.

pub mod dataset;
pub mod drift;
pub mod duration;
pub mod error;
pub mod histogram;
pub mod lineage;
pub mod profile;
pub mod report;
pub mod schema;
pub mod synth;

pub use dataset::{load_dataset, window_iter, Column, Dataset, Timestamp, Window};
pub use drift::{evaluate, DriftMatrix, Thresholds};
pub use duration::IsoDuration;
pub use error::{Error, Result};
pub use histogram::{build_binning, build_histogram, BinningSpec, Histogram};
pub use lineage::LineageGraph;
pub use profile::{learn_reference, ProfileParams, ReferenceProfile};
pub use report::ResultDocument;
pub use schema::{FeatureKind, FeatureSchema, FeatureSpec};
