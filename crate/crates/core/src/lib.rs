//! Model selection over pools of trained neural-network candidates.
//!
//! The crate is organised bottom-up:
//!
//! * [`record`] holds the candidate data model, pool validation and the CSV / JSON-lines codecs.
//! * [`splitplan`] builds stratified folds, the run schedule (fixed test fold, rotating holdout,
//!   round-robin validation) and per-repetition sample masks.
//! * [`trainer`] trains single-hidden-layer MLPs with early stopping to produce real pools.
//! * [`synth`] simulates per-set label noise and synthetic pools with known generalization.
//! * [`mcdm`] implements TOPSIS and Pareto filtering.
//! * [`policies`] maps the named selection policies and aggregation levels onto [`mcdm`].
//! * [`stats`] computes disagreement metrics and Wilcoxon comparison matrices.

pub mod error;
pub mod mcdm;
pub mod policies;
pub mod record;
pub mod seed;
pub mod splitplan;
pub mod stats;
pub mod synth;
pub mod trainer;

pub use error::{Error, Result};
pub use record::{
    Activation, Architecture, CandidatePool, CandidateRecord, Provenance, Role, SetMetrics,
};
