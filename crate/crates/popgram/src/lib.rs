//! An analogical grammaticality engine.
//!
//! A corpus is treated as a population of attested collocational patterns.
//! Candidate word sequences are never derived from rules; they are scored by
//! how similar they are to that population, and by how general a grouping of
//! the vocabulary is needed before all of their parts look attested.
//!
//! The pipeline:
//!
//! 1. [`corpus::PopulationStore`] ingests line-oriented text into patterns,
//!    a dense vocabulary and n-gram tables.
//! 2. [`colloc::ProfileSet`] turns the patterns into positional collocation
//!    profiles (which tokens appear at which offsets around each token) plus
//!    the inverted feature index.
//! 3. [`similarity`] defines exact rational token similarity (count-weighted
//!    Jaccard over profiles) and [`families::FamilyHierarchy`] groups the
//!    vocabulary into nested families at a descending threshold schedule.
//! 4. [`engine::Engine`] judges candidates: a nearest-neighbor score against
//!    the same-length attested population and a component-coverage level
//!    over the family hierarchy.
//! 5. [`ablation`] deletes patterns and measures how judgments degrade.
//! 6. [`artifact`] persists everything as a versioned, diff-able index file.
//!
//! All scores are exact rationals end to end, so ties are ties and
//! comparisons never depend on float rounding.

pub mod ablation;
pub mod artifact;
pub mod colloc;
pub mod config;
pub mod corpus;
pub mod emit;
pub mod engine;
pub mod error;
pub mod families;
pub mod similarity;

pub use ablation::{degradation_curve, AblationMode, AblationReport, DeletionPlan, StepReport};
pub use colloc::{ContextFeature, ContextProfile, InvertedIndex, ProfileSet};
pub use config::RunConfig;
pub use corpus::{IngestConfig, Pattern, PatternId, PopulationStore, Token, TokenId};
pub use emit::{OutputFormat, Record};
pub use engine::{Candidate, Engine, EngineOptions, Judgment, Level, Support};
pub use error::{Error, Result};
pub use families::{FamilyHierarchy, Partition, Schedule};
pub use similarity::{parse_score, render_decimal, render_score, Score};
