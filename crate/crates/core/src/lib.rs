//! Value-dimension modeling toolkit.
//!
//! The crate is organised around the ten basic human values:
//!
//! - [`value`]: the dimension set, utilities, value vectors and their arithmetic.
//! - [`curation`]: keyword lexicons, scenario matching, annotation aggregation,
//!   agreement statistics, dataset variants and splits.
//! - [`model`]: a hashed bag-of-n-grams value regressor/classifier, its trainer,
//!   the evaluation report, value-feature fusion and label prepending.
//! - [`reward`]: persona value matching, candidate reranking and speaker profiling.

pub mod curation;
pub mod error;
pub mod model;
pub mod reward;
pub mod text;
pub mod value;

pub use error::{Error, Result};
pub use value::{
    dot, normalize, normalize_raw, quantize_vote, AnnotatedSample, Annotation, DatasetSplit, Scenario, Utility,
    ValueDimension, ValueVector, Vote,
};
