//! Scenario curation and dataset construction.

pub mod aggregate;
pub mod associations;
pub mod embedding;
pub mod io;
pub mod kappa;
pub mod lexicon;
pub mod split;
pub mod stem;
pub mod variants;

pub use aggregate::{aggregate_annotations, group_annotations, make_augmented, Aggregation, DropReason, DroppedGroup, VoteGroup};
pub use associations::{expand_lexicon_associations, AssociationClient, ClientConfig, Relation, Transport};
pub use embedding::{expand_lexicon_embedding, EmbeddingTable, ExpansionReport};
pub use kappa::{agreement_report, fleiss_kappa, AgreementReport, VoteCounts};
pub use lexicon::{match_scenario, Lexicon, LexiconMatcher, Tier};
pub use split::{split_dataset, split_sizes, DEFAULT_RATIOS};
pub use stem::stem;
pub use variants::make_balanced;
