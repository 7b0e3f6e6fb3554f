//! Persona value-matching reward, reranking and speaker profiling.

pub mod export;
pub mod matching;
pub mod pipeline;
pub mod value_fn;

pub use export::{
    escape_field, format_profile, format_radar, format_ranking, format_reward_trace, turn_records, TurnNote,
    TurnRecord,
};
pub use matching::{match_values, term, MatchResult, NORM_TOLERANCE};
pub use pipeline::{
    profile_speaker, rerank_candidates, reward, DialogueTrace, PersonaProfile, RankedCandidate, RewardOutcome,
    SpeakerProfile,
};
pub use value_fn::{FnValue, ValueFunction};
