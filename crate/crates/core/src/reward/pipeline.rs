//! Reward, reranking and speaker profiles over raw text.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reward::matching::{match_values, MatchResult};
use crate::reward::value_fn::{score_all, ValueFunction};
use crate::value::{normalize, ValueDimension, ValueVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonaProfile {
    pub sentences: Vec<String>,
    /// Normalized, one per sentence.
    pub vectors: Vec<ValueVector>,
}

impl PersonaProfile {
    pub fn build(sentences: &[String], value_fn: &dyn ValueFunction) -> Result<Self> {
        if sentences.is_empty() {
            return Err(Error::InvalidInput("persona must contain at least one sentence".into()));
        }
        let vectors = score_all(value_fn, sentences)?.iter().map(normalize).collect();
        Ok(PersonaProfile {
            sentences: sentences.to_vec(),
            vectors,
        })
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DialogueTrace {
    pub utterances: Vec<String>,
    /// Normalized, one per utterance.
    pub vectors: Vec<ValueVector>,
}

impl DialogueTrace {
    pub fn build(utterances: &[String], value_fn: &dyn ValueFunction) -> Result<Self> {
        let vectors = score_all(value_fn, utterances)?.iter().map(normalize).collect();
        Ok(DialogueTrace {
            utterances: utterances.to_vec(),
            vectors,
        })
    }

    pub fn push(&mut self, utterance: String, vector: ValueVector) {
        self.utterances.push(utterance);
        self.vectors.push(normalize(&vector));
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardOutcome {
    pub persona: PersonaProfile,
    pub trace: DialogueTrace,
    pub result: MatchResult,
}

impl RewardOutcome {
    pub fn reward(&self) -> f64 {
        self.result.reward
    }
}

/// Scores persona sentences and utterances, normalizes them and matches.
pub fn reward(
    persona: &[String],
    utterances: &[String],
    value_fn: &dyn ValueFunction,
    clamp_terms: bool,
) -> Result<RewardOutcome> {
    if utterances.is_empty() {
        return Err(Error::InvalidInput("need at least one utterance".into()));
    }
    let persona = PersonaProfile::build(persona, value_fn)?;
    let trace = DialogueTrace::build(utterances, value_fn)?;
    let result = match_values(&persona.vectors, &trace.vectors, clamp_terms)?;
    Ok(RewardOutcome { persona, trace, result })
}

fn episode_reward(persona: &PersonaProfile, trace: &[ValueVector], clamp_terms: bool) -> Result<f64> {
    if trace.is_empty() {
        return Ok(0.0);
    }
    Ok(match_values(&persona.vectors, trace, clamp_terms)?.reward)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    /// Position in the input list.
    pub index: usize,
    pub text: String,
    /// Reward gained by appending this candidate to the prior trace.
    pub delta: f64,
}

/// Orders candidates by descending reward gain; equal gains keep input order.
pub fn rerank_candidates(
    persona: &PersonaProfile,
    prior: &DialogueTrace,
    candidates: &[String],
    value_fn: &dyn ValueFunction,
    clamp_terms: bool,
) -> Result<Vec<RankedCandidate>> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("no candidates to rerank".into()));
    }
    let base = episode_reward(persona, &prior.vectors, clamp_terms)?;
    let scored = score_all(value_fn, candidates)?;
    let mut extended = prior.vectors.clone();
    let mut out = Vec::with_capacity(candidates.len());
    for (index, (text, v)) in candidates.iter().zip(&scored).enumerate() {
        extended.push(normalize(v));
        let r = episode_reward(persona, &extended, clamp_terms)?;
        extended.pop();
        out.push(RankedCandidate {
            index,
            text: text.clone(),
            delta: r - base,
        });
    }
    out.sort_by(|a, b| b.delta.total_cmp(&a.delta));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeakerProfile {
    pub utterances: Vec<String>,
    /// Component-wise mean of the per-utterance vectors, not normalized.
    pub profile: ValueVector,
    pub per_utterance: Vec<ValueVector>,
}

pub fn profile_speaker(utterances: &[String], value_fn: &dyn ValueFunction) -> Result<SpeakerProfile> {
    if utterances.is_empty() {
        return Err(Error::InvalidInput("need at least one utterance to profile".into()));
    }
    let per_utterance = score_all(value_fn, utterances)?;
    let n = per_utterance.len() as f64;
    let profile = ValueVector::from_fn(|d: ValueDimension| {
        (per_utterance.iter().map(|v| v[d]).sum::<f64>() / n).clamp(-1.0, 1.0)
    })?;
    Ok(SpeakerProfile {
        utterances: utterances.to_vec(),
        profile,
        per_utterance,
    })
}
