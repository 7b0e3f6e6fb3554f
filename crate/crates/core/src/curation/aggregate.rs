//! Majority-vote aggregation of raw annotations.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::value::{AnnotatedSample, Annotation, Scenario, ValueDimension, Vote};

pub const DEFAULT_MIN_AGREE: u32 = 3;

/// All votes cast on one (scenario, dimension) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteGroup {
    pub scenario: Scenario,
    pub dimension: ValueDimension,
    pub votes: Vec<Vote>,
}

impl VoteGroup {
    fn tally(&self) -> BTreeMap<Vote, u32> {
        let mut t = BTreeMap::new();
        for &v in &self.votes {
            *t.entry(v).or_insert(0) += 1;
        }
        t
    }

    /// Modal vote and its count; `None` for the vote when the maximum is shared.
    pub fn mode(&self) -> (Option<Vote>, u32) {
        let tally = self.tally();
        let max = tally.values().copied().max().unwrap_or(0);
        let mut top = tally.iter().filter(|(_, &c)| c == max).map(|(&v, _)| v);
        match (top.next(), top.next()) {
            (Some(v), None) => (Some(v), max),
            _ => (None, max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    /// Two or more votes share the highest count.
    Tie,
    /// The modal count is below the agreement threshold.
    BelowAgreement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedGroup {
    pub scenario_id: String,
    pub dimension: ValueDimension,
    pub votes: Vec<Vote>,
    pub modal_count: u32,
    pub reason: DropReason,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Aggregation {
    pub samples: Vec<AnnotatedSample>,
    pub dropped: Vec<DroppedGroup>,
}

/// Groups annotations by (scenario, dimension) in first-seen order.
///
/// Rejects a worker voting twice on the same pair and a scenario id that
/// appears with two different texts.
pub fn group_annotations(annotations: &[Annotation]) -> Result<Vec<VoteGroup>> {
    let mut order: Vec<VoteGroup> = Vec::new();
    let mut slot: HashMap<(&str, ValueDimension), usize> = HashMap::new();
    let mut seen: HashSet<(&str, ValueDimension, &str)> = HashSet::new();
    for a in annotations {
        if !seen.insert((&a.scenario_id, a.dimension, &a.worker_id)) {
            return Err(Error::InvalidInput(format!(
                "worker {} voted more than once on ({}, {})",
                a.worker_id, a.scenario_id, a.dimension
            )));
        }
        let i = *slot.entry((&a.scenario_id, a.dimension)).or_insert_with(|| {
            order.push(VoteGroup {
                scenario: Scenario {
                    id: a.scenario_id.clone(),
                    text: a.scenario_text.clone(),
                },
                dimension: a.dimension,
                votes: Vec::new(),
            });
            order.len() - 1
        });
        if order[i].scenario.text != a.scenario_text {
            return Err(Error::InvalidInput(format!(
                "scenario {} appears with differing texts",
                a.scenario_id
            )));
        }
        order[i].votes.push(a.vote);
    }
    Ok(order)
}

/// Keeps every group whose unique modal vote has at least `min_agree` votes.
pub fn aggregate_annotations(annotations: &[Annotation], min_agree: u32) -> Result<Aggregation> {
    if min_agree == 0 {
        return Err(Error::InvalidInput("min_agree must be ≥ 1".into()));
    }
    let mut out = Aggregation::default();
    for group in group_annotations(annotations)? {
        let (modal, count) = group.mode();
        match modal {
            Some(vote) if count >= min_agree => out.samples.push(AnnotatedSample {
                scenario: group.scenario,
                dimension: group.dimension,
                label: vote.utility(),
                agreement: count,
            }),
            _ => out.dropped.push(DroppedGroup {
                scenario_id: group.scenario.id,
                dimension: group.dimension,
                modal_count: count,
                reason: if modal.is_none() {
                    DropReason::Tie
                } else {
                    DropReason::BelowAgreement
                },
                votes: group.votes,
            }),
        }
    }
    Ok(out)
}

/// Like [`aggregate_annotations`] with the default threshold, but groups that
/// would be dropped are kept with label 0 and their modal count as agreement.
pub fn make_augmented(annotations: &[Annotation]) -> Result<Vec<AnnotatedSample>> {
    let mut out = Vec::new();
    for group in group_annotations(annotations)? {
        let (modal, count) = group.mode();
        let label = match modal {
            Some(vote) if count >= DEFAULT_MIN_AGREE => vote.utility(),
            _ => 0,
        };
        out.push(AnnotatedSample {
            scenario: group.scenario,
            dimension: group.dimension,
            label,
            agreement: count,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Vote::*;

    fn annotations(votes: &[Vote]) -> Vec<Annotation> {
        votes
            .iter()
            .enumerate()
            .map(|(i, &vote)| Annotation {
                scenario_id: "s1".into(),
                scenario_text: "helping my neighbour move".into(),
                dimension: ValueDimension::Benevolence,
                worker_id: format!("w{i}"),
                vote,
            })
            .collect()
    }

    #[test]
    fn clear_majority_kept() {
        let agg = aggregate_annotations(&annotations(&[Yes, Yes, Yes, No]), 3).unwrap();
        assert_eq!(agg.samples.len(), 1);
        assert_eq!((agg.samples[0].label, agg.samples[0].agreement), (1, 3));
    }

    #[test]
    fn even_split_dropped_as_tie() {
        let agg = aggregate_annotations(&annotations(&[Yes, Yes, No, No]), 3).unwrap();
        assert!(agg.samples.is_empty());
        assert_eq!(agg.dropped[0].reason, DropReason::Tie);
        assert_eq!(agg.dropped[0].modal_count, 2);
    }

    #[test]
    fn weak_plurality_dropped_below_threshold() {
        let agg = aggregate_annotations(&annotations(&[Yes, Yes, No, Unrelated]), 3).unwrap();
        assert_eq!(agg.dropped[0].reason, DropReason::BelowAgreement);
    }

    #[test]
    fn unanimous_unrelated() {
        let agg = aggregate_annotations(&annotations(&[Unrelated; 4]), 3).unwrap();
        assert_eq!((agg.samples[0].label, agg.samples[0].agreement), (0, 4));
    }

    #[test]
    fn duplicate_worker_rejected() {
        let mut a = annotations(&[Yes, No]);
        a[1].worker_id = a[0].worker_id.clone();
        assert!(matches!(aggregate_annotations(&a, 3), Err(Error::InvalidInput(_))));
        assert!(make_augmented(&a).is_err());
    }

    #[test]
    fn augmented_relabels_low_agreement() {
        let s = make_augmented(&annotations(&[Yes, Yes, No, No])).unwrap();
        assert_eq!((s[0].label, s[0].agreement), (0, 2));
        let s = make_augmented(&annotations(&[Yes, Yes, Yes, No])).unwrap();
        assert_eq!((s[0].label, s[0].agreement), (1, 3));
    }

    #[test]
    fn groups_keep_first_seen_order() {
        let mut a = annotations(&[Yes]);
        a.push(Annotation {
            scenario_id: "s0".into(),
            scenario_text: "x".into(),
            dimension: ValueDimension::Power,
            worker_id: "w9".into(),
            vote: No,
        });
        let g = group_annotations(&a).unwrap();
        assert_eq!(g[0].scenario.id, "s1");
        assert_eq!(g[1].scenario.id, "s0");
    }
}
