//! Balanced and augmented dataset variants.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use crate::curation::aggregate::make_augmented;
use crate::error::{Error, Result};
use crate::value::{AnnotatedSample, ValueDimension};

pub const BALANCED_DIMENSION: ValueDimension = ValueDimension::Benevolence;

/// Target count for one label: the mean count of that label over the other
/// nine dimensions, rounded to the nearest integer.
pub fn balance_target(samples: &[AnnotatedSample], label: i8) -> usize {
    let others = ValueDimension::ALL
        .iter()
        .filter(|&&d| d != BALANCED_DIMENSION);
    let total: usize = others
        .map(|&d| {
            samples
                .iter()
                .filter(|s| s.dimension == d && s.label == label)
                .count()
        })
        .sum();
    (total as f64 / 9.0).round() as usize
}

/// Down-samples negative and neutral benevolence samples to
/// [`balance_target`]. Positive benevolence samples and every other
/// dimension pass through untouched; surviving samples keep their order.
pub fn make_balanced(samples: &[AnnotatedSample], seed: u64) -> Result<Vec<AnnotatedSample>> {
    if !samples.iter().any(|s| s.dimension == BALANCED_DIMENSION) {
        return Err(Error::InvalidInput(format!(
            "no {} samples to balance",
            BALANCED_DIMENSION.name()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut removed: BTreeSet<usize> = BTreeSet::new();
    for label in [-1i8, 0] {
        let target = balance_target(samples, label);
        let members: Vec<usize> = samples
            .iter()
            .enumerate()
            .filter(|(_, s)| s.dimension == BALANCED_DIMENSION && s.label == label)
            .map(|(i, _)| i)
            .collect();
        if members.len() <= target {
            continue;
        }
        let keep: BTreeSet<usize> = index::sample(&mut rng, members.len(), target)
            .into_iter()
            .map(|k| members[k])
            .collect();
        removed.extend(members.into_iter().filter(|i| !keep.contains(i)));
    }
    Ok(samples
        .iter()
        .enumerate()
        .filter(|(i, _)| !removed.contains(i))
        .map(|(_, s)| s.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Scenario;

    fn push(out: &mut Vec<AnnotatedSample>, dim: ValueDimension, label: i8, n: usize) {
        for i in 0..n {
            out.push(AnnotatedSample {
                scenario: Scenario {
                    id: format!("{dim}{label}{i}{}", out.len()),
                    text: "t".into(),
                },
                dimension: dim,
                label,
                agreement: 3,
            });
        }
    }

    fn count(s: &[AnnotatedSample], dim: ValueDimension, label: i8) -> usize {
        s.iter().filter(|x| x.dimension == dim && x.label == label).count()
    }

    #[test]
    fn reduces_benevolence_negatives_to_mean() {
        let mut s = Vec::new();
        push(&mut s, BALANCED_DIMENSION, -1, 10);
        push(&mut s, BALANCED_DIMENSION, 1, 12);
        for d in ValueDimension::ALL.iter().filter(|&&d| d != BALANCED_DIMENSION) {
            push(&mut s, *d, -1, 4);
        }
        let out = make_balanced(&s, 1).unwrap();
        assert_eq!(count(&out, BALANCED_DIMENSION, -1), 4);
        assert_eq!(count(&out, BALANCED_DIMENSION, 1), 12);
        for d in ValueDimension::ALL.iter().filter(|&&d| d != BALANCED_DIMENSION) {
            assert_eq!(count(&out, *d, -1), 4);
        }
    }

    #[test]
    fn already_small_is_unchanged() {
        let mut s = Vec::new();
        push(&mut s, BALANCED_DIMENSION, 0, 2);
        push(&mut s, ValueDimension::Power, 0, 30);
        assert_eq!(make_balanced(&s, 9).unwrap(), s);
    }

    #[test]
    fn seeded_and_order_preserving() {
        let mut s = Vec::new();
        push(&mut s, BALANCED_DIMENSION, 0, 50);
        push(&mut s, ValueDimension::Power, 0, 45);
        let a = make_balanced(&s, 5).unwrap();
        assert_eq!(a, make_balanced(&s, 5).unwrap());
        let idx: Vec<usize> = a
            .iter()
            .map(|x| s.iter().position(|y| y == x).unwrap())
            .collect();
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn requires_benevolence() {
        let mut s = Vec::new();
        push(&mut s, ValueDimension::Power, 0, 3);
        assert!(make_balanced(&s, 0).is_err());
    }
}
