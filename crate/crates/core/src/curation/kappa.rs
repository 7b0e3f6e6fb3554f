//! Fleiss' kappa and raw agreement over three-way votes.

use serde::Serialize;

use crate::curation::aggregate::VoteGroup;
use crate::error::{Error, Result};
use crate::value::Vote;

/// Vote tallies for one item, ordered as [`Vote::ALL`] (yes, no, unrelated).
pub type VoteCounts = [u32; 3];

pub fn tally(votes: &[Vote]) -> VoteCounts {
    let mut c = [0u32; 3];
    for v in votes {
        let k = Vote::ALL.iter().position(|x| x == v).expect("closed set");
        c[k] += 1;
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    /// Mean per-item pairwise agreement (observed agreement).
    pub raw_agreement: f64,
    pub fleiss_kappa: f64,
    pub per_item_counts: Vec<VoteCounts>,
}

struct Components {
    observed: f64,
    expected: f64,
    categories_used: usize,
}

fn components(items: &[VoteCounts]) -> Result<Components> {
    let first = items
        .first()
        .ok_or_else(|| Error::InvalidInput("no items to compute agreement over".into()))?;
    let n: u32 = first.iter().sum();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "each item needs at least 2 raters, found {n}"
        )));
    }
    if let Some((i, c)) = items.iter().enumerate().find(|(_, c)| c.iter().sum::<u32>() != n) {
        return Err(Error::InvalidInput(format!(
            "item {i} has {} raters, expected {n} for every item",
            c.iter().sum::<u32>()
        )));
    }
    let n = n as f64;
    let count = items.len() as f64;
    let observed = items
        .iter()
        .map(|c| {
            let sq: f64 = c.iter().map(|&x| (x as f64) * (x as f64)).sum();
            (sq - n) / (n * (n - 1.0))
        })
        .sum::<f64>()
        / count;
    let mut totals = [0u64; 3];
    for c in items {
        for k in 0..3 {
            totals[k] += c[k] as u64;
        }
    }
    let expected = totals
        .iter()
        .map(|&t| {
            let p = t as f64 / (count * n);
            p * p
        })
        .sum();
    Ok(Components {
        observed,
        expected,
        categories_used: totals.iter().filter(|&&t| t > 0).count(),
    })
}

/// Fleiss' kappa over items that all have the same number of raters.
///
/// When every vote falls in one category the chance agreement is 1; this is
/// reported as perfect agreement (1.0).
pub fn fleiss_kappa(items: &[VoteCounts]) -> Result<f64> {
    let c = components(items)?;
    if c.categories_used == 1 {
        return Ok(1.0);
    }
    Ok((c.observed - c.expected) / (1.0 - c.expected))
}

pub fn agreement_report(groups: &[VoteGroup]) -> Result<AgreementReport> {
    let counts: Vec<VoteCounts> = groups.iter().map(|g| tally(&g.votes)).collect();
    let c = components(&counts)?;
    let kappa = if c.categories_used == 1 {
        1.0
    } else {
        (c.observed - c.expected) / (1.0 - c.expected)
    };
    Ok(AgreementReport {
        raw_agreement: c.observed,
        fleiss_kappa: kappa,
        per_item_counts: counts,
    })
}
