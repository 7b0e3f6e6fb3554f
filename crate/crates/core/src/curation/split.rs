//! Seeded, stratified train/valid/test splitting.
//!
//! Global split sizes start from `⌊N·r⌋`; the units left over go to test,
//! then valid, then train, at most one each and only where the exact share
//! is fractional. Each (dimension, label) cell is then given per-split counts
//! within one sample of its exact share, chosen so the cell counts add up to
//! the global sizes (a controlled rounding of the cell × split table).

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::value::{AnnotatedSample, DatasetSplit, ValueDimension};

pub const DEFAULT_RATIOS: [f64; 3] = [0.75, 0.15, 0.10];

/// Stratification key.
pub type Cell = (ValueDimension, i8);

/// `n·r` with values within 1e-9 of an integer snapped to it, so that
/// e.g. 20 × 0.15 counts as exactly 3.
fn quota(n: usize, r: f64) -> f64 {
    let q = n as f64 * r;
    if (q - q.round()).abs() < 1e-9 {
        q.round()
    } else {
        q
    }
}

/// Global split sizes for `n` samples.
pub fn split_sizes(n: usize, ratios: [f64; 3]) -> [usize; 3] {
    let quotas = ratios.map(|r| quota(n, r));
    let mut sizes = quotas.map(|q| q.floor() as usize);
    let mut left = n.saturating_sub(sizes.iter().sum());
    for s in (0..3).rev() {
        if left > 0 && quotas[s] > quotas[s].floor() {
            sizes[s] += 1;
            left -= 1;
        }
    }
    // Only reachable through ratio rounding error; keep the total exact.
    sizes[0] += left;
    sizes
}

/// Rounds the cell × split quota table so rows sum to cell sizes, columns sum
/// to `targets`, and every entry is the floor of its exact quota or one more.
/// Cells with the largest fractional remainders receive the extra samples
/// first.
fn controlled_rounding(cell_sizes: &[usize], ratios: [f64; 3], targets: [usize; 3]) -> Vec<[usize; 3]> {
    let mut counts: Vec<[usize; 3]> = Vec::with_capacity(cell_sizes.len());
    let mut frac: Vec<[f64; 3]> = Vec::with_capacity(cell_sizes.len());
    for &n in cell_sizes {
        let mut row = [0usize; 3];
        let mut fr = [0f64; 3];
        for s in 0..3 {
            let q = quota(n, ratios[s]);
            row[s] = q.floor() as usize;
            fr[s] = q - q.floor();
        }
        counts.push(row);
        frac.push(fr);
    }
    let mut row_need: Vec<usize> = cell_sizes
        .iter()
        .zip(&counts)
        .map(|(&n, row)| n - row.iter().sum::<usize>())
        .collect();
    let mut col_need = [0usize; 3];
    for s in 0..3 {
        let placed: usize = counts.iter().map(|r| r[s]).sum();
        col_need[s] = targets[s].saturating_sub(placed);
    }

    // Bipartite b-matching: each extra unit goes from a cell with unmet size
    // to a split with unmet target, at most one extra per (cell, split).
    let mut extra = vec![[false; 3]; cell_sizes.len()];
    let mut edge_order: Vec<(usize, usize)> = (0..cell_sizes.len())
        .flat_map(|c| (0..3).map(move |s| (c, s)))
        .collect();
    edge_order.sort_by(|a, b| frac[b.0][b.1].total_cmp(&frac[a.0][a.1]).then(a.cmp(b)));

    fn augment(
        cell: usize,
        extra: &mut [[bool; 3]],
        col_need: &mut [usize; 3],
        visited: &mut [bool; 3],
        prefs: &[Vec<usize>],
    ) -> bool {
        for &s in &prefs[cell] {
            if extra[cell][s] || visited[s] {
                continue;
            }
            visited[s] = true;
            if col_need[s] > 0 {
                col_need[s] -= 1;
                extra[cell][s] = true;
                return true;
            }
            // Split s is full: try to move one of its extras elsewhere.
            for other in 0..extra.len() {
                if other != cell && extra[other][s] {
                    extra[other][s] = false;
                    if augment(other, extra, col_need, visited, prefs) {
                        extra[cell][s] = true;
                        return true;
                    }
                    extra[other][s] = true;
                }
            }
        }
        false
    }

    let mut prefs: Vec<Vec<usize>> = vec![Vec::new(); cell_sizes.len()];
    for &(c, s) in &edge_order {
        prefs[c].push(s);
    }
    for &(c, s) in &edge_order {
        if row_need[c] > 0 && col_need[s] > 0 && !extra[c][s] {
            extra[c][s] = true;
            row_need[c] -= 1;
            col_need[s] -= 1;
        }
    }
    for c in 0..cell_sizes.len() {
        while row_need[c] > 0 {
            let mut visited = [false; 3];
            let ok = augment(c, &mut extra, &mut col_need, &mut visited, &prefs);
            assert!(ok, "controlled rounding always exists for a 2-D table");
            row_need[c] -= 1;
        }
    }
    for (row, ex) in counts.iter_mut().zip(&extra) {
        for s in 0..3 {
            row[s] += ex[s] as usize;
        }
    }
    counts
}

pub fn split_dataset(samples: &[AnnotatedSample], ratios: [f64; 3], seed: u64) -> Result<DatasetSplit> {
    if ratios.iter().any(|&r| r.is_nan() || r <= 0.0) || (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "split ratios {ratios:?} must be positive and sum to 1"
        )));
    }
    let mut cells: BTreeMap<Cell, Vec<&AnnotatedSample>> = BTreeMap::new();
    for s in samples {
        cells.entry((s.dimension, s.label)).or_default().push(s);
    }
    let sizes: Vec<usize> = cells.values().map(Vec::len).collect();
    let targets = split_sizes(samples.len(), ratios);
    let counts = controlled_rounding(&sizes, ratios, targets);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts: [Vec<AnnotatedSample>; 3] = Default::default();
    for (members, count) in cells.into_values().zip(counts) {
        let mut members = members;
        members.shuffle(&mut rng);
        let mut it = members.into_iter();
        for (s, part) in parts.iter_mut().enumerate() {
            part.extend(it.by_ref().take(count[s]).cloned());
        }
    }
    for part in parts.iter_mut() {
        part.shuffle(&mut rng);
    }
    let [train, valid, test] = parts;
    Ok(DatasetSplit {
        train,
        valid,
        test,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Scenario;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn corpus(cells: &[(ValueDimension, i8, usize)]) -> Vec<AnnotatedSample> {
        let mut out = Vec::new();
        for &(dim, label, n) in cells {
            for i in 0..n {
                out.push(AnnotatedSample {
                    scenario: Scenario {
                        id: format!("{dim}-{label}-{i}"),
                        text: format!("scenario {i}"),
                    },
                    dimension: dim,
                    label,
                    agreement: 3,
                });
            }
        }
        out
    }

    #[test]
    fn sizes_stay_within_one_of_quota() {
        assert_eq!(split_sizes(19, DEFAULT_RATIOS), [14, 3, 2]);
        assert_eq!(split_sizes(0, DEFAULT_RATIOS), [0, 0, 0]);
        assert_eq!(split_sizes(1, DEFAULT_RATIOS), [0, 0, 1]);
    }

    #[test]
    fn uniform_twenty() {
        let c = corpus(&[(ValueDimension::Power, 1, 20)]);
        let s = split_dataset(&c, DEFAULT_RATIOS, 7).unwrap();
        assert_eq!(s.counts(), (15, 3, 2));
    }

    #[test]
    fn global_sizes_for_full_corpus() {
        assert_eq!(split_sizes(21_374, DEFAULT_RATIOS), [16_030, 3_206, 2_138]);
    }

    #[test]
    fn same_seed_same_split() {
        let c = corpus(&[(ValueDimension::Power, 1, 13), (ValueDimension::Security, -1, 9)]);
        let a = split_dataset(&c, DEFAULT_RATIOS, 3).unwrap();
        let b = split_dataset(&c, DEFAULT_RATIOS, 3).unwrap();
        assert_eq!(a, b);
        let other = split_dataset(&c, DEFAULT_RATIOS, 4).unwrap();
        assert_ne!(a.train, other.train);
    }

    #[test]
    fn bad_ratios_rejected() {
        let c = corpus(&[(ValueDimension::Power, 1, 3)]);
        assert!(split_dataset(&c, [0.5, 0.5, 0.0], 1).is_err());
        assert!(split_dataset(&c, [0.5, 0.3, 0.3], 1).is_err());
    }

    fn arb_cells() -> impl Strategy<Value = Vec<(ValueDimension, i8, usize)>> {
        proptest::collection::vec((0usize..10, -1i8..=1, 0usize..40), 1..12).prop_map(|v| {
            let mut seen = HashSet::new();
            v.into_iter()
                .filter(|&(d, l, _)| seen.insert((d, l)))
                .map(|(d, l, n)| (ValueDimension::ALL[d], l, n))
                .collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn split_contract(cells in arb_cells(), seed in any::<u64>()) {
            let c = corpus(&cells);
            let s = split_dataset(&c, DEFAULT_RATIOS, seed).unwrap();
            let mut keys = HashSet::new();
            for x in s.train.iter().chain(&s.valid).chain(&s.test) {
                prop_assert!(keys.insert((x.scenario.id.clone(), x.dimension)));
            }
            prop_assert_eq!(keys.len(), c.len());
            let sizes = split_sizes(c.len(), DEFAULT_RATIOS);
            prop_assert_eq!(s.counts(), (sizes[0], sizes[1], sizes[2]));
            for &(dim, label, n) in &cells {
                for (part, r) in [&s.train, &s.valid, &s.test].into_iter().zip(DEFAULT_RATIOS) {
                    let k = part.iter().filter(|x| x.dimension == dim && x.label == label).count();
                    prop_assert!((k as f64 - n as f64 * r).abs() <= 1.0 + 1e-9);
                }
            }
            prop_assert_eq!(split_dataset(&c, DEFAULT_RATIOS, seed).unwrap(), s);
        }
    }
}
