//! Evaluation metrics and report rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::value_model::{label_to_class, round_utility, ValueModel, CLASS_LABELS};
use crate::value::{AnnotatedSample, ValueDimension};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: i8,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub samples: usize,
    /// Ordered by label -1, 0, +1.
    pub classes: [ClassMetrics; 3],
    pub accuracy: f64,
    pub mse: f64,
    pub per_dimension: BTreeMap<ValueDimension, f64>,
    /// `confusion[gold][predicted]`, classes ordered -1, 0, +1.
    pub confusion: [[usize; 3]; 3],
}

/// One scored example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub dimension: ValueDimension,
    pub label: i8,
    pub utility: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Builds a report from scored examples; the predicted class is the rounded
/// utility.
pub fn evaluate_predictions(preds: &[Prediction]) -> Result<EvalReport> {
    if preds.is_empty() {
        return Err(Error::InvalidInput("no samples to evaluate".into()));
    }
    let mut confusion = [[0usize; 3]; 3];
    let mut sq = 0.0;
    let mut per_dim: BTreeMap<ValueDimension, (usize, usize)> = BTreeMap::new();
    for p in preds {
        if !(-1..=1).contains(&p.label) {
            return Err(Error::InvalidInput(format!("label {} out of range", p.label)));
        }
        let predicted = round_utility(p.utility);
        confusion[label_to_class(p.label)][label_to_class(predicted)] += 1;
        let d = p.utility - p.label as f64;
        sq += d * d;
        let e = per_dim.entry(p.dimension).or_default();
        e.0 += (predicted == p.label) as usize;
        e.1 += 1;
    }
    let classes = std::array::from_fn(|c| {
        let tp = confusion[c][c];
        let predicted: usize = (0..3).map(|g| confusion[g][c]).sum();
        let gold: usize = confusion[c].iter().sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, gold);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ClassMetrics {
            label: CLASS_LABELS[c],
            precision,
            recall,
            f1,
            support: gold,
        }
    });
    let correct: usize = (0..3).map(|c| confusion[c][c]).sum();
    Ok(EvalReport {
        samples: preds.len(),
        classes,
        accuracy: ratio(correct, preds.len()),
        mse: sq / preds.len() as f64,
        per_dimension: per_dim.into_iter().map(|(d, (k, n))| (d, ratio(k, n))).collect(),
        confusion,
    })
}

pub fn predict_samples(model: &ValueModel, samples: &[AnnotatedSample]) -> Vec<Prediction> {
    samples
        .iter()
        .map(|s| Prediction {
            dimension: s.dimension,
            label: s.label,
            utility: model.utility_of(&model.featurize_text(&s.scenario.text, s.dimension)),
        })
        .collect()
}

pub fn evaluate(model: &ValueModel, samples: &[AnnotatedSample]) -> Result<EvalReport> {
    evaluate_predictions(&predict_samples(model, samples))
}

impl EvalReport {
    /// Overall metrics in the column order F1, P, R (each for -1, 0, 1),
    /// Acc., MSE, then per-dimension accuracy.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut header = Vec::new();
        let mut row = Vec::new();
        for (name, get) in [
            ("F1", (|m: &ClassMetrics| m.f1) as fn(&ClassMetrics) -> f64),
            ("P", |m| m.precision),
            ("R", |m| m.recall),
        ] {
            for m in &self.classes {
                header.push(format!("{name}({})", m.label));
                row.push(format!("{:.2}", get(m)));
            }
        }
        header.push("Acc.".into());
        row.push(format!("{:.2}", self.accuracy));
        header.push("MSE".into());
        row.push(format!("{:.2}", self.mse));
        writeln!(out, "{}", header.join("\t")).unwrap();
        writeln!(out, "{}", row.join("\t")).unwrap();
        writeln!(out).unwrap();
        let dims: Vec<&ValueDimension> = self.per_dimension.keys().collect();
        let codes: Vec<&str> = dims.iter().map(|d| d.code()).collect();
        writeln!(out, "Acc.\t{}", codes.join("\t")).unwrap();
        let accs: Vec<String> = self.per_dimension.values().map(|a| format!("{a:.2}")).collect();
        writeln!(out, "\t{}", accs.join("\t")).unwrap();
        writeln!(out).unwrap();
        writeln!(out, "samples\t{}", self.samples).unwrap();
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(label: i8, utility: f64) -> Prediction {
        Prediction {
            dimension: ValueDimension::Power,
            label,
            utility,
        }
    }

    #[test]
    fn perfect_predictions() {
        let preds: Vec<_> = [-1i8, 0, 1, 1].iter().map(|&l| p(l, l as f64)).collect();
        let r = evaluate_predictions(&preds).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.mse, 0.0);
        assert!(r.classes.iter().all(|c| c.f1 == 1.0));
    }

    #[test]
    fn hand_confusion() {
        // class +1: TP = 3, FP = 1, FN = 2 over ten samples
        let mut preds = vec![p(1, 1.0), p(1, 1.0), p(1, 1.0)];
        preds.push(p(0, 1.0));
        preds.push(p(1, 0.0));
        preds.push(p(1, -1.0));
        preds.extend([p(0, 0.0), p(0, 0.0), p(-1, -1.0), p(-1, -1.0)]);
        let r = evaluate_predictions(&preds).unwrap();
        let pos = r.classes[2];
        assert_eq!(pos.precision, 0.75);
        assert_eq!(pos.recall, 0.6);
        assert!((pos.f1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.accuracy, 0.7);
        // squared errors: 1 + 1 + 4 over ten samples
        assert!((r.mse - 0.6).abs() < 1e-15);
    }

    #[test]
    fn zero_over_zero_is_zero() {
        let r = evaluate_predictions(&[p(0, 0.0)]).unwrap();
        assert_eq!(r.classes[0].precision, 0.0);
        assert_eq!(r.classes[0].recall, 0.0);
        assert_eq!(r.classes[0].f1, 0.0);
    }

    #[test]
    fn zero_predictor_mse_is_nonzero_fraction() {
        let labels = [-1i8, 0, 0, 1, 1, 1, 0];
        let preds: Vec<_> = labels.iter().map(|&l| p(l, 0.0)).collect();
        let r = evaluate_predictions(&preds).unwrap();
        assert!((r.mse - 4.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn text_layout() {
        let r = evaluate_predictions(&[p(1, 0.9), p(-1, 0.2)]).unwrap();
        let text = r.to_text();
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            "F1(-1)\tF1(0)\tF1(1)\tP(-1)\tP(0)\tP(1)\tR(-1)\tR(0)\tR(1)\tAcc.\tMSE"
        );
        assert!(text.contains("Acc.\tPOW"));
        let back: EvalReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn empty_rejected() {
        assert!(evaluate_predictions(&[]).is_err());
    }
}
