//! Value-feature fusion for downstream classifiers: `e = softmax(W·[h; v] + b)`.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::{ValueDimension, ValueVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionHead {
    pub classes: usize,
    pub text_dim: usize,
    /// `classes × (text_dim + 10)`, row-major; the last ten columns of each
    /// row weight the value vector.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl FusionHead {
    pub fn zeros(classes: usize, text_dim: usize) -> Result<Self> {
        if classes < 2 {
            return Err(Error::InvalidInput(format!("fusion head needs ≥ 2 classes, got {classes}")));
        }
        Ok(FusionHead {
            classes,
            text_dim,
            weights: vec![0.0; classes * (text_dim + ValueDimension::COUNT)],
            bias: vec![0.0; classes],
        })
    }

    pub fn input_dim(&self) -> usize {
        self.text_dim + ValueDimension::COUNT
    }

    fn check(&self) -> Result<()> {
        if self.classes < 2 || self.weights.len() != self.classes * self.input_dim() || self.bias.len() != self.classes {
            return Err(Error::InvalidInput("fusion head shape is inconsistent".into()));
        }
        Ok(())
    }

    /// Sets every value-feature weight to zero.
    pub fn zero_value_columns(&mut self) {
        let d = self.input_dim();
        for c in 0..self.classes {
            for w in &mut self.weights[c * d + self.text_dim..(c + 1) * d] {
                *w = 0.0;
            }
        }
    }

    fn logits(&self, x: &[f64]) -> Vec<f64> {
        let d = self.input_dim();
        (0..self.classes)
            .map(|c| self.weights[c * d..(c + 1) * d].iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + self.bias[c])
            .collect()
    }
}

pub(crate) fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|x| (x - max).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

fn concat(text: &[f64], value: &ValueVector) -> Vec<f64> {
    let mut x = text.to_vec();
    x.extend_from_slice(value.components());
    x
}

/// Class distribution for one input.
pub fn fuse_emotion_features(text: &[f64], value: &ValueVector, head: &FusionHead) -> Result<Vec<f64>> {
    head.check()?;
    if text.len() != head.text_dim {
        return Err(Error::InvalidInput(format!(
            "text feature length {} does not match fusion head ({})",
            text.len(),
            head.text_dim
        )));
    }
    if text.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("text features must be finite".into()));
    }
    Ok(softmax(&head.logits(&concat(text, value))))
}

/// One training example for a fusion head.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionExample {
    pub text: Vec<f64>,
    pub value: ValueVector,
    pub class: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionTrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Train without the value columns, for ablation.
    pub text_only: bool,
}

impl Default for FusionTrainConfig {
    fn default() -> Self {
        FusionTrainConfig {
            learning_rate: 0.1,
            epochs: 20,
            batch_size: 32,
            seed: 0,
            text_only: false,
        }
    }
}

/// Softmax regression by minibatch SGD on cross-entropy. Returns the
/// per-epoch mean loss.
pub fn train_fusion_head(head: &mut FusionHead, data: &[FusionExample], config: &FusionTrainConfig) -> Result<Vec<f64>> {
    head.check()?;
    if data.is_empty() {
        return Err(Error::InvalidInput("no fusion training examples".into()));
    }
    if config.epochs == 0 {
        return Err(Error::InvalidInput("epochs must be ≥ 1".into()));
    }
    for ex in data {
        if ex.text.len() != head.text_dim || ex.class >= head.classes {
            return Err(Error::InvalidInput("fusion example does not match head shape".into()));
        }
    }
    if config.text_only {
        head.zero_value_columns();
    }
    let d = head.input_dim();
    let inputs: Vec<Vec<f64>> = data.iter().map(|e| concat(&e.text, &e.value)).collect();
    let batch = if config.batch_size == 0 { data.len() } else { config.batch_size.min(data.len()) };
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut trace = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            let scale = config.learning_rate / chunk.len() as f64;
            let mut gw = vec![0.0; head.weights.len()];
            let mut gb = vec![0.0; head.classes];
            for &i in chunk {
                let mut p = softmax(&head.logits(&inputs[i]));
                p[data[i].class] -= 1.0;
                for c in 0..head.classes {
                    gb[c] += p[c];
                    for k in 0..d {
                        gw[c * d + k] += p[c] * inputs[i][k];
                    }
                }
            }
            for (w, g) in head.weights.iter_mut().zip(&gw) {
                *w -= scale * g;
            }
            for (b, g) in head.bias.iter_mut().zip(&gb) {
                *b -= scale * g;
            }
            if config.text_only {
                head.zero_value_columns();
            }
        }
        let loss = inputs
            .iter()
            .zip(data)
            .map(|(x, e)| -softmax(&head.logits(x))[e.class].ln())
            .sum::<f64>()
            / data.len() as f64;
        if !loss.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        trace.push(loss);
    }
    Ok(trace)
}

/// Reads `label<TAB>text` lines, skipping blank lines. Labels are returned
/// in first-seen order and texts are paired with label indices into it.
pub fn read_labeled_text(path: &Path) -> Result<(Vec<String>, Vec<(usize, String)>)> {
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut labels: Vec<String> = Vec::new();
    let mut rows = Vec::new();
    for (n, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let Some((label, text)) = line.split_once('\t') else {
            return Err(Error::parse(path, n + 1, "label", "expected `label<TAB>text`"));
        };
        let label = label.trim();
        if label.is_empty() {
            return Err(Error::parse(path, n + 1, "label", "empty label"));
        }
        let idx = match labels.iter().position(|l| l == label) {
            Some(i) => i,
            None => {
                labels.push(label.to_string());
                labels.len() - 1
            }
        };
        rows.push((idx, text.to_string()));
    }
    Ok((labels, rows))
}
