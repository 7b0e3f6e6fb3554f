//! The hashed bag-of-n-grams value model.
//!
//! An input `(text, dimension)` is pooled as the mean of the embeddings of
//! its hashed n-grams and the dimension's prompt embedding. A regression
//! head maps the pooled vector to `tanh(z / 2) = 2σ(z) − 1`; a classification
//! head maps it to a softmax over the labels (-1, 0, +1).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::features::{hash_ngrams, Features};
use crate::model::fusion::softmax;
use crate::text::{tokenize, TokenizerConfig};
use crate::value::{AnnotatedSample, Utility, ValueDimension, ValueVector};

/// Largest double strictly below 1; utilities are kept inside `(-1, 1)` even
/// when `tanh` or the softmax saturates.
const OPEN_UNIT: f64 = 1.0 - f64::EPSILON / 2.0;

pub const CLASS_LABELS: [i8; 3] = [-1, 0, 1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Regression,
    Classification,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Regression => "regression",
            Mode::Classification => "classification",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regression" => Ok(Mode::Regression),
            "classification" => Ok(Mode::Classification),
            _ => Err(Error::InvalidInput(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub hash_dim: usize,
    pub embed_dim: usize,
    pub mode: Mode,
    pub tokenizer: TokenizerConfig,
    /// Seed for parameter initialization.
    pub seed: u64,
    /// Seed mixed into the n-gram hash.
    pub hash_seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            hash_dim: 1 << 18,
            embed_dim: 32,
            mode: Mode::Regression,
            tokenizer: TokenizerConfig::default(),
            seed: 0,
            hash_seed: 0x005e_ed0f_7a1e,
        }
    }
}

/// Maps a label in {-1, 0, +1} to its class index.
pub fn label_to_class(label: i8) -> usize {
    (label + 1) as usize
}

/// Addresses a single scalar parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Feature { row: usize, col: usize },
    Prompt { dim: ValueDimension, col: usize },
    HeadWeight { class: usize, col: usize },
    HeadBias { class: usize },
}

/// Sparse gradient of a batch loss.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub features: BTreeMap<usize, Vec<f64>>,
    pub prompts: Vec<f64>,
    pub head_weights: Vec<f64>,
    pub head_bias: Vec<f64>,
}

impl Gradient {
    fn zeros(model: &ValueModel) -> Self {
        Gradient {
            features: BTreeMap::new(),
            prompts: vec![0.0; model.prompts.len()],
            head_weights: vec![0.0; model.head_weights.len()],
            head_bias: vec![0.0; model.head_bias.len()],
        }
    }

    pub fn get(&self, p: Param, embed_dim: usize) -> f64 {
        match p {
            Param::Feature { row, col } => self.features.get(&row).map_or(0.0, |g| g[col]),
            Param::Prompt { dim, col } => self.prompts[dim.index() * embed_dim + col],
            Param::HeadWeight { class, col } => self.head_weights[class * embed_dim + col],
            Param::HeadBias { class } => self.head_bias[class],
        }
    }

    /// Every parameter the gradient touches.
    pub fn params(&self, embed_dim: usize) -> Vec<Param> {
        let mut out = Vec::new();
        for &row in self.features.keys() {
            out.extend((0..embed_dim).map(|col| Param::Feature { row, col }));
        }
        for dim in ValueDimension::ALL {
            out.extend((0..embed_dim).map(|col| Param::Prompt { dim, col }));
        }
        for class in 0..self.head_bias.len() {
            out.extend((0..embed_dim).map(|col| Param::HeadWeight { class, col }));
            out.push(Param::HeadBias { class });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueModel {
    config: ModelConfig,
    /// `hash_dim × embed_dim`, row-major.
    features: Vec<f64>,
    /// `10 × embed_dim`, canonical dimension order.
    prompts: Vec<f64>,
    /// `classes × embed_dim`; one row in regression mode, three otherwise.
    head_weights: Vec<f64>,
    head_bias: Vec<f64>,
}

fn head_rows(mode: Mode) -> usize {
    match mode {
        Mode::Regression => 1,
        Mode::Classification => 3,
    }
}

impl ValueModel {
    /// All parameters zero.
    pub fn zeros(config: ModelConfig) -> Result<Self> {
        if config.hash_dim == 0 || config.embed_dim == 0 {
            return Err(Error::InvalidInput("hash_dim and embed_dim must be ≥ 1".into()));
        }
        if config.tokenizer.ngram_order == 0 {
            return Err(Error::InvalidInput("ngram_order must be ≥ 1".into()));
        }
        let de = config.embed_dim;
        let rows = head_rows(config.mode);
        Ok(ValueModel {
            features: vec![0.0; config.hash_dim * de],
            prompts: vec![0.0; ValueDimension::COUNT * de],
            head_weights: vec![0.0; rows * de],
            head_bias: vec![0.0; rows],
            config,
        })
    }

    /// Embeddings uniform in ±1/√embed_dim, heads zero.
    pub fn new(config: ModelConfig) -> Result<Self> {
        let mut m = Self::zeros(config)?;
        let bound = 1.0 / (m.config.embed_dim as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(m.config.seed);
        for x in m.features.iter_mut().chain(m.prompts.iter_mut()) {
            *x = rng.random_range(-bound..bound);
        }
        Ok(m)
    }

    pub(crate) fn from_parts(
        config: ModelConfig,
        features: Vec<f64>,
        prompts: Vec<f64>,
        head_weights: Vec<f64>,
        head_bias: Vec<f64>,
    ) -> Result<Self> {
        let de = config.embed_dim;
        let rows = head_rows(config.mode);
        if features.len() != config.hash_dim * de
            || prompts.len() != ValueDimension::COUNT * de
            || head_weights.len() != rows * de
            || head_bias.len() != rows
        {
            return Err(Error::InvalidInput("parameter shapes do not match config".into()));
        }
        Ok(ValueModel {
            config,
            features,
            prompts,
            head_weights,
            head_bias,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    pub(crate) fn tensors(&self) -> [&[f64]; 4] {
        [&self.features, &self.prompts, &self.head_weights, &self.head_bias]
    }

    pub fn param(&self, p: Param) -> f64 {
        let de = self.config.embed_dim;
        match p {
            Param::Feature { row, col } => self.features[row * de + col],
            Param::Prompt { dim, col } => self.prompts[dim.index() * de + col],
            Param::HeadWeight { class, col } => self.head_weights[class * de + col],
            Param::HeadBias { class } => self.head_bias[class],
        }
    }

    pub fn set_param(&mut self, p: Param, value: f64) {
        let de = self.config.embed_dim;
        let slot = match p {
            Param::Feature { row, col } => &mut self.features[row * de + col],
            Param::Prompt { dim, col } => &mut self.prompts[dim.index() * de + col],
            Param::HeadWeight { class, col } => &mut self.head_weights[class * de + col],
            Param::HeadBias { class } => &mut self.head_bias[class],
        };
        *slot = value;
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        tokenize(text, &self.config.tokenizer)
    }

    pub fn featurize(&self, tokens: &[String], dimension: ValueDimension) -> Features {
        Features {
            ngrams: hash_ngrams(tokens, &self.config.tokenizer, self.config.hash_dim, self.config.hash_seed),
            prompt: dimension,
        }
    }

    pub fn featurize_text(&self, text: &str, dimension: ValueDimension) -> Features {
        self.featurize(&self.tokenize(text), dimension)
    }

    fn feature_row(&self, row: usize) -> &[f64] {
        let de = self.config.embed_dim;
        &self.features[row * de..(row + 1) * de]
    }

    fn prompt_row(&self, dim: ValueDimension) -> &[f64] {
        let de = self.config.embed_dim;
        &self.prompts[dim.index() * de..(dim.index() + 1) * de]
    }

    /// Mean of the n-gram embeddings and the prompt embedding.
    pub fn pooled(&self, f: &Features) -> Vec<f64> {
        let mut h = self.prompt_row(f.prompt).to_vec();
        for &j in &f.ngrams {
            for (acc, x) in h.iter_mut().zip(self.feature_row(j)) {
                *acc += x;
            }
        }
        let n = f.pooled_len() as f64;
        h.iter_mut().for_each(|x| *x /= n);
        h
    }

    /// Mean n-gram embedding of `text`, without any prompt; zeros for empty text.
    pub fn text_features(&self, text: &str) -> Vec<f64> {
        let tokens = self.tokenize(text);
        let idx = hash_ngrams(&tokens, &self.config.tokenizer, self.config.hash_dim, self.config.hash_seed);
        let mut h = vec![0.0; self.config.embed_dim];
        if idx.is_empty() {
            return h;
        }
        for &j in &idx {
            for (acc, x) in h.iter_mut().zip(self.feature_row(j)) {
                *acc += x;
            }
        }
        let n = idx.len() as f64;
        h.iter_mut().for_each(|x| *x /= n);
        h
    }

    fn head_row(&self, class: usize) -> &[f64] {
        let de = self.config.embed_dim;
        &self.head_weights[class * de..(class + 1) * de]
    }

    fn logits(&self, h: &[f64]) -> Vec<f64> {
        (0..self.head_bias.len())
            .map(|c| {
                self.head_row(c).iter().zip(h).map(|(w, x)| w * x).sum::<f64>() + self.head_bias[c]
            })
            .collect()
    }

    fn regression_output(z: f64) -> f64 {
        (z / 2.0).tanh().clamp(-OPEN_UNIT, OPEN_UNIT)
    }

    /// Continuous utility for featurized input: the regression output, or the
    /// expected label under the class distribution.
    pub fn utility_of(&self, f: &Features) -> f64 {
        let z = self.logits(&self.pooled(f));
        match self.config.mode {
            Mode::Regression => Self::regression_output(z[0]),
            Mode::Classification => {
                let p = softmax(&z);
                (p[2] - p[0]).clamp(-OPEN_UNIT, OPEN_UNIT)
            }
        }
    }

    /// Class probabilities over (-1, 0, +1). Classification mode only.
    pub fn class_probabilities(&self, text: &str, dimension: ValueDimension) -> Result<[f64; 3]> {
        if self.config.mode != Mode::Classification {
            return Err(Error::ModeMismatch {
                expected: Mode::Classification.as_str(),
                found: self.config.mode.as_str(),
            });
        }
        let p = softmax(&self.logits(&self.pooled(&self.featurize_text(text, dimension))));
        Ok([p[0], p[1], p[2]])
    }

    /// Label predicted for featurized input: the utility rounded half away
    /// from zero. In classification mode the utility is the expected label.
    pub fn predicted_label(&self, f: &Features) -> i8 {
        round_utility(self.utility_of(f))
    }

    /// `2σ(w·h + b) − 1` for one dimension. Regression mode only.
    pub fn predict_utility(&self, scenario: &str, dimension: ValueDimension) -> Result<Utility> {
        if self.config.mode != Mode::Regression {
            return Err(Error::ModeMismatch {
                expected: Mode::Regression.as_str(),
                found: self.config.mode.as_str(),
            });
        }
        Utility::new(self.utility_of(&self.featurize_text(scenario, dimension)))
    }

    /// One utility per dimension in canonical order.
    pub fn predict_vector(&self, scenario: &str) -> ValueVector {
        let tokens = self.tokenize(scenario);
        ValueVector::from_fn(|dim| self.utility_of(&self.featurize(&tokens, dim)))
            .expect("model outputs lie in [-1, 1]")
    }

    /// Per-sample loss (squared error or cross-entropy) without any penalty.
    pub fn sample_loss(&self, f: &Features, label: i8) -> f64 {
        let z = self.logits(&self.pooled(f));
        match self.config.mode {
            Mode::Regression => {
                let d = Self::regression_output(z[0]) - label as f64;
                d * d
            }
            Mode::Classification => {
                let p = softmax(&z);
                -p[label_to_class(label)].ln()
            }
        }
    }

    /// `(λ/2)·‖head weights‖²`.
    pub fn penalty(&self, l2: f64) -> f64 {
        0.5 * l2 * self.head_weights.iter().map(|w| w * w).sum::<f64>()
    }

    /// Mean batch loss plus the L2 penalty, and its analytic gradient.
    pub fn loss_and_gradient(&self, batch: &[(&Features, i8)], l2: f64) -> (f64, Gradient) {
        let de = self.config.embed_dim;
        let mut g = Gradient::zeros(self);
        let scale = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        for &(f, label) in batch {
            let h = self.pooled(f);
            let z = self.logits(&h);
            // dL/dz for each head row
            let dz: Vec<f64> = match self.config.mode {
                Mode::Regression => {
                    let y = Self::regression_output(z[0]);
                    let d = y - label as f64;
                    loss += d * d;
                    vec![2.0 * d * 0.5 * (1.0 - y * y) * scale]
                }
                Mode::Classification => {
                    let mut p = softmax(&z);
                    let c = label_to_class(label);
                    loss -= p[c].ln();
                    p[c] -= 1.0;
                    p.iter().map(|x| x * scale).collect()
                }
            };
            let mut dh = vec![0.0; de];
            for (c, &gz) in dz.iter().enumerate() {
                g.head_bias[c] += gz;
                let w = self.head_row(c);
                for k in 0..de {
                    g.head_weights[c * de + k] += gz * h[k];
                    dh[k] += gz * w[k];
                }
            }
            let n = f.pooled_len() as f64;
            let p0 = f.prompt.index() * de;
            for k in 0..de {
                g.prompts[p0 + k] += dh[k] / n;
            }
            for &j in &f.ngrams {
                let row = g.features.entry(j).or_insert_with(|| vec![0.0; de]);
                for k in 0..de {
                    row[k] += dh[k] / n;
                }
            }
        }
        for (gw, w) in g.head_weights.iter_mut().zip(&self.head_weights) {
            *gw += l2 * w;
        }
        (loss * scale + self.penalty(l2), g)
    }

    /// Batch loss only; the same objective as [`Self::loss_and_gradient`].
    pub fn batch_loss(&self, batch: &[(&Features, i8)], l2: f64) -> f64 {
        let sum: f64 = batch.iter().map(|&(f, y)| self.sample_loss(f, y)).sum();
        sum / batch.len() as f64 + self.penalty(l2)
    }

    /// Plain gradient step `θ ← θ − lr·g`.
    pub fn apply_gradient(&mut self, g: &Gradient, lr: f64) {
        let de = self.config.embed_dim;
        for (&row, gr) in &g.features {
            for (p, x) in self.features[row * de..(row + 1) * de].iter_mut().zip(gr) {
                *p -= lr * x;
            }
        }
        for (p, x) in self.prompts.iter_mut().zip(&g.prompts) {
            *p -= lr * x;
        }
        for (p, x) in self.head_weights.iter_mut().zip(&g.head_weights) {
            *p -= lr * x;
        }
        for (p, x) in self.head_bias.iter_mut().zip(&g.head_bias) {
            *p -= lr * x;
        }
    }

    pub fn featurize_samples(&self, samples: &[AnnotatedSample]) -> Vec<(Features, i8)> {
        samples
            .iter()
            .map(|s| (self.featurize_text(&s.scenario.text, s.dimension), s.label))
            .collect()
    }
}

/// Rounds half away from zero and clamps to {-1, 0, +1}.
pub fn round_utility(u: f64) -> i8 {
    u.round().clamp(-1.0, 1.0) as i8
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mode: Mode) -> ModelConfig {
        ModelConfig {
            hash_dim: 64,
            embed_dim: 4,
            mode,
            ..ModelConfig::default()
        }
    }

    #[test]
    fn zero_model_predicts_zero() {
        let m = ValueModel::zeros(small(Mode::Regression)).unwrap();
        assert_eq!(m.predict_utility("anything at all", ValueDimension::Power).unwrap().get(), 0.0);
        assert_eq!(m.predict_vector("x"), ValueVector::ZERO);
        // fresh initialization has zero heads too
        let m = ValueModel::new(small(Mode::Regression)).unwrap();
        assert_eq!(m.predict_vector("hello there"), ValueVector::ZERO);
    }

    #[test]
    fn hand_set_toy_model() {
        // D_e = 1, one n-gram with embedding 0.5, prompt 0.5, w = 1, b = 0:
        // h = (0.5 + 0.5) / 2 = 0.5 and 2σ(0.5) − 1 = 0.244918662403709...
        let cfg = ModelConfig {
            hash_dim: 1,
            embed_dim: 1,
            tokenizer: TokenizerConfig {
                lowercase: true,
                ngram_order: 1,
            },
            ..ModelConfig::default()
        };
        let mut m = ValueModel::zeros(cfg).unwrap();
        m.set_param(Param::Feature { row: 0, col: 0 }, 0.5);
        m.set_param(Param::Prompt { dim: ValueDimension::Power, col: 0 }, 0.5);
        m.set_param(Param::HeadWeight { class: 0, col: 0 }, 1.0);
        let expected = 2.0 / (1.0 + (-0.5f64).exp()) - 1.0;
        assert!((expected - 0.244_918_662_403_709_1).abs() < 1e-15);
        let got = m.predict_utility("word", ValueDimension::Power).unwrap().get();
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn mode_mismatch() {
        let m = ValueModel::zeros(small(Mode::Classification)).unwrap();
        assert!(matches!(
            m.predict_utility("x", ValueDimension::Power),
            Err(Error::ModeMismatch { .. })
        ));
        let r = ValueModel::zeros(small(Mode::Regression)).unwrap();
        assert!(r.class_probabilities("x", ValueDimension::Power).is_err());
    }

    #[test]
    fn classification_vector_is_expected_label() {
        // Biases ln(0.1), ln(0.2), ln(0.7) give probabilities (0.1, 0.2, 0.7).
        let mut m = ValueModel::zeros(small(Mode::Classification)).unwrap();
        for (c, p) in [0.1f64, 0.2, 0.7].into_iter().enumerate() {
            m.set_param(Param::HeadBias { class: c }, p.ln());
        }
        let probs = m.class_probabilities("x", ValueDimension::Security).unwrap();
        assert!((probs[2] - 0.7).abs() < 1e-12);
        let v = m.predict_vector("x");
        for d in ValueDimension::ALL {
            assert!((v[d] - 0.6).abs() < 1e-12);
        }
    }

    #[test]
    fn vector_matches_per_dimension_utility() {
        let mut m = ValueModel::new(small(Mode::Regression)).unwrap();
        for c in 0..4 {
            m.set_param(Param::HeadWeight { class: 0, col: c }, 0.7 * (c as f64 - 1.5));
        }
        let v = m.predict_vector("my family comes first");
        for d in ValueDimension::ALL {
            assert_eq!(v[d], m.predict_utility("my family comes first", d).unwrap().get());
        }
    }

    #[test]
    fn prompt_isolation_and_empty_input() {
        let m = ValueModel::new(small(Mode::Regression)).unwrap();
        let toks = m.tokenize("same words");
        let a = m.featurize(&toks, ValueDimension::Power);
        let b = m.featurize(&toks, ValueDimension::Tradition);
        assert_eq!(a.ngrams, b.ngrams);
        assert_ne!(a.prompt, b.prompt);
        assert_eq!(a, m.featurize(&toks, ValueDimension::Power));
        let e = m.featurize(&[], ValueDimension::Hedonism);
        assert!(e.ngrams.is_empty());
        assert_eq!(e.pooled_len(), 1);
    }

    #[test]
    fn saturated_output_stays_open() {
        let mut m = ValueModel::zeros(small(Mode::Regression)).unwrap();
        m.set_param(Param::HeadBias { class: 0 }, 1e3);
        let u = m.predict_utility("x", ValueDimension::Power).unwrap().get();
        assert!(u < 1.0 && u > 0.999);
    }

    #[test]
    fn rounding_rule() {
        assert_eq!(round_utility(0.5), 1);
        assert_eq!(round_utility(-0.5), -1);
        assert_eq!(round_utility(0.4999), 0);
        assert_eq!(round_utility(-0.4999), 0);
        assert_eq!(round_utility(0.0), 0);
        assert_eq!(round_utility(0.99), 1);
        assert_eq!(round_utility(-1.0), -1);
        let mut u = -1.0;
        while u <= 1.0 {
            let expected = if u <= -0.5 { -1 } else if u >= 0.5 { 1 } else { 0 };
            assert_eq!(round_utility(u), expected, "u = {u}");
            u += 1.0 / 1024.0;
        }
    }
}
