//! Minibatch SGD training.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::features::Features;
use crate::model::value_model::{Mode, ValueModel};
use crate::value::AnnotatedSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Samples per update; 0 or anything ≥ the corpus size gives full-batch
    /// gradient descent.
    pub batch_size: usize,
    pub l2: f64,
    /// Seed for per-epoch shuffling.
    pub seed: u64,
    pub mode: Mode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            epochs: 40,
            batch_size: 1,
            l2: 0.0,
            seed: 0,
            mode: Mode::Regression,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::InvalidInput(format!(
                "learning rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidInput("epochs must be ≥ 1".into()));
        }
        if !self.l2.is_finite() || self.l2 < 0.0 {
            return Err(Error::InvalidInput(format!("l2 must be finite and non-negative, got {}", self.l2)));
        }
        Ok(())
    }
}

/// Loss after each epoch, evaluated over the whole training set.
pub type LossTrace = Vec<f64>;

/// Trains `model` in place and returns the per-epoch loss trace.
pub fn train(model: &mut ValueModel, samples: &[AnnotatedSample], config: &TrainConfig) -> Result<LossTrace> {
    config.validate()?;
    if samples.is_empty() {
        return Err(Error::InvalidInput("no training samples".into()));
    }
    if config.mode != model.mode() {
        return Err(Error::ModeMismatch {
            expected: model.mode().as_str(),
            found: config.mode.as_str(),
        });
    }
    for s in samples {
        if !(-1..=1).contains(&s.label) {
            return Err(Error::InvalidInput(format!("label {} out of range for {:?}", s.label, s.key())));
        }
    }
    let data = model.featurize_samples(samples);
    train_features(model, &data, config)
}

/// Same as [`train`] over pre-featurized data.
pub fn train_features(model: &mut ValueModel, data: &[(Features, i8)], config: &TrainConfig) -> Result<LossTrace> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::InvalidInput("no training samples".into()));
    }
    let batch = if config.batch_size == 0 {
        data.len()
    } else {
        config.batch_size.min(data.len())
    };
    let full: Vec<(&Features, i8)> = data.iter().map(|(f, y)| (f, *y)).collect();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut trace = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        if batch < data.len() {
            order.shuffle(&mut rng);
        }
        for chunk in order.chunks(batch) {
            let mb: Vec<(&Features, i8)> = chunk.iter().map(|&i| (&data[i].0, data[i].1)).collect();
            let (loss, grad) = model.loss_and_gradient(&mb, config.l2);
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch });
            }
            model.apply_gradient(&grad, config.learning_rate);
        }
        let loss = model.batch_loss(&full, config.l2);
        if !loss.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        log::debug!("epoch {epoch}: loss {loss:.6}");
        trace.push(loss);
    }
    Ok(trace)
}

/// Two-column `epoch\tloss` text.
pub fn format_loss_trace(trace: &[f64]) -> String {
    let mut out = String::from("epoch\tloss\n");
    for (i, l) in trace.iter().enumerate() {
        out.push_str(&format!("{}\t{}\n", i + 1, l));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::value_model::ModelConfig;
    use crate::value::{Scenario, ValueDimension};

    fn sample(text: &str, dim: ValueDimension, label: i8) -> AnnotatedSample {
        AnnotatedSample {
            scenario: Scenario {
                id: text.into(),
                text: text.into(),
            },
            dimension: dim,
            label,
            agreement: 4,
        }
    }

    fn small() -> ModelConfig {
        ModelConfig {
            hash_dim: 256,
            embed_dim: 8,
            seed: 3,
            ..ModelConfig::default()
        }
    }

    fn corpus() -> Vec<AnnotatedSample> {
        vec![
            sample("i help my friends", ValueDimension::Benevolence, 1),
            sample("i ignore my friends", ValueDimension::Benevolence, -1),
            sample("the weather is grey", ValueDimension::Benevolence, 0),
            sample("i won the race", ValueDimension::Achievement, 1),
        ]
    }

    #[test]
    fn zero_learning_rate_keeps_loss_constant() {
        let mut m = ValueModel::new(small()).unwrap();
        let before = m.clone();
        let cfg = TrainConfig {
            learning_rate: 0.0,
            epochs: 5,
            ..TrainConfig::default()
        };
        let trace = train(&mut m, &corpus(), &cfg).unwrap();
        assert_eq!(trace.len(), 5);
        assert!(trace.iter().all(|&l| l == trace[0]));
        assert_eq!(m, before);
    }

    #[test]
    fn loss_decreases() {
        let mut m = ValueModel::new(small()).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.5,
            epochs: 30,
            batch_size: 2,
            ..TrainConfig::default()
        };
        let trace = train(&mut m, &corpus(), &cfg).unwrap();
        assert!(trace.last().unwrap() < &trace[0]);
    }

    #[test]
    fn seeded_determinism() {
        let cfg = TrainConfig {
            epochs: 3,
            batch_size: 1,
            ..TrainConfig::default()
        };
        let mut a = ValueModel::new(small()).unwrap();
        let mut b = ValueModel::new(small()).unwrap();
        let ta = train(&mut a, &corpus(), &cfg).unwrap();
        let tb = train(&mut b, &corpus(), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), tb.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn duplicated_set_full_batch() {
        let cfg = TrainConfig {
            epochs: 10,
            batch_size: 0,
            learning_rate: 0.3,
            ..TrainConfig::default()
        };
        let mut doubled = corpus();
        doubled.extend(corpus());
        let mut a = ValueModel::new(small()).unwrap();
        let mut b = ValueModel::new(small()).unwrap();
        train(&mut a, &corpus(), &cfg).unwrap();
        train(&mut b, &doubled, &cfg).unwrap();
        for (x, y) in a.tensors().iter().zip(b.tensors().iter()) {
            for (p, q) in x.iter().zip(y.iter()) {
                assert!((p - q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let mut m = ValueModel::new(small()).unwrap();
        assert!(matches!(train(&mut m, &[], &TrainConfig::default()), Err(Error::InvalidInput(_))));
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        assert!(train(&mut m, &corpus(), &cfg).is_err());
        let cfg = TrainConfig {
            mode: Mode::Classification,
            ..TrainConfig::default()
        };
        assert!(matches!(train(&mut m, &corpus(), &cfg), Err(Error::ModeMismatch { .. })));
    }

    #[test]
    fn divergence_names_epoch() {
        let mut cfg_m = small();
        cfg_m.mode = Mode::Classification;
        let mut m = ValueModel::new(cfg_m).unwrap();
        let cfg = TrainConfig {
            learning_rate: 1e308,
            epochs: 3,
            batch_size: 0,
            mode: Mode::Classification,
            ..TrainConfig::default()
        };
        match train(&mut m, &corpus(), &cfg) {
            Err(Error::Divergence { epoch }) => assert!((1..=3).contains(&epoch)),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn trace_format() {
        assert_eq!(format_loss_trace(&[0.5, 0.25]), "epoch\tloss\n1\t0.5\n2\t0.25\n");
    }
}
