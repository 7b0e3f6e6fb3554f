//! Value model: featurization, training, evaluation, fusion.

pub mod eval;
pub mod features;
pub mod file;
pub mod fusion;
pub mod prepend;
pub mod train;
pub mod value_model;

pub use crate::text::{tokenize, TokenizerConfig};
pub use eval::{evaluate, evaluate_predictions, predict_samples, ClassMetrics, EvalReport, Prediction};
pub use features::{hash_ngrams, seeded_hash, Features};
pub use file::{load as load_model, save as save_model};
pub use fusion::{
    fuse_emotion_features, read_labeled_text, train_fusion_head, FusionExample, FusionHead, FusionTrainConfig,
};
pub use prepend::{prepend_label, prepend_labels};
pub use train::{format_loss_trace, train, train_features, LossTrace, TrainConfig};
pub use value_model::{round_utility, Gradient, Mode, ModelConfig, Param, ValueModel};
