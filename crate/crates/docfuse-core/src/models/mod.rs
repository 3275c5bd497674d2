//! The three classifiers (text CNN, SIF+MLP, vision CNN) and their fusion.

mod fusion;
mod textcnn;
mod textmlp;
mod train;
mod vision;

pub use fusion::{FusionConfig, FusionModel, MultimodalSample};
pub use textcnn::{TextCnnConfig, TextCnnModel};
pub use textmlp::{TextMlpConfig, TextMlpModel};
pub use train::{
    argmax, predict, predict_all, train_classifier, Classifier, EpochStats, TrainHyper,
};
pub use vision::{InvertedResidual, InvertedResidualSpec, VisionConfig, VisionModel};
