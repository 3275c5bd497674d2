//! End-to-end trainable fusion of the text and image branches: both branch
//! feature vectors are fused (concatenation by default, text first) and
//! classified by a joint MLP. Gradients flow through the fusion into every
//! parameter of both branches.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Layer, Mode, Stack};
use crate::image::ImageSample;
use crate::ops::{fuse_backward, fuse_forward, FusionKind};
use crate::optim::ParamSlot;
use crate::rng::Rng;
use crate::tensor::Tensor;
use crate::text::{SubwordEmbedder, WordSequence};

use super::textcnn::{TextCnnConfig, TextCnnModel};
use super::train::Classifier;
use super::vision::{VisionConfig, VisionModel};

/// One document with both modalities. A document whose OCR text is empty
/// carries an all-zero flagged sequence rather than being rejected.
#[derive(Debug, Clone)]
pub struct MultimodalSample {
    pub image: ImageSample,
    pub sequence: WordSequence,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionConfig {
    pub text: TextCnnConfig,
    pub vision: VisionConfig,
    pub hidden_width: usize,
    pub hidden_layers: usize,
    pub dropout: f64,
    pub num_classes: usize,
    pub kind: FusionKind,
}

impl FusionConfig {
    /// Concatenation fusion with a 2x256 ReLU/dropout classifier.
    pub fn new(text: TextCnnConfig, vision: VisionConfig, num_classes: usize) -> Self {
        FusionConfig {
            text,
            vision,
            hidden_width: 256,
            hidden_layers: 2,
            dropout: 0.5,
            num_classes,
            kind: FusionKind::Concat,
        }
    }

    pub fn joint_dim(&self) -> usize {
        match self.kind {
            FusionKind::Concat => self.text.feature_dim + self.vision.feature_dim,
            FusionKind::Sum => self.text.feature_dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.text.validate()?;
        self.vision.validate()?;
        if self.text.feature_dim != self.vision.feature_dim {
            return Err(Error::config(format!(
                "fusion: branch feature dims must match, got text {} vs vision {}",
                self.text.feature_dim, self.vision.feature_dim
            )));
        }
        if self.num_classes == 0 {
            return Err(Error::config("fusion: num_classes must be positive"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::config(format!(
                "fusion: dropout must be in [0,1), got {}",
                self.dropout
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FusionModel {
    pub cfg: FusionConfig,
    pub text: TextCnnModel,
    pub vision: VisionModel,
    classifier: Stack,
}

impl FusionModel {
    pub fn new(cfg: FusionConfig, embedder: SubwordEmbedder, rng: &mut Rng) -> Result<FusionModel> {
        cfg.validate()?;
        let text = TextCnnModel::new(cfg.text.clone(), embedder, rng)?;
        let vision = VisionModel::new(cfg.vision.clone(), rng)?;
        let mut layers = Vec::new();
        let mut width = cfg.joint_dim();
        for _ in 0..cfg.hidden_layers {
            layers.push(Layer::dense(width, cfg.hidden_width, rng));
            layers.push(Layer::relu());
            layers.push(Layer::dropout(cfg.dropout));
            width = cfg.hidden_width;
        }
        layers.push(Layer::dense(width, cfg.num_classes, rng));
        let classifier = Stack::new(layers, &[cfg.joint_dim()])?;
        Ok(FusionModel {
            cfg,
            text,
            vision,
            classifier,
        })
    }

    /// Replaces both branches with pretrained models (feature extractors
    /// carry over; the fusion classifier stays as initialized).
    pub fn with_branches(mut self, text: TextCnnModel, vision: VisionModel) -> Result<FusionModel> {
        if text.cfg != self.cfg.text || vision.cfg != self.cfg.vision {
            return Err(Error::config(
                "fusion: branch configs do not match the fusion config",
            ));
        }
        self.text = text;
        self.vision = vision;
        Ok(self)
    }

    /// Branch features fused for one sample (read-only).
    pub fn fused_infer(&self, sample: &MultimodalSample) -> Result<Tensor> {
        let tf = self.text.features_infer(&sample.sequence)?;
        let vf = self.vision.features_infer(&sample.image)?;
        fuse_forward(&tf, &vf, self.cfg.kind)
    }

    pub fn logits_infer(&self, sample: &MultimodalSample) -> Result<Tensor> {
        let fused = self.fused_infer(sample)?;
        self.classifier.infer(&fused)
    }

    /// Joint classifier on an already fused feature batch.
    pub fn classifier_infer(&self, fused: &Tensor) -> Result<Tensor> {
        self.classifier.infer(fused)
    }

    pub fn state<'a>(&'a self, out: &mut Vec<(String, &'a Tensor)>) {
        self.text.state("text.", out);
        self.vision.state("vision.", out);
        self.classifier.state("classifier", out);
    }

    pub fn state_mut<'a>(&'a mut self, out: &mut Vec<(String, &'a mut Tensor)>) {
        self.text.state_mut("text.", out);
        self.vision.state_mut("vision.", out);
        self.classifier.state_mut("classifier", out);
    }
}

impl Classifier<MultimodalSample> for FusionModel {
    fn num_classes(&self) -> usize {
        self.cfg.num_classes
    }

    fn forward_train(&mut self, batch: &[&MultimodalSample], rng: &mut Rng) -> Result<Tensor> {
        let seqs: Vec<&WordSequence> = batch.iter().map(|s| &s.sequence).collect();
        let imgs: Vec<&ImageSample> = batch.iter().map(|s| &s.image).collect();
        let tf = self.text.features_train(&seqs, rng)?;
        let vf = self.vision.features_train(&imgs, rng)?;
        let fused = fuse_forward(&tf, &vf, self.cfg.kind)?;
        self.classifier.forward(&fused, Mode::Train, rng)
    }

    fn backward(&mut self, batch: &[&MultimodalSample], dlogits: &Tensor) {
        let dfused = self.classifier.backward(dlogits);
        let (dtf, dvf) = fuse_backward(
            &dfused,
            self.cfg.text.feature_dim,
            self.cfg.vision.feature_dim,
            self.cfg.kind,
        );
        let seqs: Vec<&WordSequence> = batch.iter().map(|s| &s.sequence).collect();
        self.text.backward_features(&seqs, &dtf);
        self.vision.backward_features(&dvf);
    }

    fn infer_logits(&self, sample: &MultimodalSample) -> Result<Vec<f64>> {
        Ok(self.logits_infer(sample)?.data().to_vec())
    }

    fn param_slots(&mut self) -> Vec<ParamSlot<'_>> {
        let mut out = Vec::new();
        self.text.param_slots_inner("text.", false, &mut out);
        self.vision.param_slots_inner("vision.", false, &mut out);
        self.classifier.param_slots("classifier", &mut out);
        out
    }
}
