//! Document-embedding MLP baseline: fixed-width dense stack with ReLU,
//! dropout and batch norm, projecting to a 128-dim feature head.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Layer, Mode, Stack};
use crate::optim::ParamSlot;
use crate::rng::Rng;
use crate::tensor::Tensor;
use crate::text::DocumentEmbedding;

use super::train::Classifier;

#[derive(Debug, Clone, PartialEq)]
pub struct TextMlpConfig {
    pub input_dim: usize,
    pub hidden_width: usize,
    pub num_hidden_layers: usize,
    pub feature_dim: usize,
    pub dropout: f64,
    pub num_classes: usize,
    pub batchnorm: bool,
}

impl TextMlpConfig {
    /// Full-scale preset: two hidden layers of 2048 with dropout and batch
    /// norm, 128-dim feature head.
    pub fn full(input_dim: usize, num_classes: usize) -> Self {
        TextMlpConfig {
            input_dim,
            hidden_width: 2048,
            num_hidden_layers: 2,
            feature_dim: 128,
            dropout: 0.5,
            num_classes,
            batchnorm: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.feature_dim == 0 || self.num_classes == 0 {
            return Err(Error::config("textmlp: all dimensions must be positive"));
        }
        if self.num_hidden_layers > 0 && self.hidden_width == 0 {
            return Err(Error::config("textmlp: hidden_width must be positive"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::config(format!(
                "textmlp: dropout must be in [0,1), got {}",
                self.dropout
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TextMlpModel {
    pub cfg: TextMlpConfig,
    trunk: Stack,
    head: Stack,
}

impl TextMlpModel {
    pub fn new(cfg: TextMlpConfig, rng: &mut Rng) -> Result<Self> {
        cfg.validate()?;
        let mut layers = Vec::new();
        let mut width = cfg.input_dim;
        for _ in 0..cfg.num_hidden_layers {
            layers.push(Layer::dense(width, cfg.hidden_width, rng));
            layers.push(Layer::relu());
            layers.push(Layer::dropout(cfg.dropout));
            if cfg.batchnorm {
                layers.push(Layer::batchnorm(cfg.hidden_width, 0.9, 1e-5));
            }
            width = cfg.hidden_width;
        }
        layers.push(Layer::dense(width, cfg.feature_dim, rng));
        let trunk = Stack::new(layers, &[cfg.input_dim])?;
        let head = Stack::new(
            vec![Layer::dense(cfg.feature_dim, cfg.num_classes, rng)],
            &[cfg.feature_dim],
        )?;
        Ok(TextMlpModel { cfg, trunk, head })
    }

    fn build_input(&self, batch: &[&DocumentEmbedding]) -> Result<Tensor> {
        let d = self.cfg.input_dim;
        let mut x = Tensor::zeros(&[batch.len(), d]);
        for (bi, doc) in batch.iter().enumerate() {
            if doc.vector.shape() != [d] {
                return Err(Error::shape(format!(
                    "textmlp: document vector {:?} does not match input_dim {d}",
                    doc.vector.shape()
                )));
            }
            x.data_mut()[bi * d..(bi + 1) * d].copy_from_slice(doc.vector.data());
        }
        Ok(x)
    }

    pub fn features_infer(&self, doc: &DocumentEmbedding) -> Result<Tensor> {
        let x = self.build_input(&[doc])?;
        self.trunk.infer(&x)
    }

    /// Read-only batched logits.
    pub fn logits_infer_batch(&self, batch: &[&DocumentEmbedding]) -> Result<Tensor> {
        let x = self.build_input(batch)?;
        let features = self.trunk.infer(&x)?;
        self.head.infer(&features)
    }

    pub fn state<'a>(&'a self, prefix: &str, out: &mut Vec<(String, &'a Tensor)>) {
        self.trunk.state(&format!("{prefix}trunk"), out);
        self.head.state(&format!("{prefix}head"), out);
    }

    pub fn state_mut<'a>(&'a mut self, prefix: &str, out: &mut Vec<(String, &'a mut Tensor)>) {
        self.trunk.state_mut(&format!("{prefix}trunk"), out);
        self.head.state_mut(&format!("{prefix}head"), out);
    }
}

impl Classifier<DocumentEmbedding> for TextMlpModel {
    fn num_classes(&self) -> usize {
        self.cfg.num_classes
    }

    fn forward_train(&mut self, batch: &[&DocumentEmbedding], rng: &mut Rng) -> Result<Tensor> {
        let x = self.build_input(batch)?;
        let features = self.trunk.forward(&x, Mode::Train, rng)?;
        self.head.forward(&features, Mode::Train, rng)
    }

    fn backward(&mut self, _batch: &[&DocumentEmbedding], dlogits: &Tensor) {
        let dfeat = self.head.backward(dlogits);
        self.trunk.backward(&dfeat);
    }

    fn infer_logits(&self, sample: &DocumentEmbedding) -> Result<Vec<f64>> {
        let features = self.features_infer(sample)?;
        Ok(self.head.infer(&features)?.data().to_vec())
    }

    fn param_slots(&mut self) -> Vec<ParamSlot<'_>> {
        let mut out = Vec::new();
        self.trunk.param_slots("trunk", &mut out);
        self.head.param_slots("head", &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(values: &[f64]) -> DocumentEmbedding {
        DocumentEmbedding {
            vector: Tensor::vector(values),
            is_empty: false,
        }
    }

    #[test]
    fn zero_depth_config_is_a_single_projection() {
        let cfg = TextMlpConfig {
            input_dim: 4,
            hidden_width: 0,
            num_hidden_layers: 0,
            feature_dim: 6,
            dropout: 0.0,
            num_classes: 2,
            batchnorm: false,
        };
        let model = TextMlpModel::new(cfg, &mut Rng::from_seed(1)).unwrap();
        assert_eq!(model.trunk.layers().len(), 1);
        let features = model.features_infer(&doc(&[1.0, 0.0, -1.0, 2.0])).unwrap();
        assert_eq!(features.shape(), &[1, 6]);
    }

    #[test]
    fn deterministic_for_fixed_seed_and_input() {
        let cfg = TextMlpConfig::full(16, 3);
        let m1 = TextMlpModel::new(cfg.clone(), &mut Rng::from_seed(42)).unwrap();
        let m2 = TextMlpModel::new(cfg, &mut Rng::from_seed(42)).unwrap();
        let d = doc(&[0.1; 16]);
        assert_eq!(m1.infer_logits(&d).unwrap(), m2.infer_logits(&d).unwrap());
    }

    #[test]
    fn wrong_input_dim_is_rejected() {
        let cfg = TextMlpConfig::full(8, 2);
        let model = TextMlpModel::new(cfg, &mut Rng::from_seed(3)).unwrap();
        assert!(model.infer_logits(&doc(&[1.0; 4])).is_err());
    }
}
