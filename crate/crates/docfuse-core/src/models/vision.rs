//! Lightweight image CNN built from inverted residual blocks.
//!
//! Each block expands channels with a 1x1 convolution (identity
//! activation), filters with a 3x3 depthwise convolution followed by ReLU,
//! and projects back with a 1x1 convolution, batch norm after every
//! convolution. The default keeps a ReLU after the projection; the
//! `linear_bottleneck` flag switches to a linear projection instead. The
//! skip connection applies exactly when stride is 1 and the channel count
//! is unchanged. When the expansion factor is 1 the expand convolution is
//! omitted.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Layer, Mode, Stack};
use crate::image::ImageSample;
use crate::optim::ParamSlot;
use crate::rng::Rng;
use crate::tensor::Tensor;

use super::train::Classifier;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvertedResidualSpec {
    pub expansion: usize,
    pub out_channels: usize,
    pub stride: usize,
    pub repeat: usize,
}

impl InvertedResidualSpec {
    pub const fn new(expansion: usize, out_channels: usize, stride: usize, repeat: usize) -> Self {
        InvertedResidualSpec {
            expansion,
            out_channels,
            stride,
            repeat,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisionConfig {
    pub input_size: usize,
    pub stem_channels: usize,
    pub blocks: Vec<InvertedResidualSpec>,
    pub head_dim: usize,
    pub feature_dim: usize,
    pub num_classes: usize,
    /// Linear projection (no ReLU after the final 1x1) when set.
    pub linear_bottleneck: bool,
    pub bn_momentum: f64,
    pub bn_eps: f64,
}

impl VisionConfig {
    /// Full-scale preset: 384x384 input, the standard 17-bottleneck
    /// geometry, 1280-dim pooled head.
    pub fn full(num_classes: usize) -> Self {
        VisionConfig {
            input_size: 384,
            stem_channels: 32,
            blocks: vec![
                InvertedResidualSpec::new(1, 16, 1, 1),
                InvertedResidualSpec::new(6, 24, 2, 2),
                InvertedResidualSpec::new(6, 32, 2, 3),
                InvertedResidualSpec::new(6, 64, 2, 4),
                InvertedResidualSpec::new(6, 96, 1, 3),
                InvertedResidualSpec::new(6, 160, 2, 3),
                InvertedResidualSpec::new(6, 320, 1, 1),
            ],
            head_dim: 1280,
            feature_dim: 128,
            num_classes,
            linear_bottleneck: false,
            bn_momentum: 0.9,
            bn_eps: 1e-5,
        }
    }

    /// Desk-scale preset: 96x96 input, 6 blocks, 256-dim pooled head.
    pub fn desk(num_classes: usize) -> Self {
        VisionConfig {
            input_size: 96,
            stem_channels: 16,
            blocks: vec![
                InvertedResidualSpec::new(1, 16, 1, 1),
                InvertedResidualSpec::new(4, 24, 2, 1),
                InvertedResidualSpec::new(4, 24, 1, 1),
                InvertedResidualSpec::new(4, 32, 2, 1),
                InvertedResidualSpec::new(4, 32, 1, 1),
                InvertedResidualSpec::new(4, 64, 2, 1),
            ],
            head_dim: 256,
            feature_dim: 128,
            num_classes,
            linear_bottleneck: false,
            bn_momentum: 0.9,
            bn_eps: 1e-5,
        }
    }

    /// Two-block micro preset for end-to-end gradient checks.
    pub fn micro(num_classes: usize) -> Self {
        VisionConfig {
            input_size: 16,
            stem_channels: 4,
            blocks: vec![
                InvertedResidualSpec::new(2, 4, 1, 1),
                InvertedResidualSpec::new(2, 8, 2, 1),
            ],
            head_dim: 16,
            feature_dim: 8,
            num_classes,
            linear_bottleneck: false,
            bn_momentum: 0.9,
            bn_eps: 1e-5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_size == 0
            || self.stem_channels == 0
            || self.head_dim == 0
            || self.feature_dim == 0
            || self.num_classes == 0
        {
            return Err(Error::config("vision: all dimensions must be positive"));
        }
        if self.blocks.is_empty() {
            return Err(Error::config("vision: need at least one block"));
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if b.expansion == 0 || b.out_channels == 0 || b.repeat == 0 {
                return Err(Error::config(format!(
                    "vision: block {i} has zero expansion/channels/repeat"
                )));
            }
            if b.stride != 1 && b.stride != 2 {
                return Err(Error::config(format!(
                    "vision: block {i} stride must be 1 or 2, got {}",
                    b.stride
                )));
            }
        }
        Ok(())
    }
}

/// One inverted residual block.
#[derive(Debug, Clone)]
pub struct InvertedResidual {
    chain: Stack,
    use_skip: bool,
    pub in_channels: usize,
    pub out_channels: usize,
    pub stride: usize,
}

impl InvertedResidual {
    /// `in_shape` is `[C,H,W]` without the batch dimension.
    pub fn new(
        in_shape: &[usize],
        expansion: usize,
        out_channels: usize,
        stride: usize,
        linear_bottleneck: bool,
        bn_momentum: f64,
        bn_eps: f64,
        rng: &mut Rng,
    ) -> Result<InvertedResidual> {
        let in_channels = in_shape[0];
        let hidden = in_channels * expansion;
        let mut layers = Vec::new();
        if expansion > 1 {
            layers.push(Layer::pointwise_conv2d(in_channels, hidden, rng));
            layers.push(Layer::batchnorm(hidden, bn_momentum, bn_eps));
        }
        layers.push(Layer::depthwise_conv2d(hidden, 3, stride, rng));
        layers.push(Layer::batchnorm(hidden, bn_momentum, bn_eps));
        layers.push(Layer::relu());
        layers.push(Layer::pointwise_conv2d(hidden, out_channels, rng));
        layers.push(Layer::batchnorm(out_channels, bn_momentum, bn_eps));
        if !linear_bottleneck {
            layers.push(Layer::relu());
        }
        let chain = Stack::new(layers, in_shape)?;
        Ok(InvertedResidual {
            chain,
            use_skip: stride == 1 && in_channels == out_channels,
            in_channels,
            out_channels,
            stride,
        })
    }

    pub fn uses_skip(&self) -> bool {
        self.use_skip
    }

    pub fn output_shape(&self) -> &[usize] {
        self.chain.output_shape()
    }

    pub fn forward(&mut self, x: &Tensor, mode: Mode, rng: &mut Rng) -> Result<Tensor> {
        let mut y = self.chain.forward(x, mode, rng)?;
        if self.use_skip {
            y.add_assign(x);
        }
        Ok(y)
    }

    pub fn infer(&self, x: &Tensor) -> Result<Tensor> {
        let mut y = self.chain.infer(x)?;
        if self.use_skip {
            y.add_assign(x);
        }
        Ok(y)
    }

    pub fn backward(&mut self, dy: &Tensor) -> Tensor {
        let mut dx = self.chain.backward(dy);
        if self.use_skip {
            dx.add_assign(dy);
        }
        dx
    }

    pub fn param_slots<'a>(&'a mut self, prefix: &str, out: &mut Vec<ParamSlot<'a>>) {
        self.chain.param_slots(prefix, out);
    }

    pub fn state<'a>(&'a self, prefix: &str, out: &mut Vec<(String, &'a Tensor)>) {
        self.chain.state(prefix, out);
    }

    pub fn state_mut<'a>(&'a mut self, prefix: &str, out: &mut Vec<(String, &'a mut Tensor)>) {
        self.chain.state_mut(prefix, out);
    }
}

#[derive(Debug, Clone)]
pub struct VisionModel {
    pub cfg: VisionConfig,
    stem: Stack,
    blocks: Vec<InvertedResidual>,
    head: Stack,
    proj: Stack,
    classifier: Stack,
}

impl VisionModel {
    pub fn new(cfg: VisionConfig, rng: &mut Rng) -> Result<VisionModel> {
        cfg.validate()?;
        let s = cfg.input_size;
        let stem = Stack::new(
            vec![
                Layer::conv2d(3, cfg.stem_channels, 3, 2, rng),
                Layer::batchnorm(cfg.stem_channels, cfg.bn_momentum, cfg.bn_eps),
                Layer::relu(),
            ],
            &[3, s, s],
        )?;
        let mut shape = stem.output_shape().to_vec();
        let mut blocks = Vec::new();
        for spec in &cfg.blocks {
            for rep in 0..spec.repeat {
                // Only the first repetition strides / changes channels.
                let stride = if rep == 0 { spec.stride } else { 1 };
                let block = InvertedResidual::new(
                    &shape,
                    spec.expansion,
                    spec.out_channels,
                    stride,
                    cfg.linear_bottleneck,
                    cfg.bn_momentum,
                    cfg.bn_eps,
                    rng,
                )?;
                shape = block.output_shape().to_vec();
                blocks.push(block);
            }
        }
        let head = Stack::new(
            vec![
                Layer::pointwise_conv2d(shape[0], cfg.head_dim, rng),
                Layer::batchnorm(cfg.head_dim, cfg.bn_momentum, cfg.bn_eps),
                Layer::relu(),
                Layer::global_avg_pool2d(),
            ],
            &shape,
        )?;
        let proj = Stack::new(
            vec![
                Layer::dense(cfg.head_dim, cfg.feature_dim, rng),
                Layer::relu(),
            ],
            &[cfg.head_dim],
        )?;
        let classifier = Stack::new(
            vec![Layer::dense(cfg.feature_dim, cfg.num_classes, rng)],
            &[cfg.feature_dim],
        )?;
        Ok(VisionModel {
            cfg,
            stem,
            blocks,
            head,
            proj,
            classifier,
        })
    }

    /// Channel width of the pooled feature (the head output).
    pub fn pooled_dim(&self) -> usize {
        self.head.output_shape()[0]
    }

    pub fn feature_dim(&self) -> usize {
        self.cfg.feature_dim
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    fn build_input(&self, batch: &[&ImageSample]) -> Result<Tensor> {
        let s = self.cfg.input_size;
        let plane = 3 * s * s;
        let mut x = Tensor::zeros(&[batch.len(), 3, s, s]);
        for (bi, sample) in batch.iter().enumerate() {
            if sample.pixels.shape() != [3, s, s] {
                return Err(Error::shape(format!(
                    "vision: image {:?} does not match configured input [3, {s}, {s}]",
                    sample.pixels.shape()
                )));
            }
            let std = sample.standardized();
            x.data_mut()[bi * plane..(bi + 1) * plane].copy_from_slice(std.data());
        }
        Ok(x)
    }

    /// Training-mode 128-dim features for a batch (fusion branch entry).
    pub fn features_train(&mut self, batch: &[&ImageSample], rng: &mut Rng) -> Result<Tensor> {
        let x = self.build_input(batch)?;
        self.features_train_from_tensor(&x, rng)
    }

    /// Same as `features_train` but on an already standardized `[B,3,S,S]`
    /// tensor (used by gradient checks).
    pub fn features_train_from_tensor(&mut self, x: &Tensor, rng: &mut Rng) -> Result<Tensor> {
        let mut cur = self.stem.forward(x, Mode::Train, rng)?;
        for block in &mut self.blocks {
            cur = block.forward(&cur, Mode::Train, rng)?;
        }
        let pooled = self.head.forward(&cur, Mode::Train, rng)?;
        self.proj.forward(&pooled, Mode::Train, rng)
    }

    pub fn backward_features(&mut self, dfeat: &Tensor) -> Tensor {
        let dpooled = self.proj.backward(dfeat);
        let mut grad = self.head.backward(&dpooled);
        for block in self.blocks.iter_mut().rev() {
            grad = block.backward(&grad);
        }
        self.stem.backward(&grad)
    }

    pub fn features_infer_from_tensor(&self, x: &Tensor) -> Result<Tensor> {
        let mut cur = self.stem.infer(x)?;
        for block in &self.blocks {
            cur = block.infer(&cur)?;
        }
        let pooled = self.head.infer(&cur)?;
        self.proj.infer(&pooled)
    }

    pub fn features_infer(&self, sample: &ImageSample) -> Result<Tensor> {
        let x = self.build_input(&[sample])?;
        self.features_infer_from_tensor(&x)
    }

    /// Read-only batched feature forward.
    pub fn features_infer_batch(&self, batch: &[&ImageSample]) -> Result<Tensor> {
        let x = self.build_input(batch)?;
        self.features_infer_from_tensor(&x)
    }

    /// Read-only batched logits.
    pub fn logits_infer_batch(&self, batch: &[&ImageSample]) -> Result<Tensor> {
        let features = self.features_infer_batch(batch)?;
        self.classifier.infer(&features)
    }

    pub fn logits_train_from_tensor(&mut self, x: &Tensor, rng: &mut Rng) -> Result<Tensor> {
        let features = self.features_train_from_tensor(x, rng)?;
        self.classifier.forward(&features, Mode::Train, rng)
    }

    pub fn backward_logits(&mut self, dlogits: &Tensor) -> Tensor {
        let dfeat = self.classifier.backward(dlogits);
        self.backward_features(&dfeat)
    }

    pub fn param_slots_inner<'a>(
        &'a mut self,
        prefix: &str,
        include_head: bool,
        out: &mut Vec<ParamSlot<'a>>,
    ) {
        self.stem.param_slots(&format!("{prefix}stem"), out);
        for (i, block) in self.blocks.iter_mut().enumerate() {
            block.param_slots(&format!("{prefix}block{i}"), out);
        }
        self.head.param_slots(&format!("{prefix}head"), out);
        self.proj.param_slots(&format!("{prefix}proj"), out);
        if include_head {
            self.classifier.param_slots(&format!("{prefix}classifier"), out);
        }
    }

    pub fn state<'a>(&'a self, prefix: &str, out: &mut Vec<(String, &'a Tensor)>) {
        self.stem.state(&format!("{prefix}stem"), out);
        for (i, block) in self.blocks.iter().enumerate() {
            block.state(&format!("{prefix}block{i}"), out);
        }
        self.head.state(&format!("{prefix}head"), out);
        self.proj.state(&format!("{prefix}proj"), out);
        self.classifier.state(&format!("{prefix}classifier"), out);
    }

    pub fn state_mut<'a>(&'a mut self, prefix: &str, out: &mut Vec<(String, &'a mut Tensor)>) {
        self.stem.state_mut(&format!("{prefix}stem"), out);
        for (i, block) in self.blocks.iter_mut().enumerate() {
            block.state_mut(&format!("{prefix}block{i}"), out);
        }
        self.head.state_mut(&format!("{prefix}head"), out);
        self.proj.state_mut(&format!("{prefix}proj"), out);
        self.classifier.state_mut(&format!("{prefix}classifier"), out);
    }
}

impl Classifier<ImageSample> for VisionModel {
    fn num_classes(&self) -> usize {
        self.cfg.num_classes
    }

    fn forward_train(&mut self, batch: &[&ImageSample], rng: &mut Rng) -> Result<Tensor> {
        let x = self.build_input(batch)?;
        self.logits_train_from_tensor(&x, rng)
    }

    fn backward(&mut self, _batch: &[&ImageSample], dlogits: &Tensor) {
        self.backward_logits(dlogits);
    }

    fn infer_logits(&self, sample: &ImageSample) -> Result<Vec<f64>> {
        let features = self.features_infer(sample)?;
        Ok(self.classifier.infer(&features)?.data().to_vec())
    }

    fn param_slots(&mut self) -> Vec<ParamSlot<'_>> {
        let mut out = Vec::new();
        self.param_slots_inner("", true, &mut out);
        out
    }
}
