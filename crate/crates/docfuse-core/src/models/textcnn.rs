//! Word-sequence text classifier: stacked 1-D convolutions with
//! max-pooling, max-over-time readout and a dense feature projection.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Layer, Mode, Stack};
use crate::ops::Padding;
use crate::optim::ParamSlot;
use crate::rng::Rng;
use crate::tensor::Tensor;
use crate::text::{SubwordEmbedder, WordSequence};

use super::train::Classifier;

#[derive(Debug, Clone, PartialEq)]
pub struct TextCnnConfig {
    pub embed_dim: usize,
    pub max_len: usize,
    pub depth: usize,
    pub channels: usize,
    pub window: usize,
    /// Pool window and stride (the pools use square geometry).
    pub pool_stride: usize,
    pub feature_dim: usize,
    pub dropout: f64,
    pub num_classes: usize,
    /// Batch norm after each convolution; off by default.
    pub batchnorm: bool,
    /// When set, the embedding table is a trainable parameter and both
    /// training and inference rebuild the input matrix from the sequence's
    /// n-gram ids using the current table.
    pub train_embeddings: bool,
}

impl TextCnnConfig {
    /// Full-scale preset: 4 layers of 512 channels, window 12, 500-token
    /// sequences, 128-dim feature head.
    pub fn full(embed_dim: usize, num_classes: usize) -> Self {
        TextCnnConfig {
            embed_dim,
            max_len: 500,
            depth: 4,
            channels: 512,
            window: 12,
            pool_stride: 2,
            feature_dim: 128,
            dropout: 0.5,
            num_classes,
            batchnorm: false,
            train_embeddings: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.embed_dim,
            self.max_len,
            self.depth,
            self.channels,
            self.window,
            self.pool_stride,
            self.feature_dim,
            self.num_classes,
        ];
        if positive.iter().any(|&v| v == 0) {
            return Err(Error::config("textcnn: all dimensions must be positive"));
        }
        if self.window > self.max_len {
            return Err(Error::config(format!(
                "textcnn: window {} exceeds max_len {}",
                self.window, self.max_len
            )));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::config(format!(
                "textcnn: dropout must be in [0,1), got {}",
                self.dropout
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TextCnnModel {
    pub cfg: TextCnnConfig,
    pub embedder: SubwordEmbedder,
    embed_grad: Tensor,
    trunk: Stack,
    head: Stack,
}

impl TextCnnModel {
    pub fn new(cfg: TextCnnConfig, embedder: SubwordEmbedder, rng: &mut Rng) -> Result<Self> {
        cfg.validate()?;
        if embedder.dim != cfg.embed_dim {
            return Err(Error::config(format!(
                "textcnn: embedder dim {} != cfg.embed_dim {}",
                embedder.dim, cfg.embed_dim
            )));
        }
        let mut layers = Vec::new();
        for i in 0..cfg.depth {
            let cin = if i == 0 { cfg.embed_dim } else { cfg.channels };
            layers.push(Layer::conv1d(cin, cfg.channels, cfg.window, Padding::Same, rng));
            if cfg.batchnorm {
                layers.push(Layer::batchnorm(cfg.channels, 0.9, 1e-5));
            }
            layers.push(Layer::relu());
            layers.push(Layer::maxpool1d(cfg.pool_stride, cfg.pool_stride));
        }
        layers.push(Layer::max_over_time());
        layers.push(Layer::dropout(cfg.dropout));
        layers.push(Layer::dense(cfg.channels, cfg.feature_dim, rng));
        let trunk = Stack::new(layers, &[cfg.embed_dim, cfg.max_len])?;
        let head = Stack::new(
            vec![Layer::dense(cfg.feature_dim, cfg.num_classes, rng)],
            &[cfg.feature_dim],
        )?;
        let embed_grad = Tensor::zeros(embedder.table.shape());
        Ok(TextCnnModel {
            cfg,
            embedder,
            embed_grad,
            trunk,
            head,
        })
    }

    /// Per-layer output shapes (placeholder batch of 1).
    pub fn shape_trace(&self) -> &[Vec<usize>] {
        self.trunk.shape_trace()
    }

    pub fn feature_dim(&self) -> usize {
        self.cfg.feature_dim
    }

    fn check_sequence(&self, seq: &WordSequence) -> Result<()> {
        if seq.max_len != self.cfg.max_len || seq.matrix.shape() != [self.cfg.embed_dim, self.cfg.max_len]
        {
            return Err(Error::shape(format!(
                "textcnn: sequence {:?} (max_len {}) does not match config [{}, {}]",
                seq.matrix.shape(),
                seq.max_len,
                self.cfg.embed_dim,
                self.cfg.max_len
            )));
        }
        Ok(())
    }

    /// Builds the batched `[B,E,T]` input. With trainable embeddings the
    /// matrix is rebuilt from n-gram ids and the current table; otherwise
    /// the sequence's stored matrix is used as-is.
    fn build_input(&self, batch: &[&WordSequence]) -> Result<Tensor> {
        let (e, t) = (self.cfg.embed_dim, self.cfg.max_len);
        let mut x = Tensor::zeros(&[batch.len(), e, t]);
        let mut column = vec![0.0; e];
        for (bi, seq) in batch.iter().enumerate() {
            self.check_sequence(seq)?;
            let data = x.data_mut();
            if self.cfg.train_embeddings {
                for (ti, ids) in seq.ngram_ids.iter().enumerate() {
                    for v in &mut column {
                        *v = 0.0;
                    }
                    self.embedder.accumulate_ids(ids, &mut column);
                    for (d, &v) in column.iter().enumerate() {
                        data[(bi * e + d) * t + ti] = v;
                    }
                }
            } else {
                data[bi * e * t..(bi + 1) * e * t].copy_from_slice(seq.matrix.data());
            }
        }
        Ok(x)
    }

    /// Scatters the input gradient back into the embedding table.
    fn accumulate_embed_grad(&mut self, batch: &[&WordSequence], dx: &Tensor) {
        let (e, t) = (self.cfg.embed_dim, self.cfg.max_len);
        let dim = self.embedder.dim;
        let gd = self.embed_grad.data_mut();
        for (bi, seq) in batch.iter().enumerate() {
            for (ti, ids) in seq.ngram_ids.iter().enumerate() {
                let inv = 1.0 / ids.len() as f64;
                for &id in ids {
                    let row = &mut gd[id as usize * dim..(id as usize + 1) * dim];
                    for (d, g) in row.iter_mut().enumerate() {
                        *g += dx.data()[(bi * e + d) * t + ti] * inv;
                    }
                }
            }
        }
    }

    /// Training-mode 128-dim features for a batch (fusion branch entry).
    pub fn features_train(&mut self, batch: &[&WordSequence], rng: &mut Rng) -> Result<Tensor> {
        let x = self.build_input(batch)?;
        self.trunk.forward(&x, Mode::Train, rng)
    }

    /// Backward from feature gradients down to the embedding table.
    pub fn backward_features(&mut self, batch: &[&WordSequence], dfeat: &Tensor) {
        let dx = self.trunk.backward(dfeat);
        if self.cfg.train_embeddings {
            self.accumulate_embed_grad(batch, &dx);
        }
    }

    /// Read-only feature forward.
    pub fn features_infer(&self, seq: &WordSequence) -> Result<Tensor> {
        let x = self.build_input(&[seq])?;
        self.trunk.infer(&x)
    }

    /// Read-only batched feature forward.
    pub fn features_infer_batch(&self, batch: &[&WordSequence]) -> Result<Tensor> {
        let x = self.build_input(batch)?;
        self.trunk.infer(&x)
    }

    /// Read-only batched logits.
    pub fn logits_infer_batch(&self, batch: &[&WordSequence]) -> Result<Tensor> {
        let features = self.features_infer_batch(batch)?;
        self.head.infer(&features)
    }

    /// Feature-mode output equals the pre-head activation of the
    /// standalone model by construction: the head is applied on top.
    pub fn logits_infer(&self, seq: &WordSequence) -> Result<Tensor> {
        let features = self.features_infer(seq)?;
        self.head.infer(&features)
    }

    pub fn state<'a>(&'a self, prefix: &str, out: &mut Vec<(String, &'a Tensor)>) {
        out.push((format!("{prefix}embedding.table"), &self.embedder.table));
        self.trunk.state(&format!("{prefix}trunk"), out);
        self.head.state(&format!("{prefix}head"), out);
    }

    pub fn state_mut<'a>(&'a mut self, prefix: &str, out: &mut Vec<(String, &'a mut Tensor)>) {
        out.push((format!("{prefix}embedding.table"), &mut self.embedder.table));
        self.trunk.state_mut(&format!("{prefix}trunk"), out);
        self.head.state_mut(&format!("{prefix}head"), out);
    }

    /// Trainable parameters in graph order; the head is excluded when
    /// `include_head` is false (fusion cuts it off).
    pub fn param_slots_inner<'a>(
        &'a mut self,
        prefix: &str,
        include_head: bool,
        out: &mut Vec<ParamSlot<'a>>,
    ) {
        if self.cfg.train_embeddings {
            out.push(ParamSlot {
                name: format!("{prefix}embedding.table"),
                param: &mut self.embedder.table,
                grad: &mut self.embed_grad,
            });
        }
        self.trunk.param_slots(&format!("{prefix}trunk"), out);
        if include_head {
            self.head.param_slots(&format!("{prefix}head"), out);
        }
    }
}

impl Classifier<WordSequence> for TextCnnModel {
    fn num_classes(&self) -> usize {
        self.cfg.num_classes
    }

    fn forward_train(&mut self, batch: &[&WordSequence], rng: &mut Rng) -> Result<Tensor> {
        let features = self.features_train(batch, rng)?;
        self.head.forward(&features, Mode::Train, rng)
    }

    fn backward(&mut self, batch: &[&WordSequence], dlogits: &Tensor) {
        let dfeat = self.head.backward(dlogits);
        self.backward_features(batch, &dfeat);
    }

    fn infer_logits(&self, sample: &WordSequence) -> Result<Vec<f64>> {
        Ok(self.logits_infer(sample)?.data().to_vec())
    }

    fn param_slots(&mut self) -> Vec<ParamSlot<'_>> {
        let mut out = Vec::new();
        self.param_slots_inner("", true, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{sequence_embed, SubwordHasher};
    use alloc::string::ToString;

    fn small_cfg() -> TextCnnConfig {
        TextCnnConfig {
            embed_dim: 8,
            max_len: 32,
            depth: 2,
            channels: 6,
            window: 3,
            pool_stride: 2,
            feature_dim: 5,
            dropout: 0.0,
            num_classes: 3,
            batchnorm: false,
            train_embeddings: true,
        }
    }

    fn embedder(dim: usize, seed: u64) -> SubwordEmbedder {
        let hasher = SubwordHasher::new(3, 6, 200, 3).unwrap();
        SubwordEmbedder::random(hasher, dim, &mut Rng::from_seed(seed))
    }

    fn seq(words: &[&str], emb: &SubwordEmbedder, max_len: usize) -> WordSequence {
        let tokens: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        sequence_embed(&tokens, emb, max_len).unwrap()
    }

    #[test]
    fn full_config_shape_trace() {
        // (E,500) -> (512,500) -> (512,250) -> (512,125) -> (512,62)
        // -> (512,31) -> (512) -> (128)
        let cfg = TextCnnConfig::full(32, 10);
        let emb = embedder(32, 1);
        let model = TextCnnModel::new(cfg, emb, &mut Rng::from_seed(2)).unwrap();
        let trace = model.shape_trace();
        let pooled: Vec<&Vec<usize>> = trace
            .iter()
            .filter(|s| s.len() == 3 && s[1] == 512)
            .collect();
        assert_eq!(pooled.first().unwrap().as_slice(), &[1, 512, 500]);
        assert_eq!(trace.last().unwrap().as_slice(), &[1, 128]);
        let lens: Vec<usize> = trace
            .iter()
            .filter(|s| s.len() == 3)
            .map(|s| s[2])
            .collect();
        assert!(lens.contains(&250) && lens.contains(&125) && lens.contains(&62) && lens.contains(&31));
    }

    #[test]
    fn zero_input_gives_bias_driven_constant_logits() {
        let cfg = small_cfg();
        let emb = embedder(8, 3);
        let model = TextCnnModel::new(cfg, emb, &mut Rng::from_seed(4)).unwrap();
        let empty = WordSequence::empty(8, 32);
        let l1 = model.infer_logits(&empty).unwrap();
        let l2 = model.infer_logits(&empty).unwrap();
        assert_eq!(l1, l2);
        assert!(l1.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn feature_mode_equals_pre_head_activation() {
        let cfg = small_cfg();
        let emb = embedder(8, 5);
        let model = TextCnnModel::new(cfg, emb, &mut Rng::from_seed(6)).unwrap();
        let s = seq(&["invoice", "total", "amount"], &model.embedder, 32);
        let features = model.features_infer(&s).unwrap();
        let logits = model.logits_infer(&s).unwrap();
        let head_out = model.head.infer(&features).unwrap();
        assert!(logits.max_abs_diff(&head_out) < 1e-15);
        assert_eq!(features.shape(), &[1, 5]);
    }

    #[test]
    fn permuting_tokens_changes_cnn_logits() {
        let cfg = small_cfg();
        let emb = embedder(8, 7);
        let model = TextCnnModel::new(cfg, emb, &mut Rng::from_seed(8)).unwrap();
        let a = seq(&["alpha", "beta", "gamma", "delta"], &model.embedder, 32);
        let b = seq(&["delta", "gamma", "beta", "alpha"], &model.embedder, 32);
        let la = model.infer_logits(&a).unwrap();
        let lb = model.infer_logits(&b).unwrap();
        let diff: f64 = la
            .iter()
            .zip(lb.iter())
            .map(|(x, y)| crate::math::abs(x - y))
            .fold(0.0, f64::max);
        assert!(diff > 1e-9, "sequence model should be order sensitive");
    }

    #[test]
    fn truncation_consistency_for_short_documents() {
        // A document much shorter than max_len scores the same under a
        // shorter zero-pad budget: the padding tail feeds only constant
        // bias pathways, so features agree within 1e-5. The two models
        // share identical weights because layer shapes are independent of
        // max_len and the init draws are seeded identically.
        let mut cfg32 = small_cfg();
        cfg32.train_embeddings = false;
        let mut cfg16 = cfg32.clone();
        cfg16.max_len = 16;
        let emb = embedder(8, 9);
        let m32 = TextCnnModel::new(cfg32, emb.clone(), &mut Rng::from_seed(10)).unwrap();
        let m16 = TextCnnModel::new(cfg16, emb.clone(), &mut Rng::from_seed(10)).unwrap();
        let words = ["short", "document", "here"];
        let f32_ = m32.features_infer(&seq(&words, &emb, 32)).unwrap();
        let f16_ = m16.features_infer(&seq(&words, &emb, 16)).unwrap();
        assert!(
            f32_.max_abs_diff(&f16_) < 1e-5,
            "padding tail changed the features by {}",
            f32_.max_abs_diff(&f16_)
        );
    }

    #[test]
    fn mismatched_sequence_is_rejected() {
        let cfg = small_cfg();
        let emb = embedder(8, 11);
        let model = TextCnnModel::new(cfg, emb.clone(), &mut Rng::from_seed(12)).unwrap();
        let wrong = seq(&["word"], &emb, 16);
        assert!(model.infer_logits(&wrong).is_err());
    }

    #[test]
    fn invalid_config_is_rejected_at_build() {
        let mut cfg = small_cfg();
        cfg.window = 64; // > max_len
        let emb = embedder(8, 13);
        assert!(TextCnnModel::new(cfg, emb, &mut Rng::from_seed(14)).is_err());

        // pooling 32 -> 16 -> 8 -> 4 -> 2 -> 1 -> underflow at depth 6
        let mut cfg = small_cfg();
        cfg.depth = 6;
        let emb = embedder(8, 15);
        assert!(TextCnnModel::new(cfg, emb, &mut Rng::from_seed(16)).is_err());
    }
}
