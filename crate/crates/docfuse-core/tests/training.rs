//! Training-loop behavior: determinism, loss sanity, and small synthetic
//! overfit smoke tests.

use docfuse_core::image::{preprocess_image, GrayImage};
use docfuse_core::models::{
    train_classifier, Classifier, TextCnnConfig, TextCnnModel, TrainHyper, VisionConfig,
    VisionModel,
};
use docfuse_core::rng::Rng;
use docfuse_core::text::{sequence_embed, SubwordEmbedder, SubwordHasher, WordSequence};

fn embedder(dim: usize, seed: u64) -> SubwordEmbedder {
    let hasher = SubwordHasher::new(3, 5, 500, 11).unwrap();
    SubwordEmbedder::random(hasher, dim, &mut Rng::from_seed(seed))
}

fn text_cfg() -> TextCnnConfig {
    TextCnnConfig {
        embed_dim: 12,
        max_len: 24,
        depth: 2,
        channels: 8,
        window: 3,
        pool_stride: 2,
        feature_dim: 8,
        dropout: 0.2,
        num_classes: 2,
        batchnorm: false,
        train_embeddings: true,
    }
}

fn text_dataset(emb: &SubwordEmbedder) -> (Vec<WordSequence>, Vec<usize>) {
    let class_words = [
        ["invoice", "payment", "amount", "total"],
        ["meeting", "agenda", "minutes", "schedule"],
    ];
    let mut rng = Rng::from_seed(31);
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for i in 0..24 {
        let class = i % 2;
        let words = &class_words[class];
        let mut tokens: Vec<String> = Vec::new();
        for _ in 0..8 {
            tokens.push(words[rng.index(words.len())].to_string());
        }
        samples.push(sequence_embed(&tokens, emb, 24).unwrap());
        labels.push(class);
    }
    (samples, labels)
}

#[test]
fn same_seed_gives_bit_identical_parameters_after_training() {
    let run = || {
        let emb = embedder(12, 7);
        let mut model = TextCnnModel::new(text_cfg(), emb, &mut Rng::from_seed(5)).unwrap();
        let (samples, labels) = text_dataset(&model.embedder.clone());
        let hyper = TrainHyper {
            learning_rate: 0.05,
            momentum: 0.9,
            batch_size: 8,
            epochs: 5,
        };
        let history =
            train_classifier(&mut model, &samples, &labels, None, &hyper, &mut Rng::from_seed(9))
                .unwrap();
        let mut state = Vec::new();
        model.state("", &mut state);
        let bits: Vec<u64> = state
            .iter()
            .flat_map(|(_, t)| t.data().iter().map(|v| v.to_bits()))
            .collect();
        (history, bits)
    };
    let (h1, b1) = run();
    let (h2, b2) = run();
    assert_eq!(b1, b2, "parameters diverged across identical runs");
    assert_eq!(h1.last().unwrap().loss.to_bits(), h2.last().unwrap().loss.to_bits());
}

#[test]
fn losses_are_finite_and_nonnegative() {
    let emb = embedder(12, 8);
    let mut model = TextCnnModel::new(text_cfg(), emb, &mut Rng::from_seed(6)).unwrap();
    let (samples, labels) = text_dataset(&model.embedder.clone());
    let hyper = TrainHyper {
        learning_rate: 0.05,
        momentum: 0.9,
        batch_size: 8,
        epochs: 10,
    };
    let history =
        train_classifier(&mut model, &samples, &labels, None, &hyper, &mut Rng::from_seed(10))
            .unwrap();
    assert_eq!(history.len(), 10);
    for stats in &history {
        assert!(stats.loss.is_finite() && stats.loss >= 0.0);
        assert!((0.0..=1.0).contains(&stats.train_acc));
    }
}

#[test]
fn separable_text_classes_are_learned() {
    let emb = embedder(12, 9);
    let mut model = TextCnnModel::new(text_cfg(), emb, &mut Rng::from_seed(7)).unwrap();
    let (samples, labels) = text_dataset(&model.embedder.clone());
    let hyper = TrainHyper {
        learning_rate: 0.05,
        momentum: 0.9,
        batch_size: 8,
        epochs: 30,
    };
    train_classifier(&mut model, &samples, &labels, None, &hyper, &mut Rng::from_seed(11))
        .unwrap();
    let mut correct = 0;
    for (s, &l) in samples.iter().zip(labels.iter()) {
        let logits = model.infer_logits(s).unwrap();
        if docfuse_core::models::argmax(&logits) == l {
            correct += 1;
        }
    }
    assert_eq!(correct, samples.len(), "failed to overfit separable classes");
}

#[test]
fn vision_learns_bright_vs_dark() {
    let mut cfg = VisionConfig::micro(2);
    cfg.input_size = 16;
    let mut model = VisionModel::new(cfg, &mut Rng::from_seed(12)).unwrap();
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    let mut rng = Rng::from_seed(13);
    for i in 0..16 {
        let class = i % 2;
        let base: u8 = if class == 0 { 40 } else { 200 };
        let pixels: Vec<u8> = (0..400)
            .map(|_| base.saturating_add(rng.index(30) as u8))
            .collect();
        let raw = GrayImage::new(20, 20, pixels).unwrap();
        samples.push(preprocess_image(&raw, 16).unwrap());
        labels.push(class);
    }
    let hyper = TrainHyper {
        learning_rate: 0.05,
        momentum: 0.9,
        batch_size: 8,
        epochs: 20,
    };
    train_classifier(&mut model, &samples, &labels, None, &hyper, &mut Rng::from_seed(14))
        .unwrap();
    let mut correct = 0;
    for (s, &l) in samples.iter().zip(labels.iter()) {
        let logits = model.infer_logits(s).unwrap();
        if docfuse_core::models::argmax(&logits) == l {
            correct += 1;
        }
    }
    assert!(correct >= 15, "vision overfit failed: {correct}/16");
}

#[test]
fn empty_dataset_is_a_data_error() {
    let emb = embedder(12, 10);
    let mut model = TextCnnModel::new(text_cfg(), emb, &mut Rng::from_seed(8)).unwrap();
    let hyper = TrainHyper::default();
    let err = train_classifier(&mut model, &[], &[], None, &hyper, &mut Rng::from_seed(15))
        .unwrap_err();
    assert!(matches!(err, docfuse_core::Error::Data(_)));
}
