//! SGD-momentum training loop shared by all classifiers.
//!
//! Single-writer: the loop owns the model exclusively. All randomness
//! (shuffling, dropout) flows from the passed generator, with a child
//! generator forked per epoch, so a seed fully determines the run.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ops::{softmax_cross_entropy, softmax_vec};
use crate::optim::{ParamSlot, SgdMomentum};
use crate::rng::Rng;
use crate::tensor::Tensor;

/// A model trainable against integer class labels.
pub trait Classifier<S> {
    fn num_classes(&self) -> usize;
    /// Training-mode forward over a batch; returns logits `[B,K]`.
    fn forward_train(&mut self, batch: &[&S], rng: &mut Rng) -> Result<Tensor>;
    /// Backward for the batch of the preceding `forward_train`.
    fn backward(&mut self, batch: &[&S], dlogits: &Tensor);
    /// Read-only single-sample logits.
    fn infer_logits(&self, sample: &S) -> Result<Vec<f64>>;
    fn param_slots(&mut self) -> Vec<ParamSlot<'_>>;
}

#[derive(Debug, Clone)]
pub struct TrainHyper {
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

impl Default for TrainHyper {
    fn default() -> Self {
        TrainHyper {
            learning_rate: 0.01,
            momentum: 0.9,
            batch_size: 40,
            epochs: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub loss: f64,
    pub train_acc: f64,
    pub val_acc: Option<f64>,
}

/// Index of the largest logit (first on ties).
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Predicted class and softmax probabilities for one sample.
pub fn predict<S, M: Classifier<S>>(model: &M, sample: &S) -> Result<(usize, Vec<f64>)> {
    let logits = model.infer_logits(sample)?;
    let probs = softmax_vec(&logits);
    Ok((argmax(&logits), probs))
}

/// Predictions over a slice of samples (frozen model, read-only).
pub fn predict_all<S, M: Classifier<S>>(model: &M, samples: &[S]) -> Result<Vec<usize>> {
    samples
        .iter()
        .map(|s| Ok(argmax(&model.infer_logits(s)?)))
        .collect()
}

/// Shuffled mini-batch SGD with momentum. `train_acc` is measured on the
/// training forwards themselves (dropout active); `val_acc` is a read-only
/// pass over the validation split when one is given.
pub fn train_classifier<S, M: Classifier<S>>(
    model: &mut M,
    samples: &[S],
    labels: &[usize],
    val: Option<(&[S], &[usize])>,
    hyper: &TrainHyper,
    rng: &mut Rng,
) -> Result<Vec<EpochStats>> {
    if samples.is_empty() {
        return Err(Error::data("train: empty dataset"));
    }
    if samples.len() != labels.len() {
        return Err(Error::data(format!(
            "train: {} samples vs {} labels",
            samples.len(),
            labels.len()
        )));
    }
    let k = model.num_classes();
    if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
        return Err(Error::data(format!(
            "train: label {bad} out of range for {k} classes"
        )));
    }
    if hyper.batch_size == 0 || hyper.epochs == 0 {
        return Err(Error::config("train: batch_size and epochs must be >= 1"));
    }

    let mut opt = SgdMomentum::new(hyper.learning_rate, hyper.momentum);
    let mut history = Vec::with_capacity(hyper.epochs);
    let mut order: Vec<usize> = (0..samples.len()).collect();

    for epoch in 1..=hyper.epochs {
        let mut epoch_rng = rng.fork();
        epoch_rng.shuffle(&mut order);
        let mut loss_sum = 0.0;
        let mut correct = 0usize;
        for chunk in order.chunks(hyper.batch_size) {
            let batch: Vec<&S> = chunk.iter().map(|&i| &samples[i]).collect();
            let batch_labels: Vec<usize> = chunk.iter().map(|&i| labels[i]).collect();
            {
                let mut slots = model.param_slots();
                SgdMomentum::zero_grads(&mut slots);
            }
            let logits = model.forward_train(&batch, &mut epoch_rng)?;
            let (loss, dlogits) = softmax_cross_entropy(&logits, &batch_labels)?;
            if !loss.is_finite() {
                return Err(Error::data(format!(
                    "train: loss diverged at epoch {epoch}"
                )));
            }
            for (bi, &label) in batch_labels.iter().enumerate() {
                let row = &logits.data()[bi * k..(bi + 1) * k];
                if argmax(row) == label {
                    correct += 1;
                }
            }
            loss_sum += loss * batch.len() as f64;
            model.backward(&batch, &dlogits);
            let mut slots = model.param_slots();
            opt.step(&mut slots);
        }
        let val_acc = match val {
            Some((vs, vl)) => {
                let preds = predict_all(model, vs)?;
                Some(crate::metrics::overall_accuracy(&preds, vl)?)
            }
            None => None,
        };
        history.push(EpochStats {
            epoch,
            loss: loss_sum / samples.len() as f64,
            train_acc: correct as f64 / samples.len() as f64,
            val_acc,
        });
    }
    Ok(history)
}
