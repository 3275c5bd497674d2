//! Softmax cross-entropy, numerically stabilized by max subtraction.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::tensor::Tensor;

/// Row-wise softmax of `logits: [B,K]`.
pub fn softmax_rows(logits: &Tensor) -> Result<Tensor> {
    if logits.rank() != 2 {
        return Err(Error::shape(format!(
            "softmax: want logits [B,K], got {:?}",
            logits.shape()
        )));
    }
    let (b, k) = (logits.dim(0), logits.dim(1));
    let mut out = Tensor::zeros(&[b, k]);
    let xd = logits.data();
    let od = out.data_mut();
    for bi in 0..b {
        let row = &xd[bi * k..(bi + 1) * k];
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let orow = &mut od[bi * k..(bi + 1) * k];
        let mut sum = 0.0;
        for (o, &x) in orow.iter_mut().zip(row.iter()) {
            let e = math::exp(x - m);
            *o = e;
            sum += e;
        }
        for o in orow.iter_mut() {
            *o /= sum;
        }
    }
    Ok(out)
}

/// Mean negative log-likelihood over the batch plus its gradient
/// `(softmax - onehot) / B`.
pub fn softmax_cross_entropy(logits: &Tensor, labels: &[usize]) -> Result<(f64, Tensor)> {
    if logits.rank() != 2 || logits.dim(0) != labels.len() {
        return Err(Error::shape(format!(
            "softmax_cross_entropy: logits {:?} vs {} labels",
            logits.shape(),
            labels.len()
        )));
    }
    let (b, k) = (logits.dim(0), logits.dim(1));
    for (i, &l) in labels.iter().enumerate() {
        if l >= k {
            return Err(Error::data(format!(
                "softmax_cross_entropy: label {l} at row {i} out of range for {k} classes"
            )));
        }
    }
    let xd = logits.data();
    let mut grad = Tensor::zeros(&[b, k]);
    let gd = grad.data_mut();
    let inv_b = 1.0 / b as f64;
    let mut loss = 0.0;
    let mut exps = vec![0.0; k];
    for bi in 0..b {
        let row = &xd[bi * k..(bi + 1) * k];
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for (e, &x) in exps.iter_mut().zip(row.iter()) {
            *e = math::exp(x - m);
            sum += *e;
        }
        let log_sum = math::ln(sum);
        loss += (m + log_sum) - row[labels[bi]];
        let grow = &mut gd[bi * k..(bi + 1) * k];
        for (g, &e) in grow.iter_mut().zip(exps.iter()) {
            *g = e / sum * inv_b;
        }
        grow[labels[bi]] -= inv_b;
    }
    Ok((loss * inv_b, grad))
}

/// Softmax of a flat logit vector, for single-sample prediction output.
pub fn softmax_vec(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|&x| math::exp(x - m)).collect();
    let sum: f64 = out.iter().sum();
    for v in &mut out {
        *v /= sum;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_logits_cost_ln_k() {
        let logits = Tensor::zeros(&[1, 4]);
        let (loss, _) = softmax_cross_entropy(&logits, &[2]).unwrap();
        assert_eq!(loss, math::ln(4.0));
    }

    #[test]
    fn confident_correct_prediction_has_tiny_loss() {
        // Scalar oracle: loss = ln(1 + exp(-20)).
        let logits = Tensor::from_vec(&[1, 2], alloc::vec![10.0, -10.0]).unwrap();
        let (loss, _) = softmax_cross_entropy(&logits, &[0]).unwrap();
        let want = math::ln_1p(math::exp(-20.0));
        assert!((loss - want).abs() < 1e-14, "loss {loss} want {want}");
        assert!((loss - 2.06e-9).abs() < 1e-11);
    }

    #[test]
    fn loss_is_nonnegative_and_shift_invariant() {
        let a = Tensor::from_vec(&[1, 3], alloc::vec![1.0, 2.0, 3.0]).unwrap();
        let b = Tensor::from_vec(&[1, 3], alloc::vec![101.0, 102.0, 103.0]).unwrap();
        let (la, _) = softmax_cross_entropy(&a, &[1]).unwrap();
        let (lb, _) = softmax_cross_entropy(&b, &[1]).unwrap();
        assert!(la >= 0.0);
        assert!((la - lb).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_label_is_a_data_error() {
        let logits = Tensor::zeros(&[1, 3]);
        assert!(matches!(
            softmax_cross_entropy(&logits, &[3]).unwrap_err(),
            Error::Data(_)
        ));
    }

    #[test]
    fn gradient_rows_sum_to_zero() {
        let logits =
            Tensor::from_vec(&[2, 3], alloc::vec![0.3, -1.2, 0.7, 2.0, 0.1, -0.4]).unwrap();
        let (_, grad) = softmax_cross_entropy(&logits, &[0, 2]).unwrap();
        for bi in 0..2 {
            let s: f64 = grad.data()[bi * 3..(bi + 1) * 3].iter().sum();
            assert!(s.abs() < 1e-15);
        }
    }

    #[test]
    fn softmax_vec_sums_to_one() {
        let p = softmax_vec(&[1.0, 2.0, 3.0, -1.0]);
        let s: f64 = p.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
