//! Classification scoring: overall accuracy, per-class and macro F1,
//! confusion matrix, and the oracle-fusion upper bound.
//!
//! "Class-balanced F1" here is the unweighted macro average of per-class
//! F1 scores; a class with no predictions and no support scores 0 and is
//! listed in `undefined_f1_classes` rather than propagating NaN.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub n_samples: usize,
    pub overall_accuracy: f64,
    pub macro_f1: f64,
    pub per_class_f1: Vec<f64>,
    /// `confusion[true][pred]` counts.
    pub confusion: Vec<Vec<u64>>,
    /// Classes whose precision + recall was 0 (F1 defined as 0).
    pub undefined_f1_classes: Vec<usize>,
}

fn check_lengths(preds: &[usize], labels: &[usize]) -> Result<()> {
    if preds.len() != labels.len() || preds.is_empty() {
        return Err(Error::data(format!(
            "metrics: got {} predictions vs {} labels",
            preds.len(),
            labels.len()
        )));
    }
    Ok(())
}

pub fn overall_accuracy(preds: &[usize], labels: &[usize]) -> Result<f64> {
    check_lengths(preds, labels)?;
    let correct = preds
        .iter()
        .zip(labels.iter())
        .filter(|(p, l)| p == l)
        .count();
    Ok(correct as f64 / preds.len() as f64)
}

pub fn confusion_matrix(preds: &[usize], labels: &[usize], k: usize) -> Result<Vec<Vec<u64>>> {
    check_lengths(preds, labels)?;
    let mut m = vec![vec![0u64; k]; k];
    for (&p, &l) in preds.iter().zip(labels.iter()) {
        if p >= k || l >= k {
            return Err(Error::data(format!(
                "metrics: index out of range for {k} classes (pred {p}, label {l})"
            )));
        }
        m[l][p] += 1;
    }
    Ok(m)
}

/// Per class: one-vs-rest precision/recall, `F1 = 2PR/(P+R)` (0 when
/// `P + R = 0`); macro F1 is their unweighted mean.
pub fn class_balanced_f1(
    preds: &[usize],
    labels: &[usize],
    k: usize,
) -> Result<(f64, Vec<f64>, Vec<usize>)> {
    let confusion = confusion_matrix(preds, labels, k)?;
    per_class_f1_from_confusion(&confusion)
}

fn per_class_f1_from_confusion(confusion: &[Vec<u64>]) -> Result<(f64, Vec<f64>, Vec<usize>)> {
    let k = confusion.len();
    if k == 0 {
        return Err(Error::data("metrics: zero classes"));
    }
    let mut per_class = Vec::with_capacity(k);
    let mut undefined = Vec::new();
    for c in 0..k {
        let tp = confusion[c][c];
        let fn_: u64 = (0..k).filter(|&j| j != c).map(|j| confusion[c][j]).sum();
        let fp: u64 = (0..k).filter(|&i| i != c).map(|i| confusion[i][c]).sum();
        let denom = 2 * tp + fp + fn_;
        if denom == 0 {
            undefined.push(c);
            per_class.push(0.0);
        } else {
            per_class.push(2.0 * tp as f64 / denom as f64);
        }
    }
    let macro_f1 = per_class.iter().sum::<f64>() / k as f64;
    Ok((macro_f1, per_class, undefined))
}

/// Upper-bound accuracy of a perfect model selector: a sample counts as
/// correct when either prediction vector matches the label.
pub fn oracle_fusion(preds_a: &[usize], preds_b: &[usize], labels: &[usize]) -> Result<f64> {
    check_lengths(preds_a, labels)?;
    check_lengths(preds_b, labels)?;
    let correct = labels
        .iter()
        .enumerate()
        .filter(|(i, &l)| preds_a[*i] == l || preds_b[*i] == l)
        .count();
    Ok(correct as f64 / labels.len() as f64)
}

/// Full scoring pass over one prediction vector.
pub fn evaluate(preds: &[usize], labels: &[usize], k: usize) -> Result<EvalReport> {
    let confusion = confusion_matrix(preds, labels, k)?;
    let (macro_f1, per_class_f1, undefined_f1_classes) = per_class_f1_from_confusion(&confusion)?;
    let trace: u64 = (0..k).map(|c| confusion[c][c]).sum();
    let n_samples = preds.len();
    Ok(EvalReport {
        n_samples,
        overall_accuracy: trace as f64 / n_samples as f64,
        macro_f1,
        per_class_f1,
        confusion,
        undefined_f1_classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use proptest::prelude::*;

    #[test]
    fn perfect_predictions_score_one() {
        let labels = [0, 1, 2, 1, 0];
        assert_eq!(overall_accuracy(&labels, &labels).unwrap(), 1.0);
        let (macro_f1, per_class, undef) = class_balanced_f1(&labels, &labels, 3).unwrap();
        assert_eq!(macro_f1, 1.0);
        assert!(per_class.iter().all(|&f| f == 1.0));
        assert!(undef.is_empty());
    }

    #[test]
    fn two_of_three_correct() {
        let oa = overall_accuracy(&[0, 1, 1], &[0, 1, 0]).unwrap();
        assert!((oa - 2.0 / 3.0).abs() < 1e-15);
    }

    // Hand-computed oracle from the count table:
    // class 0: tp=1, fp=1, fn=0 -> F1 = 2/3
    // class 1: tp=1, fp=0, fn=1 -> F1 = 2/3
    #[test]
    fn f1_matches_hand_count_table() {
        let (macro_f1, per_class, _) = class_balanced_f1(&[0, 0, 1], &[0, 1, 1], 2).unwrap();
        assert!((per_class[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((per_class[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((macro_f1 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn unsupported_unpredicted_class_scores_zero_with_flag() {
        let (macro_f1, per_class, undef) = class_balanced_f1(&[0, 0], &[0, 0], 2).unwrap();
        assert_eq!(per_class[1], 0.0);
        assert_eq!(undef, alloc::vec![1]);
        assert!((macro_f1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn oracle_covers_either_model() {
        assert_eq!(oracle_fusion(&[0, 1], &[1, 1], &[0, 1]).unwrap(), 1.0);
        assert_eq!(oracle_fusion(&[1, 0], &[2, 2], &[0, 1]).unwrap(), 0.0);
    }

    #[test]
    fn confusion_diag_reproduces_accuracy() {
        let preds = [0, 1, 2, 2, 1, 0, 1];
        let labels = [0, 2, 2, 2, 1, 1, 1];
        let report = evaluate(&preds, &labels, 3).unwrap();
        let oa = overall_accuracy(&preds, &labels).unwrap();
        assert_eq!(report.overall_accuracy, oa);
        let total: u64 = report.confusion.iter().flatten().sum();
        assert_eq!(total as usize, preds.len());
    }

    #[test]
    fn single_sample_confusion() {
        let m = confusion_matrix(&[1], &[0], 2).unwrap();
        assert_eq!(m, alloc::vec![alloc::vec![0, 1], alloc::vec![0, 0]]);
    }

    #[test]
    fn length_mismatch_is_a_data_error() {
        assert!(overall_accuracy(&[0], &[0, 1]).is_err());
        assert!(oracle_fusion(&[0, 1], &[0], &[0, 1]).is_err());
    }

    #[test]
    fn out_of_range_class_is_a_data_error() {
        assert!(confusion_matrix(&[3], &[0], 2).is_err());
        assert!(class_balanced_f1(&[0], &[5], 2).is_err());
    }

    #[test]
    fn oracle_dominates_on_seeded_random_vectors() {
        let mut rng = Rng::from_seed(2024);
        for _ in 0..1000 {
            let n = 1 + rng.index(30);
            let k = 2 + rng.index(5);
            let labels: alloc::vec::Vec<usize> = (0..n).map(|_| rng.index(k)).collect();
            let a: alloc::vec::Vec<usize> = (0..n).map(|_| rng.index(k)).collect();
            let b: alloc::vec::Vec<usize> = (0..n).map(|_| rng.index(k)).collect();
            let oracle = oracle_fusion(&a, &b, &labels).unwrap();
            let oa_a = overall_accuracy(&a, &labels).unwrap();
            let oa_b = overall_accuracy(&b, &labels).unwrap();
            assert!(oracle >= oa_a.max(oa_b));
        }
    }

    proptest! {
        #[test]
        fn metrics_are_permutation_invariant(seed in 0u64..500) {
            let mut rng = Rng::from_seed(seed);
            let n = 5 + rng.index(40);
            let k = 2 + rng.index(4);
            let labels: alloc::vec::Vec<usize> = (0..n).map(|_| rng.index(k)).collect();
            let preds: alloc::vec::Vec<usize> = (0..n).map(|_| rng.index(k)).collect();
            let mut order: alloc::vec::Vec<usize> = (0..n).collect();
            rng.shuffle(&mut order);
            let labels_p: alloc::vec::Vec<usize> = order.iter().map(|&i| labels[i]).collect();
            let preds_p: alloc::vec::Vec<usize> = order.iter().map(|&i| preds[i]).collect();
            let r1 = evaluate(&preds, &labels, k).unwrap();
            let r2 = evaluate(&preds_p, &labels_p, k).unwrap();
            prop_assert_eq!(r1, r2);
        }

        #[test]
        fn macro_f1_is_bounded(seed in 0u64..200) {
            let mut rng = Rng::from_seed(seed);
            let n = 1 + rng.index(50);
            let k = 1 + rng.index(6);
            let labels: alloc::vec::Vec<usize> = (0..n).map(|_| rng.index(k)).collect();
            let preds: alloc::vec::Vec<usize> = (0..n).map(|_| rng.index(k)).collect();
            let (macro_f1, _, _) = class_balanced_f1(&preds, &labels, k).unwrap();
            prop_assert!((0.0..=1.0).contains(&macro_f1));
            if k == 1 {
                let oa = overall_accuracy(&preds, &labels).unwrap();
                prop_assert_eq!(macro_f1, oa);
            }
        }
    }
}
