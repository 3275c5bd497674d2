//! Weight initialization.

use crate::math;
use crate::rng::Rng;
use crate::tensor::Tensor;

/// He initialization: draws from `normal(0, sqrt(2 / fan_in))`.
pub fn he_init(shape: &[usize], fan_in: usize, rng: &mut Rng) -> Tensor {
    debug_assert!(fan_in >= 1);
    let std = math::sqrt(2.0 / fan_in as f64);
    let mut t = Tensor::zeros(shape);
    for v in t.data_mut() {
        *v = std * rng.normal();
    }
    t
}

/// Embedding-table initialization: `normal(0, 1 / sqrt(dim))`.
pub fn embedding_init(shape: &[usize], dim: usize, rng: &mut Rng) -> Tensor {
    let std = 1.0 / math::sqrt(dim as f64);
    let mut t = Tensor::zeros(shape);
    for v in t.data_mut() {
        *v = std * rng.normal();
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_std(t: &Tensor) -> f64 {
        let n = t.len() as f64;
        let mean: f64 = t.data().iter().sum::<f64>() / n;
        let var: f64 = t.data().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        math::sqrt(var)
    }

    #[test]
    fn fan_in_two_gives_unit_std() {
        let mut rng = Rng::from_seed(100);
        let t = he_init(&[100_000], 2, &mut rng);
        let s = sample_std(&t);
        assert!((s - 1.0).abs() < 0.02, "std {s}");
    }

    #[test]
    fn fan_in_eight_gives_half_std() {
        let mut rng = Rng::from_seed(101);
        let t = he_init(&[100_000], 8, &mut rng);
        let s = sample_std(&t);
        assert!((s - 0.5).abs() < 0.01, "std {s}");
    }

    #[test]
    fn same_seed_gives_identical_tensors() {
        let a = he_init(&[3, 4], 3, &mut Rng::from_seed(7));
        let b = he_init(&[3, 4], 3, &mut Rng::from_seed(7));
        assert_eq!(a.data(), b.data());
    }
}
