//! Inverted dropout: survivors are scaled by `1/(1-p)` at training time so
//! inference is a pure identity.

use alloc::format;

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::tensor::Tensor;

/// Training-mode forward; returns the output and the applied mask
/// (0 for dropped units, `1/(1-p)` for survivors).
pub fn dropout_forward_train(x: &Tensor, rate: f64, rng: &mut Rng) -> Result<(Tensor, Tensor)> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::config(format!(
            "dropout: rate must be in [0,1), got {rate}"
        )));
    }
    let mut mask = Tensor::zeros(x.shape());
    let keep_scale = 1.0 / (1.0 - rate);
    for m in mask.data_mut() {
        *m = if rng.uniform() < rate { 0.0 } else { keep_scale };
    }
    let mut y = x.clone();
    for (v, m) in y.data_mut().iter_mut().zip(mask.data().iter()) {
        *v *= m;
    }
    Ok((y, mask))
}

/// Inference-mode forward is the identity.
pub fn dropout_forward_eval(x: &Tensor, rate: f64) -> Result<Tensor> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::config(format!(
            "dropout: rate must be in [0,1), got {rate}"
        )));
    }
    Ok(x.clone())
}

pub fn dropout_backward(mask: &Tensor, dy: &Tensor) -> Tensor {
    debug_assert_eq!(mask.shape(), dy.shape());
    let mut dx = dy.clone();
    for (g, m) in dx.data_mut().iter_mut().zip(mask.data().iter()) {
        *g *= m;
    }
    dx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_zero_is_identity_in_both_modes() {
        let x = Tensor::filled(&[4, 4], 1.5);
        let mut rng = Rng::from_seed(1);
        let (y, mask) = dropout_forward_train(&x, 0.0, &mut rng).unwrap();
        assert_eq!(y.data(), x.data());
        assert!(mask.data().iter().all(|&m| m == 1.0));
        let ye = dropout_forward_eval(&x, 0.0).unwrap();
        assert_eq!(ye.data(), x.data());
    }

    #[test]
    fn survivors_are_scaled() {
        let x = Tensor::filled(&[100, 10], 1.0);
        let mut rng = Rng::from_seed(2);
        let (y, _) = dropout_forward_train(&x, 0.5, &mut rng).unwrap();
        for &v in y.data() {
            assert!(v == 0.0 || (v - 2.0).abs() < 1e-15);
        }
        // With p = 0.5 and inverted scaling the expected mean is preserved.
        let mean: f64 = y.data().iter().sum::<f64>() / y.len() as f64;
        assert!((mean - 1.0).abs() < 0.1);
    }

    #[test]
    fn invalid_rate_is_a_config_error() {
        let x = Tensor::zeros(&[2]);
        let mut rng = Rng::from_seed(3);
        assert!(matches!(
            dropout_forward_train(&x, 1.0, &mut rng).unwrap_err(),
            Error::Config(_)
        ));
        assert!(dropout_forward_eval(&x, -0.1).is_err());
    }
}
