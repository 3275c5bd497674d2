//! Central finite-difference gradient checking utilities shared by the unit
//! and acceptance test suites. Everything here runs in 64-bit precision so
//! a step of `h = 1e-5` keeps the truncation error well under the 1e-5
//! relative tolerance the checks assert.

use alloc::vec::Vec;

use crate::math;
use crate::rng::Rng;
use crate::tensor::Tensor;

/// Central finite differences of a scalar function w.r.t. every entry of `x`.
pub fn finite_diff<F: FnMut(&Tensor) -> f64>(mut f: F, x: &Tensor, h: f64) -> Tensor {
    let mut grad = Tensor::zeros(x.shape());
    let mut probe = x.clone();
    for i in 0..x.len() {
        let orig = probe.data()[i];
        probe.data_mut()[i] = orig + h;
        let fp = f(&probe);
        probe.data_mut()[i] = orig - h;
        let fm = f(&probe);
        probe.data_mut()[i] = orig;
        grad.data_mut()[i] = (fp - fm) / (2.0 * h);
    }
    grad
}

/// Relative error with an absolute floor at the central-difference noise
/// level (`|f+ - f-|` of order machine epsilon divided by `2h`). Without
/// the floor, parameters with no influence on the loss - a convolution
/// bias immediately normalized away by batch norm, say - compare an
/// analytic zero against pure roundoff and report spurious mismatches.
pub fn fd_rel_err(analytic: f64, numeric: f64) -> f64 {
    if math::abs(analytic - numeric) < 1e-9 {
        0.0
    } else {
        math::rel_err(analytic, numeric)
    }
}

/// Max relative error between analytic and numeric gradients.
pub fn max_rel_err(analytic: &Tensor, numeric: &Tensor) -> f64 {
    assert_eq!(analytic.shape(), numeric.shape());
    analytic
        .data()
        .iter()
        .zip(numeric.data().iter())
        .map(|(&a, &n)| fd_rel_err(a, n))
        .fold(0.0, f64::max)
}

/// Random tensor with entries in roughly `[-2, 2]`, nudged away from zero so
/// kinked functions (ReLU, max pooling) differentiate cleanly under FD.
pub fn random_input(shape: &[usize], rng: &mut Rng) -> Tensor {
    let mut t = Tensor::zeros(shape);
    for v in t.data_mut() {
        let mut x = 2.0 * rng.normal();
        if math::abs(x) < 0.05 {
            x += if x >= 0.0 { 0.1 } else { -0.1 };
        }
        *v = x;
    }
    t
}

/// Fixed random projection so a tensor-valued op reduces to a scalar loss:
/// `loss = sum_i r_i * y_i`. The backward seed for that loss is just `r`.
pub fn projection(shape: &[usize], rng: &mut Rng) -> Tensor {
    let mut t = Tensor::zeros(shape);
    for v in t.data_mut() {
        *v = rng.normal();
    }
    t
}

pub fn project(y: &Tensor, r: &Tensor) -> f64 {
    debug_assert_eq!(y.shape(), r.shape());
    y.data()
        .iter()
        .zip(r.data().iter())
        .map(|(a, b)| a * b)
        .sum()
}

/// Convenience: checks `analytic` against FD of `f` at `x` and returns the
/// max relative error observed.
pub fn check_grad<F: FnMut(&Tensor) -> f64>(f: F, x: &Tensor, analytic: &Tensor, h: f64) -> f64 {
    let numeric = finite_diff(f, x, h);
    max_rel_err(analytic, &numeric)
}

/// Flattens several tensors' entries into one vector (test plumbing).
pub fn flatten_all(tensors: &[&Tensor]) -> Vec<f64> {
    let mut out = Vec::new();
    for t in tensors {
        out.extend_from_slice(t.data());
    }
    out
}
