//! Batch normalization over the channel axis (axis 1).
//!
//! Accepts `[B,F]`, `[B,C,T]` and `[B,C,H,W]` inputs; statistics are taken
//! per channel over every other axis with biased variance. Training mode
//! normalizes by batch statistics; inference mode by running statistics
//! updated as `running <- momentum * running + (1 - momentum) * batch`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::tensor::Tensor;

/// Per-channel batch statistics produced by a training-mode forward.
#[derive(Debug, Clone)]
pub struct BatchStats {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

/// Saved intermediates for the backward pass.
#[derive(Debug, Clone)]
pub struct BatchNormCache {
    pub xhat: Tensor,
    pub inv_std: Vec<f64>,
}

fn channel_geometry(x: &Tensor) -> Result<(usize, usize, usize)> {
    match x.rank() {
        2 => Ok((x.dim(0), x.dim(1), 1)),
        3 => Ok((x.dim(0), x.dim(1), x.dim(2))),
        4 => Ok((x.dim(0), x.dim(1), x.dim(2) * x.dim(3))),
        _ => Err(Error::shape(format!(
            "batchnorm: want rank 2..4 input with channels on axis 1, got {:?}",
            x.shape()
        ))),
    }
}

fn check_params(c: usize, gamma: &Tensor, beta: &Tensor, eps: f64) -> Result<()> {
    if eps <= 0.0 {
        return Err(Error::config(format!(
            "batchnorm: epsilon must be > 0, got {eps}"
        )));
    }
    if gamma.shape() != [c] || beta.shape() != [c] {
        return Err(Error::shape(format!(
            "batchnorm: gamma {:?} / beta {:?} do not match {c} channels",
            gamma.shape(),
            beta.shape()
        )));
    }
    Ok(())
}

/// Training-mode forward using batch statistics.
pub fn batchnorm_forward_train(
    x: &Tensor,
    gamma: &Tensor,
    beta: &Tensor,
    eps: f64,
) -> Result<(Tensor, BatchNormCache, BatchStats)> {
    let (b, c, m) = channel_geometry(x)?;
    check_params(c, gamma, beta, eps)?;
    let n = (b * m) as f64;
    let xd = x.data();
    let mut mean = vec![0.0; c];
    let mut var = vec![0.0; c];
    for bi in 0..b {
        for ci in 0..c {
            let base = (bi * c + ci) * m;
            let mut acc = 0.0;
            for v in &xd[base..base + m] {
                acc += v;
            }
            mean[ci] += acc;
        }
    }
    for v in &mut mean {
        *v /= n;
    }
    for bi in 0..b {
        for ci in 0..c {
            let base = (bi * c + ci) * m;
            let mu = mean[ci];
            let mut acc = 0.0;
            for v in &xd[base..base + m] {
                let d = v - mu;
                acc += d * d;
            }
            var[ci] += acc;
        }
    }
    for v in &mut var {
        *v /= n;
    }
    let inv_std: Vec<f64> = var.iter().map(|&v| 1.0 / math::sqrt(v + eps)).collect();
    let mut xhat = Tensor::zeros(x.shape());
    let mut y = Tensor::zeros(x.shape());
    {
        let xh = xhat.data_mut();
        let yd = y.data_mut();
        for bi in 0..b {
            for ci in 0..c {
                let base = (bi * c + ci) * m;
                let (mu, istd, g, be) = (mean[ci], inv_std[ci], gamma.data()[ci], beta.data()[ci]);
                for i in base..base + m {
                    let h = (xd[i] - mu) * istd;
                    xh[i] = h;
                    yd[i] = g * h + be;
                }
            }
        }
    }
    Ok((y, BatchNormCache { xhat, inv_std }, BatchStats { mean, var }))
}

/// Inference-mode forward using running statistics.
pub fn batchnorm_forward_eval(
    x: &Tensor,
    gamma: &Tensor,
    beta: &Tensor,
    running_mean: &Tensor,
    running_var: &Tensor,
    eps: f64,
) -> Result<Tensor> {
    let (b, c, m) = channel_geometry(x)?;
    check_params(c, gamma, beta, eps)?;
    let mut y = Tensor::zeros(x.shape());
    let xd = x.data();
    let yd = y.data_mut();
    for bi in 0..b {
        for ci in 0..c {
            let base = (bi * c + ci) * m;
            let mu = running_mean.data()[ci];
            let istd = 1.0 / math::sqrt(running_var.data()[ci] + eps);
            let (g, be) = (gamma.data()[ci], beta.data()[ci]);
            for i in base..base + m {
                yd[i] = g * (xd[i] - mu) * istd + be;
            }
        }
    }
    Ok(y)
}

/// Accumulates `dgamma`, `dbeta`; returns `dx`.
pub fn batchnorm_backward(
    cache: &BatchNormCache,
    gamma: &Tensor,
    dy: &Tensor,
    dgamma: &mut Tensor,
    dbeta: &mut Tensor,
) -> Tensor {
    let (b, c, m) = channel_geometry(&cache.xhat).expect("cache shape");
    let n = (b * m) as f64;
    let xh = cache.xhat.data();
    let dyd = dy.data();
    let mut sum_dy = vec![0.0; c];
    let mut sum_dy_xhat = vec![0.0; c];
    for bi in 0..b {
        for ci in 0..c {
            let base = (bi * c + ci) * m;
            let mut a0 = 0.0;
            let mut a1 = 0.0;
            for i in base..base + m {
                a0 += dyd[i];
                a1 += dyd[i] * xh[i];
            }
            sum_dy[ci] += a0;
            sum_dy_xhat[ci] += a1;
        }
    }
    for ci in 0..c {
        dgamma.data_mut()[ci] += sum_dy_xhat[ci];
        dbeta.data_mut()[ci] += sum_dy[ci];
    }
    let mut dx = Tensor::zeros(cache.xhat.shape());
    let dxd = dx.data_mut();
    for bi in 0..b {
        for ci in 0..c {
            let base = (bi * c + ci) * m;
            let g = gamma.data()[ci];
            let istd = cache.inv_std[ci];
            let s0 = sum_dy[ci];
            let s1 = sum_dy_xhat[ci];
            for i in base..base + m {
                dxd[i] = g * istd / n * (n * dyd[i] - s0 - xh[i] * s1);
            }
        }
    }
    dx
}
