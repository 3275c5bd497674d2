//! Max pooling over the time axis.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

pub fn maxpool1d_out_len(t: usize, window: usize, stride: usize) -> Result<usize> {
    if window == 0 || stride == 0 {
        return Err(Error::config(format!(
            "maxpool1d: window and stride must be >= 1, got {window}/{stride}"
        )));
    }
    if t < window {
        return Err(Error::shape(format!(
            "maxpool1d: input length {t} shorter than window {window}"
        )));
    }
    Ok((t - window) / stride + 1)
}

/// `x: [B,C,T] -> ([B,C,T'], argmax)`. Ties pick the earliest index so the
/// backward pass is deterministic.
pub fn maxpool1d_forward(x: &Tensor, window: usize, stride: usize) -> Result<(Tensor, Vec<u32>)> {
    if x.rank() != 3 {
        return Err(Error::shape(format!(
            "maxpool1d: want x [B,C,T], got {:?}",
            x.shape()
        )));
    }
    let (bs, c, t) = (x.dim(0), x.dim(1), x.dim(2));
    let t_out = maxpool1d_out_len(t, window, stride)?;
    let mut y = Tensor::zeros(&[bs, c, t_out]);
    let mut argmax = Vec::with_capacity(bs * c * t_out);
    let xd = x.data();
    let yd = y.data_mut();
    for row in 0..bs * c {
        let xrow = &xd[row * t..(row + 1) * t];
        let yrow = &mut yd[row * t_out..(row + 1) * t_out];
        for (to, yv) in yrow.iter_mut().enumerate() {
            let start = to * stride;
            let mut best = xrow[start];
            let mut best_i = start;
            for (off, &v) in xrow[start..start + window].iter().enumerate().skip(1) {
                if v > best {
                    best = v;
                    best_i = start + off;
                }
            }
            *yv = best;
            argmax.push(best_i as u32);
        }
    }
    Ok((y, argmax))
}

/// Routes each output gradient back to its argmax position.
pub fn maxpool1d_backward(in_shape: &[usize], argmax: &[u32], dy: &Tensor) -> Tensor {
    let t = in_shape[2];
    let t_out = dy.dim(2);
    let mut dx = Tensor::zeros(in_shape);
    let dxd = dx.data_mut();
    let dyd = dy.data();
    for row in 0..in_shape[0] * in_shape[1] {
        for to in 0..t_out {
            let src = argmax[row * t_out + to] as usize;
            dxd[row * t + src] += dyd[row * t_out + to];
        }
    }
    dx
}

/// `out[b,c] = max_t x[b,c,t]` with argmax cache.
pub fn max_over_time_forward(x: &Tensor) -> Result<(Tensor, Vec<u32>)> {
    if x.rank() != 3 || x.dim(2) == 0 {
        return Err(Error::shape(format!(
            "max_over_time: want x [B,C,T] with T >= 1, got {:?}",
            x.shape()
        )));
    }
    let (bs, c, t) = (x.dim(0), x.dim(1), x.dim(2));
    let mut y = Tensor::zeros(&[bs, c]);
    let mut argmax = Vec::with_capacity(bs * c);
    let xd = x.data();
    let yd = y.data_mut();
    for row in 0..bs * c {
        let xrow = &xd[row * t..(row + 1) * t];
        let mut best = xrow[0];
        let mut best_i = 0usize;
        for (i, &v) in xrow.iter().enumerate().skip(1) {
            if v > best {
                best = v;
                best_i = i;
            }
        }
        yd[row] = best;
        argmax.push(best_i as u32);
    }
    Ok((y, argmax))
}

pub fn max_over_time_backward(in_shape: &[usize], argmax: &[u32], dy: &Tensor) -> Tensor {
    let t = in_shape[2];
    let mut dx = Tensor::zeros(in_shape);
    let dxd = dx.data_mut();
    for (row, dyv) in dy.data().iter().enumerate() {
        dxd[row * t + argmax[row] as usize] += dyv;
    }
    dx
}
