//! Global average pooling over spatial dimensions.

use alloc::format;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// `out[b,c] = mean_{h,w} x[b,c,h,w]`.
pub fn global_avg_pool2d_forward(x: &Tensor) -> Result<Tensor> {
    if x.rank() != 4 || x.dim(2) == 0 || x.dim(3) == 0 {
        return Err(Error::shape(format!(
            "global_avg_pool2d: want x [B,C,H,W] with H,W >= 1, got {:?}",
            x.shape()
        )));
    }
    let (bs, c, h, w) = (x.dim(0), x.dim(1), x.dim(2), x.dim(3));
    let hw = h * w;
    let inv = 1.0 / hw as f64;
    let mut y = Tensor::zeros(&[bs, c]);
    let xd = x.data();
    let yd = y.data_mut();
    for (row, yv) in yd.iter_mut().enumerate() {
        let mut acc = 0.0;
        for v in &xd[row * hw..(row + 1) * hw] {
            acc += v;
        }
        *yv = acc * inv;
    }
    Ok(y)
}

/// Spreads each output gradient uniformly over its spatial positions.
pub fn global_avg_pool2d_backward(in_shape: &[usize], dy: &Tensor) -> Tensor {
    let hw = in_shape[2] * in_shape[3];
    let inv = 1.0 / hw as f64;
    let mut dx = Tensor::zeros(in_shape);
    let dxd = dx.data_mut();
    for (row, dyv) in dy.data().iter().enumerate() {
        let g = dyv * inv;
        for v in &mut dxd[row * hw..(row + 1) * hw] {
            *v += g;
        }
    }
    dx
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constant_map_pools_to_constant() {
        let x = Tensor::filled(&[2, 3, 4, 5], 3.0);
        let y = global_avg_pool2d_forward(&x).unwrap();
        assert!(y.data().iter().all(|&v| (v - 3.0).abs() < 1e-15));
    }

    #[test]
    fn small_map_mean() {
        let x = Tensor::from_vec(&[1, 1, 2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = global_avg_pool2d_forward(&x).unwrap();
        assert_eq!(y.data(), &[2.5]);
    }

    #[test]
    fn backward_distributes_uniformly() {
        let dy = Tensor::from_vec(&[1, 1], vec![8.0]).unwrap();
        let dx = global_avg_pool2d_backward(&[1, 1, 2, 2], &dy);
        assert_eq!(dx.data(), &[2.0, 2.0, 2.0, 2.0]);
    }
}
