//! Feature-vector fusion: concatenation (default) or elementwise sum.

use alloc::format;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionKind {
    /// Text features first, then image features.
    Concat,
    Sum,
}

/// Fuses `text: [B,Dt]` and `image: [B,Di]`.
/// Concat yields `[B,Dt+Di]`; sum requires `Dt == Di`.
pub fn fuse_forward(text: &Tensor, image: &Tensor, kind: FusionKind) -> Result<Tensor> {
    if text.rank() != 2 || image.rank() != 2 || text.dim(0) != image.dim(0) {
        return Err(Error::shape(format!(
            "fuse: want matching [B,D] inputs, got text {:?}, image {:?}",
            text.shape(),
            image.shape()
        )));
    }
    let (b, dt, di) = (text.dim(0), text.dim(1), image.dim(1));
    match kind {
        FusionKind::Concat => {
            let mut y = Tensor::zeros(&[b, dt + di]);
            let yd = y.data_mut();
            for bi in 0..b {
                yd[bi * (dt + di)..bi * (dt + di) + dt]
                    .copy_from_slice(&text.data()[bi * dt..(bi + 1) * dt]);
                yd[bi * (dt + di) + dt..(bi + 1) * (dt + di)]
                    .copy_from_slice(&image.data()[bi * di..(bi + 1) * di]);
            }
            Ok(y)
        }
        FusionKind::Sum => {
            if dt != di {
                return Err(Error::shape(format!(
                    "fuse: sum needs equal dims, got text {:?}, image {:?}",
                    text.shape(),
                    image.shape()
                )));
            }
            let mut y = text.clone();
            y.add_assign(image);
            Ok(y)
        }
    }
}

/// Splits the fused gradient back into `(d_text, d_image)`.
pub fn fuse_backward(dy: &Tensor, dt: usize, di: usize, kind: FusionKind) -> (Tensor, Tensor) {
    let b = dy.dim(0);
    match kind {
        FusionKind::Concat => {
            let mut gt = Tensor::zeros(&[b, dt]);
            let mut gi = Tensor::zeros(&[b, di]);
            for bi in 0..b {
                gt.data_mut()[bi * dt..(bi + 1) * dt]
                    .copy_from_slice(&dy.data()[bi * (dt + di)..bi * (dt + di) + dt]);
                gi.data_mut()[bi * di..(bi + 1) * di]
                    .copy_from_slice(&dy.data()[bi * (dt + di) + dt..(bi + 1) * (dt + di)]);
            }
            (gt, gi)
        }
        FusionKind::Sum => (dy.clone(), dy.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn concat_keeps_text_first() {
        let t = Tensor::from_vec(&[1, 3], vec![1.0, 0.0, 0.0]).unwrap();
        let i = Tensor::from_vec(&[1, 3], vec![0.0, 1.0, 0.0]).unwrap();
        let y = fuse_forward(&t, &i, FusionKind::Concat).unwrap();
        assert_eq!(y.shape(), &[1, 6]);
        assert_eq!(y.data(), &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn sum_with_zero_is_identity() {
        let t = Tensor::from_vec(&[1, 3], vec![0.5, -1.0, 2.0]).unwrap();
        let z = Tensor::zeros(&[1, 3]);
        let y = fuse_forward(&t, &z, FusionKind::Sum).unwrap();
        assert_eq!(y.data(), t.data());
    }

    #[test]
    fn concat_backward_splits_exactly() {
        let dy = Tensor::from_vec(&[1, 4], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let (gt, gi) = fuse_backward(&dy, 2, 2, FusionKind::Concat);
        assert_eq!(gt.data(), &[1.0, 2.0]);
        assert_eq!(gi.data(), &[3.0, 4.0]);
    }

    #[test]
    fn sum_dim_mismatch_is_rejected() {
        let t = Tensor::zeros(&[1, 3]);
        let i = Tensor::zeros(&[1, 4]);
        assert!(fuse_forward(&t, &i, FusionKind::Sum).is_err());
        assert!(fuse_forward(&t, &i, FusionKind::Concat).is_ok());
    }
}
