//! ReLU.

use crate::tensor::Tensor;

pub fn relu_forward(x: &Tensor) -> Tensor {
    let mut y = x.clone();
    for v in y.data_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    y
}

/// `dx = dy * [x > 0]`; the derivative at exactly 0 is taken as 0.
pub fn relu_backward(x: &Tensor, dy: &Tensor) -> Tensor {
    debug_assert_eq!(x.shape(), dy.shape());
    let mut dx = dy.clone();
    for (g, &xv) in dx.data_mut().iter_mut().zip(x.data().iter()) {
        if xv <= 0.0 {
            *g = 0.0;
        }
    }
    dx
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn clamps_negatives() {
        let x = Tensor::from_vec(&[1, 2], vec![-1.0, 2.0]).unwrap();
        assert_eq!(relu_forward(&x).data(), &[0.0, 2.0]);
    }

    #[test]
    fn backward_masks_nonpositive_inputs() {
        let x = Tensor::from_vec(&[1, 3], vec![-1.0, 0.0, 2.0]).unwrap();
        let dy = Tensor::from_vec(&[1, 3], vec![5.0, 5.0, 5.0]).unwrap();
        assert_eq!(relu_backward(&x, &dy).data(), &[0.0, 0.0, 5.0]);
    }
}
