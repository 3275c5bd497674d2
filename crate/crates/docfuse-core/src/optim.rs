//! SGD with momentum.
//!
//! Update convention: `v <- momentum * v - lr * g; w <- w + v`. Velocities
//! are keyed by slot position, so the caller must present parameters in a
//! stable order (models do: graph order).

use alloc::string::String;
use alloc::vec::Vec;

use crate::tensor::Tensor;

/// A mutable view of one parameter tensor and its gradient.
pub struct ParamSlot<'a> {
    pub name: String,
    pub param: &'a mut Tensor,
    pub grad: &'a mut Tensor,
}

#[derive(Debug, Clone)]
pub struct SgdMomentum {
    pub learning_rate: f64,
    pub momentum: f64,
    velocity: Vec<Tensor>,
}

impl SgdMomentum {
    pub fn new(learning_rate: f64, momentum: f64) -> Self {
        SgdMomentum {
            learning_rate,
            momentum,
            velocity: Vec::new(),
        }
    }

    /// Applies one update to every slot; allocates zero velocities lazily.
    pub fn step(&mut self, slots: &mut [ParamSlot<'_>]) {
        for (k, slot) in slots.iter_mut().enumerate() {
            if self.velocity.len() == k {
                self.velocity.push(Tensor::zeros(slot.param.shape()));
            }
            debug_assert_eq!(self.velocity[k].shape(), slot.param.shape());
            let v = self.velocity[k].data_mut();
            let p = slot.param.data_mut();
            let g = slot.grad.data();
            for i in 0..p.len() {
                v[i] = self.momentum * v[i] - self.learning_rate * g[i];
                p[i] += v[i];
            }
        }
    }

    /// Zeroes every gradient buffer; call before each backward pass.
    pub fn zero_grads(slots: &mut [ParamSlot<'_>]) {
        for slot in slots.iter_mut() {
            slot.grad.fill(0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn slot<'a>(p: &'a mut Tensor, g: &'a mut Tensor) -> ParamSlot<'a> {
        ParamSlot {
            name: "w".to_string(),
            param: p,
            grad: g,
        }
    }

    #[test]
    fn single_step_matches_convention() {
        let mut p = Tensor::filled(&[1], 1.0);
        let mut g = Tensor::filled(&[1], 0.5);
        let mut opt = SgdMomentum::new(0.01, 0.9);
        opt.step(&mut [slot(&mut p, &mut g)]);
        assert!((opt.velocity[0].data()[0] + 0.005).abs() < 1e-15);
        assert!((p.data()[0] - 0.995).abs() < 1e-15);
    }

    #[test]
    fn zero_gradient_decays_velocity_geometrically() {
        let mut p = Tensor::filled(&[1], 0.0);
        let mut g = Tensor::filled(&[1], 1.0);
        let mut opt = SgdMomentum::new(0.1, 0.5);
        opt.step(&mut [slot(&mut p, &mut g)]);
        let v0 = opt.velocity[0].data()[0];
        g.fill(0.0);
        opt.step(&mut [slot(&mut p, &mut g)]);
        opt.step(&mut [slot(&mut p, &mut g)]);
        assert!((opt.velocity[0].data()[0] - v0 * 0.25).abs() < 1e-15);
    }

    #[test]
    fn two_steps_match_hand_recurrence() {
        // v1 = -lr*g; w1 = w0 + v1; v2 = m*v1 - lr*g; w2 = w1 + v2
        let (lr, m, g0, w0) = (0.2, 0.9, 0.3, 1.5);
        let mut p = Tensor::filled(&[1], w0);
        let mut g = Tensor::filled(&[1], g0);
        let mut opt = SgdMomentum::new(lr, m);
        opt.step(&mut [slot(&mut p, &mut g)]);
        g.fill(g0);
        opt.step(&mut [slot(&mut p, &mut g)]);
        let v1 = -lr * g0;
        let w1 = w0 + v1;
        let v2 = m * v1 - lr * g0;
        let w2 = w1 + v2;
        assert!((p.data()[0] - w2).abs() < 1e-15);
    }
}
