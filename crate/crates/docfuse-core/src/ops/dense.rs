//! Fully connected layer.

use alloc::format;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// `y[b,o] = sum_i x[b,i] * w[i,o] + b[o]` for `x: [B,I]`, `w: [I,O]`, `b: [O]`.
pub fn dense_forward(x: &Tensor, w: &Tensor, b: &Tensor) -> Result<Tensor> {
    if x.rank() != 2 || w.rank() != 2 || b.rank() != 1 {
        return Err(Error::shape(format!(
            "dense: want x [B,I], w [I,O], b [O]; got x {:?}, w {:?}, b {:?}",
            x.shape(),
            w.shape(),
            b.shape()
        )));
    }
    let (bs, input) = (x.dim(0), x.dim(1));
    let (wi, out) = (w.dim(0), w.dim(1));
    if input != wi || b.dim(0) != out {
        return Err(Error::shape(format!(
            "dense: x {:?} does not conform with w {:?}, b {:?}",
            x.shape(),
            w.shape(),
            b.shape()
        )));
    }
    let mut y = Tensor::zeros(&[bs, out]);
    let xd = x.data();
    let wd = w.data();
    let bd = b.data();
    let yd = y.data_mut();
    for bi in 0..bs {
        let yrow = &mut yd[bi * out..(bi + 1) * out];
        yrow.copy_from_slice(bd);
        for i in 0..input {
            let xv = xd[bi * input + i];
            if xv == 0.0 {
                continue;
            }
            let wrow = &wd[i * out..(i + 1) * out];
            for (yv, wv) in yrow.iter_mut().zip(wrow.iter()) {
                *yv += xv * wv;
            }
        }
    }
    Ok(y)
}

/// Accumulates `dw`, `db` and returns `dx` for the forward above.
pub fn dense_backward(x: &Tensor, w: &Tensor, dy: &Tensor, dw: &mut Tensor, db: &mut Tensor) -> Tensor {
    let (bs, input) = (x.dim(0), x.dim(1));
    let out = w.dim(1);
    debug_assert_eq!(dy.shape(), &[bs, out]);
    let mut dx = Tensor::zeros(&[bs, input]);
    let xd = x.data();
    let wd = w.data();
    let dyd = dy.data();
    let dxd = dx.data_mut();
    let dwd = dw.data_mut();
    let dbd = db.data_mut();
    for bi in 0..bs {
        let dyrow = &dyd[bi * out..(bi + 1) * out];
        for (dbv, dyv) in dbd.iter_mut().zip(dyrow.iter()) {
            *dbv += dyv;
        }
        for i in 0..input {
            let wrow = &wd[i * out..(i + 1) * out];
            let mut acc = 0.0;
            for (wv, dyv) in wrow.iter().zip(dyrow.iter()) {
                acc += wv * dyv;
            }
            dxd[bi * input + i] = acc;
            let xv = xd[bi * input + i];
            if xv != 0.0 {
                let dwrow = &mut dwd[i * out..(i + 1) * out];
                for (dwv, dyv) in dwrow.iter_mut().zip(dyrow.iter()) {
                    *dwv += xv * dyv;
                }
            }
        }
    }
    dx
}
