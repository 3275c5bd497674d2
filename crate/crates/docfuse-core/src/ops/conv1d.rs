//! 1-D convolution (cross-correlation) over the time axis.

use alloc::format;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Padding {
    /// Zero padding so the output length equals the input length.
    Same,
    /// No padding; output length `T - K + 1`.
    Valid,
}

/// Output length for a kernel of width `k` over `t` steps.
pub fn conv1d_out_len(t: usize, k: usize, padding: Padding) -> Result<usize> {
    match padding {
        Padding::Same => {
            if t == 0 {
                Err(Error::shape("conv1d: empty time axis"))
            } else {
                Ok(t)
            }
        }
        Padding::Valid => {
            if t < k || t == 0 {
                Err(Error::shape(format!(
                    "conv1d: kernel {k} does not fit valid input length {t}"
                )))
            } else {
                Ok(t - k + 1)
            }
        }
    }
}

fn pad_left(k: usize, padding: Padding) -> usize {
    match padding {
        Padding::Same => (k - 1) / 2,
        Padding::Valid => 0,
    }
}

/// `out[b,o,t] = sum_{c,k} w[o,c,k] * x_pad[b,c,t+k] + b[o]`
/// for `x: [B,C,T]`, `w: [O,C,K]`, `b: [O]`.
pub fn conv1d_forward(x: &Tensor, w: &Tensor, b: &Tensor, padding: Padding) -> Result<Tensor> {
    if x.rank() != 3 || w.rank() != 3 || b.rank() != 1 {
        return Err(Error::shape(format!(
            "conv1d: want x [B,C,T], w [O,C,K], b [O]; got x {:?}, w {:?}, b {:?}",
            x.shape(),
            w.shape(),
            b.shape()
        )));
    }
    let (bs, cin, t) = (x.dim(0), x.dim(1), x.dim(2));
    let (cout, wc, k) = (w.dim(0), w.dim(1), w.dim(2));
    if wc != cin || b.dim(0) != cout {
        return Err(Error::shape(format!(
            "conv1d: x {:?} does not conform with w {:?}, b {:?}",
            x.shape(),
            w.shape(),
            b.shape()
        )));
    }
    let t_out = conv1d_out_len(t, k, padding)?;
    let pl = pad_left(k, padding);
    let mut y = Tensor::zeros(&[bs, cout, t_out]);
    let xd = x.data();
    let wd = w.data();
    let bd = b.data();
    let yd = y.data_mut();
    for bi in 0..bs {
        for o in 0..cout {
            let yrow = &mut yd[(bi * cout + o) * t_out..(bi * cout + o + 1) * t_out];
            for yv in yrow.iter_mut() {
                *yv = bd[o];
            }
            for c in 0..cin {
                let xrow = &xd[(bi * cin + c) * t..(bi * cin + c + 1) * t];
                for ki in 0..k {
                    let wv = wd[(o * cin + c) * k + ki];
                    if wv == 0.0 {
                        continue;
                    }
                    // output positions whose input index t_out + ki - pl is in range
                    let lo = pl.saturating_sub(ki);
                    let hi = (t + pl - ki).min(t_out);
                    for to in lo..hi {
                        yrow[to] += wv * xrow[to + ki - pl];
                    }
                }
            }
        }
    }
    Ok(y)
}

/// Accumulates `dw`, `db` and returns `dx`.
pub fn conv1d_backward(
    x: &Tensor,
    w: &Tensor,
    dy: &Tensor,
    padding: Padding,
    dw: &mut Tensor,
    db: &mut Tensor,
) -> Tensor {
    let (bs, cin, t) = (x.dim(0), x.dim(1), x.dim(2));
    let (cout, _, k) = (w.dim(0), w.dim(1), w.dim(2));
    let t_out = dy.dim(2);
    let pl = pad_left(k, padding);
    let mut dx = Tensor::zeros(&[bs, cin, t]);
    let xd = x.data();
    let wd = w.data();
    let dyd = dy.data();
    let dxd = dx.data_mut();
    let dwd = dw.data_mut();
    let dbd = db.data_mut();
    for bi in 0..bs {
        for o in 0..cout {
            let dyrow = &dyd[(bi * cout + o) * t_out..(bi * cout + o + 1) * t_out];
            let mut acc = 0.0;
            for v in dyrow {
                acc += v;
            }
            dbd[o] += acc;
            for c in 0..cin {
                let xrow = &xd[(bi * cin + c) * t..(bi * cin + c + 1) * t];
                let dxrow = &mut dxd[(bi * cin + c) * t..(bi * cin + c + 1) * t];
                for ki in 0..k {
                    let lo = pl.saturating_sub(ki);
                    let hi = (t + pl - ki).min(t_out);
                    let wv = wd[(o * cin + c) * k + ki];
                    let mut wacc = 0.0;
                    for to in lo..hi {
                        let g = dyrow[to];
                        dxrow[to + ki - pl] += wv * g;
                        wacc += g * xrow[to + ki - pl];
                    }
                    dwd[(o * cin + c) * k + ki] += wacc;
                }
            }
        }
    }
    dx
}
