//! 2-D convolutions: full, depthwise and pointwise (1x1).
//!
//! All three use "same" zero padding. For stride `s` the output extent is
//! `ceil(n / s)`; total padding `max((out - 1) * s + k - n, 0)` is split with
//! the smaller half at the top/left.

use alloc::format;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Output spatial extent for same padding.
pub fn conv2d_out_extent(n: usize, stride: usize) -> usize {
    n.div_ceil(stride)
}

fn pad_before(n: usize, k: usize, stride: usize) -> usize {
    let out = conv2d_out_extent(n, stride);
    let total = ((out - 1) * stride + k).saturating_sub(n);
    total / 2
}

fn check_stride(stride: usize) -> Result<()> {
    if stride == 1 || stride == 2 {
        Ok(())
    } else {
        Err(Error::config(format!(
            "conv2d: stride must be 1 or 2, got {stride}"
        )))
    }
}

/// Full convolution: `x: [B,C,H,W]`, `w: [O,C,Kh,Kw]`, `b: [O]`.
pub fn conv2d_forward(x: &Tensor, w: &Tensor, b: &Tensor, stride: usize) -> Result<Tensor> {
    check_stride(stride)?;
    if x.rank() != 4 || w.rank() != 4 || b.rank() != 1 {
        return Err(Error::shape(format!(
            "conv2d: want x [B,C,H,W], w [O,C,Kh,Kw], b [O]; got x {:?}, w {:?}, b {:?}",
            x.shape(),
            w.shape(),
            b.shape()
        )));
    }
    let (bs, cin, h, wd_) = (x.dim(0), x.dim(1), x.dim(2), x.dim(3));
    let (cout, wc, kh, kw) = (w.dim(0), w.dim(1), w.dim(2), w.dim(3));
    if wc != cin || b.dim(0) != cout {
        return Err(Error::shape(format!(
            "conv2d: x {:?} does not conform with w {:?}, b {:?}",
            x.shape(),
            w.shape(),
            b.shape()
        )));
    }
    let oh = conv2d_out_extent(h, stride);
    let ow = conv2d_out_extent(wd_, stride);
    let pt = pad_before(h, kh, stride);
    let pl = pad_before(wd_, kw, stride);
    let mut y = Tensor::zeros(&[bs, cout, oh, ow]);
    let xd = x.data();
    let wdat = w.data();
    let bd = b.data();
    let yd = y.data_mut();
    for bi in 0..bs {
        for o in 0..cout {
            let ybase = (bi * cout + o) * oh * ow;
            for v in &mut yd[ybase..ybase + oh * ow] {
                *v = bd[o];
            }
            for c in 0..cin {
                let xbase = (bi * cin + c) * h * wd_;
                for khi in 0..kh {
                    for kwi in 0..kw {
                        let wv = wdat[((o * cin + c) * kh + khi) * kw + kwi];
                        if wv == 0.0 {
                            continue;
                        }
                        accumulate_patch(
                            &mut yd[ybase..ybase + oh * ow],
                            &xd[xbase..xbase + h * wd_],
                            wv,
                            (h, wd_, oh, ow, stride, pt, pl, khi, kwi),
                        );
                    }
                }
            }
        }
    }
    Ok(y)
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn accumulate_patch(
    y: &mut [f64],
    x: &[f64],
    wv: f64,
    geo: (usize, usize, usize, usize, usize, usize, usize, usize, usize),
) {
    let (h, w, oh, ow, stride, pt, pl, khi, kwi) = geo;
    for ohi in 0..oh {
        let ih = (ohi * stride + khi) as isize - pt as isize;
        if ih < 0 || ih as usize >= h {
            continue;
        }
        let xrow = &x[ih as usize * w..(ih as usize + 1) * w];
        let yrow = &mut y[ohi * ow..(ohi + 1) * ow];
        for (owi, yv) in yrow.iter_mut().enumerate() {
            let iw = (owi * stride + kwi) as isize - pl as isize;
            if iw >= 0 && (iw as usize) < w {
                *yv += wv * xrow[iw as usize];
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn backward_patch(
    dy: &[f64],
    x: &[f64],
    dx: &mut [f64],
    wv: f64,
    dwv: &mut f64,
    geo: (usize, usize, usize, usize, usize, usize, usize, usize, usize),
) {
    let (h, w, oh, ow, stride, pt, pl, khi, kwi) = geo;
    for ohi in 0..oh {
        let ih = (ohi * stride + khi) as isize - pt as isize;
        if ih < 0 || ih as usize >= h {
            continue;
        }
        let xrow = &x[ih as usize * w..(ih as usize + 1) * w];
        let dxrow = &mut dx[ih as usize * w..(ih as usize + 1) * w];
        let dyrow = &dy[ohi * ow..(ohi + 1) * ow];
        for (owi, &g) in dyrow.iter().enumerate() {
            let iw = (owi * stride + kwi) as isize - pl as isize;
            if iw >= 0 && (iw as usize) < w {
                dxrow[iw as usize] += wv * g;
                *dwv += g * xrow[iw as usize];
            }
        }
    }
}

/// Accumulates `dw`, `db`; returns `dx`.
pub fn conv2d_backward(
    x: &Tensor,
    w: &Tensor,
    dy: &Tensor,
    stride: usize,
    dw: &mut Tensor,
    db: &mut Tensor,
) -> Tensor {
    let (bs, cin, h, wd_) = (x.dim(0), x.dim(1), x.dim(2), x.dim(3));
    let (cout, _, kh, kw) = (w.dim(0), w.dim(1), w.dim(2), w.dim(3));
    let (oh, ow) = (dy.dim(2), dy.dim(3));
    let pt = pad_before(h, kh, stride);
    let pl = pad_before(wd_, kw, stride);
    let mut dx = Tensor::zeros(x.shape());
    let xd = x.data();
    let wdat = w.data();
    let dyd = dy.data();
    let dxd = dx.data_mut();
    let dwd = dw.data_mut();
    let dbd = db.data_mut();
    for bi in 0..bs {
        for o in 0..cout {
            let dybase = (bi * cout + o) * oh * ow;
            let dyrow = &dyd[dybase..dybase + oh * ow];
            let mut acc = 0.0;
            for v in dyrow {
                acc += v;
            }
            dbd[o] += acc;
            for c in 0..cin {
                let xbase = (bi * cin + c) * h * wd_;
                for khi in 0..kh {
                    for kwi in 0..kw {
                        let widx = ((o * cin + c) * kh + khi) * kw + kwi;
                        let mut dwv = 0.0;
                        backward_patch(
                            dyrow,
                            &xd[xbase..xbase + h * wd_],
                            &mut dxd[xbase..xbase + h * wd_],
                            wdat[widx],
                            &mut dwv,
                            (h, wd_, oh, ow, stride, pt, pl, khi, kwi),
                        );
                        dwd[widx] += dwv;
                    }
                }
            }
        }
    }
    dx
}

/// Depthwise convolution: one `Kh x Kw` filter per channel, no channel
/// mixing. `x: [B,C,H,W]`, `w: [C,Kh,Kw]`, `b: [C]`.
pub fn depthwise_conv2d_forward(
    x: &Tensor,
    w: &Tensor,
    b: &Tensor,
    stride: usize,
) -> Result<Tensor> {
    check_stride(stride)?;
    if x.rank() != 4 || w.rank() != 3 || b.rank() != 1 {
        return Err(Error::shape(format!(
            "depthwise_conv2d: want x [B,C,H,W], w [C,Kh,Kw], b [C]; got x {:?}, w {:?}, b {:?}",
            x.shape(),
            w.shape(),
            b.shape()
        )));
    }
    let (bs, c, h, wd_) = (x.dim(0), x.dim(1), x.dim(2), x.dim(3));
    if w.dim(0) != c || b.dim(0) != c {
        return Err(Error::shape(format!(
            "depthwise_conv2d: x {:?} does not conform with w {:?}, b {:?}",
            x.shape(),
            w.shape(),
            b.shape()
        )));
    }
    let (kh, kw) = (w.dim(1), w.dim(2));
    let oh = conv2d_out_extent(h, stride);
    let ow = conv2d_out_extent(wd_, stride);
    let pt = pad_before(h, kh, stride);
    let pl = pad_before(wd_, kw, stride);
    let mut y = Tensor::zeros(&[bs, c, oh, ow]);
    let xd = x.data();
    let wdat = w.data();
    let bd = b.data();
    let yd = y.data_mut();
    for bi in 0..bs {
        for ci in 0..c {
            let xbase = (bi * c + ci) * h * wd_;
            let ybase = (bi * c + ci) * oh * ow;
            for v in &mut yd[ybase..ybase + oh * ow] {
                *v = bd[ci];
            }
            for khi in 0..kh {
                for kwi in 0..kw {
                    let wv = wdat[(ci * kh + khi) * kw + kwi];
                    if wv == 0.0 {
                        continue;
                    }
                    accumulate_patch(
                        &mut yd[ybase..ybase + oh * ow],
                        &xd[xbase..xbase + h * wd_],
                        wv,
                        (h, wd_, oh, ow, stride, pt, pl, khi, kwi),
                    );
                }
            }
        }
    }
    Ok(y)
}

pub fn depthwise_conv2d_backward(
    x: &Tensor,
    w: &Tensor,
    dy: &Tensor,
    stride: usize,
    dw: &mut Tensor,
    db: &mut Tensor,
) -> Tensor {
    let (bs, c, h, wd_) = (x.dim(0), x.dim(1), x.dim(2), x.dim(3));
    let (kh, kw) = (w.dim(1), w.dim(2));
    let (oh, ow) = (dy.dim(2), dy.dim(3));
    let pt = pad_before(h, kh, stride);
    let pl = pad_before(wd_, kw, stride);
    let mut dx = Tensor::zeros(x.shape());
    let xd = x.data();
    let wdat = w.data();
    let dyd = dy.data();
    let dxd = dx.data_mut();
    let dwd = dw.data_mut();
    let dbd = db.data_mut();
    for bi in 0..bs {
        for ci in 0..c {
            let xbase = (bi * c + ci) * h * wd_;
            let dybase = (bi * c + ci) * oh * ow;
            let dyrow = &dyd[dybase..dybase + oh * ow];
            let mut acc = 0.0;
            for v in dyrow {
                acc += v;
            }
            dbd[ci] += acc;
            for khi in 0..kh {
                for kwi in 0..kw {
                    let widx = (ci * kh + khi) * kw + kwi;
                    let mut dwv = 0.0;
                    backward_patch(
                        dyrow,
                        &xd[xbase..xbase + h * wd_],
                        &mut dxd[xbase..xbase + h * wd_],
                        wdat[widx],
                        &mut dwv,
                        (h, wd_, oh, ow, stride, pt, pl, khi, kwi),
                    );
                    dwd[widx] += dwv;
                }
            }
        }
    }
    dx
}

/// Pointwise (1x1) convolution mixing channels: `x: [B,C,H,W]`, `w: [O,C]`,
/// `b: [O]`. Always stride 1.
pub fn pointwise_conv2d_forward(x: &Tensor, w: &Tensor, b: &Tensor) -> Result<Tensor> {
    if x.rank() != 4 || w.rank() != 2 || b.rank() != 1 {
        return Err(Error::shape(format!(
            "pointwise_conv2d: want x [B,C,H,W], w [O,C], b [O]; got x {:?}, w {:?}, b {:?}",
            x.shape(),
            w.shape(),
            b.shape()
        )));
    }
    let (bs, cin, h, wd_) = (x.dim(0), x.dim(1), x.dim(2), x.dim(3));
    let (cout, wc) = (w.dim(0), w.dim(1));
    if wc != cin || b.dim(0) != cout {
        return Err(Error::shape(format!(
            "pointwise_conv2d: x {:?} does not conform with w {:?}, b {:?}",
            x.shape(),
            w.shape(),
            b.shape()
        )));
    }
    let hw = h * wd_;
    let mut y = Tensor::zeros(&[bs, cout, h, wd_]);
    let xd = x.data();
    let wdat = w.data();
    let bd = b.data();
    let yd = y.data_mut();
    for bi in 0..bs {
        for o in 0..cout {
            let ybase = (bi * cout + o) * hw;
            let yrow = &mut yd[ybase..ybase + hw];
            for v in yrow.iter_mut() {
                *v = bd[o];
            }
            for c in 0..cin {
                let wv = wdat[o * cin + c];
                if wv == 0.0 {
                    continue;
                }
                let xrow = &xd[(bi * cin + c) * hw..(bi * cin + c + 1) * hw];
                for (yv, xv) in yrow.iter_mut().zip(xrow.iter()) {
                    *yv += wv * xv;
                }
            }
        }
    }
    Ok(y)
}

pub fn pointwise_conv2d_backward(
    x: &Tensor,
    w: &Tensor,
    dy: &Tensor,
    dw: &mut Tensor,
    db: &mut Tensor,
) -> Tensor {
    let (bs, cin, h, wd_) = (x.dim(0), x.dim(1), x.dim(2), x.dim(3));
    let cout = w.dim(0);
    let hw = h * wd_;
    let mut dx = Tensor::zeros(x.shape());
    let xd = x.data();
    let wdat = w.data();
    let dyd = dy.data();
    let dxd = dx.data_mut();
    let dwd = dw.data_mut();
    let dbd = db.data_mut();
    for bi in 0..bs {
        for o in 0..cout {
            let dyrow = &dyd[(bi * cout + o) * hw..(bi * cout + o + 1) * hw];
            let mut acc = 0.0;
            for v in dyrow {
                acc += v;
            }
            dbd[o] += acc;
            for c in 0..cin {
                let wv = wdat[o * cin + c];
                let xrow = &xd[(bi * cin + c) * hw..(bi * cin + c + 1) * hw];
                let dxrow = &mut dxd[(bi * cin + c) * hw..(bi * cin + c + 1) * hw];
                let mut dwv = 0.0;
                for i in 0..hw {
                    let g = dyrow[i];
                    dxrow[i] += wv * g;
                    dwv += g * xrow[i];
                }
                dwd[o * cin + c] += dwv;
            }
        }
    }
    dx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn depthwise_unit_1x1_kernels_are_identity() {
        let mut rng = Rng::from_seed(2);
        let x = Tensor::from_vec(&[1, 2, 3, 3], (0..18).map(|_| rng.normal()).collect()).unwrap();
        let w = Tensor::filled(&[2, 1, 1], 1.0);
        let b = Tensor::zeros(&[2]);
        let y = depthwise_conv2d_forward(&x, &w, &b, 1).unwrap();
        assert_eq!(y.data(), x.data());
    }

    #[test]
    fn pointwise_sums_channels() {
        let x = Tensor::from_vec(
            &[1, 2, 2, 2],
            vec![1.0, 2.0, 3.0, 4.0, 10.0, 20.0, 30.0, 40.0],
        )
        .unwrap();
        let w = Tensor::from_vec(&[1, 2], vec![1.0, 1.0]).unwrap();
        let y = pointwise_conv2d_forward(&x, &w, &Tensor::zeros(&[1])).unwrap();
        assert_eq!(y.data(), &[11.0, 22.0, 33.0, 44.0]);
    }

    // Independent oracle: six nested loops over an explicitly padded view.
    fn naive_conv2d(x: &Tensor, w: &Tensor, b: &Tensor, stride: usize) -> Vec<f64> {
        let (bs, cin, h, wd_) = (x.dim(0), x.dim(1), x.dim(2), x.dim(3));
        let (cout, _, kh, kw) = (w.dim(0), w.dim(1), w.dim(2), w.dim(3));
        let oh = conv2d_out_extent(h, stride);
        let ow = conv2d_out_extent(wd_, stride);
        let pt = pad_before(h, kh, stride);
        let pl = pad_before(wd_, kw, stride);
        let mut y = vec![0.0; bs * cout * oh * ow];
        for bi in 0..bs {
            for o in 0..cout {
                for ohi in 0..oh {
                    for owi in 0..ow {
                        let mut acc = b.data()[o];
                        for c in 0..cin {
                            for khi in 0..kh {
                                for kwi in 0..kw {
                                    let ih = (ohi * stride + khi) as isize - pt as isize;
                                    let iw = (owi * stride + kwi) as isize - pl as isize;
                                    if ih >= 0
                                        && (ih as usize) < h
                                        && iw >= 0
                                        && (iw as usize) < wd_
                                    {
                                        acc += w.data()[((o * cin + c) * kh + khi) * kw + kwi]
                                            * x.data()[((bi * cin + c) * h + ih as usize) * wd_
                                                + iw as usize];
                                    }
                                }
                            }
                        }
                        y[((bi * cout + o) * oh + ohi) * ow + owi] = acc;
                    }
                }
            }
        }
        y
    }

    #[test]
    fn matches_six_loop_oracle() {
        let mut rng = Rng::from_seed(23);
        let x = Tensor::from_vec(&[2, 2, 5, 5], (0..100).map(|_| rng.normal()).collect()).unwrap();
        let w = Tensor::from_vec(&[3, 2, 3, 3], (0..54).map(|_| rng.normal()).collect()).unwrap();
        let b = Tensor::vector(&[rng.normal(), rng.normal(), rng.normal()]);
        for stride in [1, 2] {
            let y = conv2d_forward(&x, &w, &b, stride).unwrap();
            let want = naive_conv2d(&x, &w, &b, stride);
            for (a, e) in y.data().iter().zip(want.iter()) {
                assert!((a - e).abs() < 1e-12, "stride {stride}");
            }
        }
    }

    #[test]
    fn depthwise_never_mixes_channels() {
        let mut rng = Rng::from_seed(31);
        // Perturbing channel 0 must not change channel 1 of the output.
        let mut x = Tensor::from_vec(&[1, 2, 4, 4], (0..32).map(|_| rng.normal()).collect()).unwrap();
        let w = Tensor::from_vec(&[2, 3, 3], (0..18).map(|_| rng.normal()).collect()).unwrap();
        let b = Tensor::zeros(&[2]);
        let y0 = depthwise_conv2d_forward(&x, &w, &b, 1).unwrap();
        x.data_mut()[0] += 1.0;
        let y1 = depthwise_conv2d_forward(&x, &w, &b, 1).unwrap();
        assert_eq!(&y0.data()[16..], &y1.data()[16..]);
        assert_ne!(&y0.data()[..16], &y1.data()[..16]);
    }

    #[test]
    fn stride2_halves_spatial_dims_with_ceil() {
        let x = Tensor::zeros(&[1, 1, 5, 6]);
        let w = Tensor::zeros(&[1, 1, 3, 3]);
        let y = conv2d_forward(&x, &w, &Tensor::zeros(&[1]), 2).unwrap();
        assert_eq!(y.shape(), &[1, 1, 3, 3]);
    }

    #[test]
    fn channel_mismatch_is_rejected() {
        let x = Tensor::zeros(&[1, 3, 4, 4]);
        let w = Tensor::zeros(&[2, 2, 3, 3]);
        assert!(conv2d_forward(&x, &w, &Tensor::zeros(&[2]), 1).is_err());
        let wp = Tensor::zeros(&[2, 4]);
        assert!(pointwise_conv2d_forward(&x, &wp, &Tensor::zeros(&[2])).is_err());
        let wd = Tensor::zeros(&[4, 3, 3]);
        assert!(depthwise_conv2d_forward(&x, &wd, &Tensor::zeros(&[4]), 1).is_err());
    }
}
