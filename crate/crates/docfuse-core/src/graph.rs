//! Stateful layer graph built on the pure kernels in [`crate::ops`].
//!
//! A [`Layer`] owns its parameters, same-shaped gradient buffers and the
//! forward cache needed by its backward pass. [`Stack`] chains layers and
//! validates the whole shape composition when it is built; a composition
//! that cannot run is rejected there, never mid-forward.
//!
//! Training forwards (`forward`) cache intermediates and may mutate state
//! (dropout masks, batch-norm running statistics). `infer` takes `&self`,
//! never mutates, and is safe to call from parallel readers.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::init::he_init;
use crate::ops;
use crate::ops::{BatchNormCache, Padding};
use crate::optim::ParamSlot;
use crate::rng::Rng;
use crate::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

#[derive(Debug, Clone)]
pub struct Dense {
    pub w: Tensor,
    pub b: Tensor,
    gw: Tensor,
    gb: Tensor,
    cache_x: Option<Tensor>,
}

#[derive(Debug, Clone)]
pub struct Conv1d {
    pub w: Tensor,
    pub b: Tensor,
    gw: Tensor,
    gb: Tensor,
    padding: Padding,
    cache_x: Option<Tensor>,
}

#[derive(Debug, Clone)]
pub struct Conv2d {
    pub w: Tensor,
    pub b: Tensor,
    gw: Tensor,
    gb: Tensor,
    stride: usize,
    cache_x: Option<Tensor>,
}

#[derive(Debug, Clone)]
pub struct DepthwiseConv2d {
    pub w: Tensor,
    pub b: Tensor,
    gw: Tensor,
    gb: Tensor,
    stride: usize,
    cache_x: Option<Tensor>,
}

#[derive(Debug, Clone)]
pub struct PointwiseConv2d {
    pub w: Tensor,
    pub b: Tensor,
    gw: Tensor,
    gb: Tensor,
    cache_x: Option<Tensor>,
}

#[derive(Debug, Clone)]
pub struct BatchNorm {
    pub gamma: Tensor,
    pub beta: Tensor,
    ggamma: Tensor,
    gbeta: Tensor,
    pub running_mean: Tensor,
    pub running_var: Tensor,
    momentum: f64,
    eps: f64,
    cache: Option<BatchNormCache>,
}

#[derive(Debug, Clone)]
pub struct Dropout {
    rate: f64,
    mask: Option<Tensor>,
}

#[derive(Debug, Clone)]
pub enum Layer {
    Dense(Dense),
    Relu { cache_x: Option<Tensor> },
    Dropout(Dropout),
    BatchNorm(BatchNorm),
    Conv1d(Conv1d),
    MaxPool1d {
        window: usize,
        stride: usize,
        cache: Option<(Vec<usize>, Vec<u32>)>,
    },
    MaxOverTime { cache: Option<(Vec<usize>, Vec<u32>)> },
    Conv2d(Conv2d),
    DepthwiseConv2d(DepthwiseConv2d),
    PointwiseConv2d(PointwiseConv2d),
    GlobalAvgPool2d { cache_shape: Option<Vec<usize>> },
}

impl Layer {
    pub fn dense(input: usize, output: usize, rng: &mut Rng) -> Layer {
        Layer::Dense(Dense {
            w: he_init(&[input, output], input, rng),
            b: Tensor::zeros(&[output]),
            gw: Tensor::zeros(&[input, output]),
            gb: Tensor::zeros(&[output]),
            cache_x: None,
        })
    }

    pub fn relu() -> Layer {
        Layer::Relu { cache_x: None }
    }

    pub fn dropout(rate: f64) -> Layer {
        Layer::Dropout(Dropout { rate, mask: None })
    }

    pub fn batchnorm(channels: usize, momentum: f64, eps: f64) -> Layer {
        Layer::BatchNorm(BatchNorm {
            gamma: Tensor::filled(&[channels], 1.0),
            beta: Tensor::zeros(&[channels]),
            ggamma: Tensor::zeros(&[channels]),
            gbeta: Tensor::zeros(&[channels]),
            running_mean: Tensor::zeros(&[channels]),
            running_var: Tensor::filled(&[channels], 1.0),
            momentum,
            eps,
            cache: None,
        })
    }

    pub fn conv1d(cin: usize, cout: usize, k: usize, padding: Padding, rng: &mut Rng) -> Layer {
        Layer::Conv1d(Conv1d {
            w: he_init(&[cout, cin, k], cin * k, rng),
            b: Tensor::zeros(&[cout]),
            gw: Tensor::zeros(&[cout, cin, k]),
            gb: Tensor::zeros(&[cout]),
            padding,
            cache_x: None,
        })
    }

    pub fn maxpool1d(window: usize, stride: usize) -> Layer {
        Layer::MaxPool1d {
            window,
            stride,
            cache: None,
        }
    }

    pub fn max_over_time() -> Layer {
        Layer::MaxOverTime { cache: None }
    }

    pub fn conv2d(cin: usize, cout: usize, k: usize, stride: usize, rng: &mut Rng) -> Layer {
        Layer::Conv2d(Conv2d {
            w: he_init(&[cout, cin, k, k], cin * k * k, rng),
            b: Tensor::zeros(&[cout]),
            gw: Tensor::zeros(&[cout, cin, k, k]),
            gb: Tensor::zeros(&[cout]),
            stride,
            cache_x: None,
        })
    }

    pub fn depthwise_conv2d(channels: usize, k: usize, stride: usize, rng: &mut Rng) -> Layer {
        Layer::DepthwiseConv2d(DepthwiseConv2d {
            w: he_init(&[channels, k, k], k * k, rng),
            b: Tensor::zeros(&[channels]),
            gw: Tensor::zeros(&[channels, k, k]),
            gb: Tensor::zeros(&[channels]),
            stride,
            cache_x: None,
        })
    }

    pub fn pointwise_conv2d(cin: usize, cout: usize, rng: &mut Rng) -> Layer {
        Layer::PointwiseConv2d(PointwiseConv2d {
            w: he_init(&[cout, cin], cin, rng),
            b: Tensor::zeros(&[cout]),
            gw: Tensor::zeros(&[cout, cin]),
            gb: Tensor::zeros(&[cout]),
            cache_x: None,
        })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Layer::Dense(_) => "dense",
            Layer::Relu { .. } => "relu",
            Layer::Dropout(_) => "dropout",
            Layer::BatchNorm(_) => "batchnorm",
            Layer::Conv1d(_) => "conv1d",
            Layer::MaxPool1d { .. } => "maxpool1d",
            Layer::MaxOverTime { .. } => "maxovertime",
            Layer::Conv2d(_) => "conv2d",
            Layer::DepthwiseConv2d(_) => "depthwiseconv2d",
            Layer::PointwiseConv2d(_) => "pointwiseconv2d",
            Layer::GlobalAvgPool2d { .. } => "globalavgpool2d",
        }
    }

    pub fn global_avg_pool2d() -> Layer {
        Layer::GlobalAvgPool2d { cache_shape: None }
    }

    /// Shape rule for a batched input shape (batch at axis 0).
    pub fn out_shape(&self, in_shape: &[usize]) -> Result<Vec<usize>> {
        let fail = |want: &str| {
            Err(Error::shape(format!(
                "{}: input {:?} does not satisfy {}",
                self.kind_name(),
                in_shape,
                want
            )))
        };
        match self {
            Layer::Dense(d) => {
                if in_shape.len() != 2 || in_shape[1] != d.w.dim(0) {
                    return fail(&format!("[B,{}]", d.w.dim(0)));
                }
                Ok(vec![in_shape[0], d.w.dim(1)])
            }
            Layer::Relu { .. } | Layer::Dropout(_) => Ok(in_shape.to_vec()),
            Layer::BatchNorm(bn) => {
                let c = bn.gamma.dim(0);
                if in_shape.len() < 2 || in_shape.len() > 4 || in_shape[1] != c {
                    return fail(&format!("rank 2..4 with {c} channels"));
                }
                Ok(in_shape.to_vec())
            }
            Layer::Conv1d(c) => {
                let (cout, cin, k) = (c.w.dim(0), c.w.dim(1), c.w.dim(2));
                if in_shape.len() != 3 || in_shape[1] != cin {
                    return fail(&format!("[B,{cin},T]"));
                }
                let t_out = ops::conv1d_out_len(in_shape[2], k, c.padding)?;
                Ok(vec![in_shape[0], cout, t_out])
            }
            Layer::MaxPool1d { window, stride, .. } => {
                if in_shape.len() != 3 {
                    return fail("[B,C,T]");
                }
                let t_out = ops::maxpool1d_out_len(in_shape[2], *window, *stride)?;
                Ok(vec![in_shape[0], in_shape[1], t_out])
            }
            Layer::MaxOverTime { .. } => {
                if in_shape.len() != 3 || in_shape[2] == 0 {
                    return fail("[B,C,T] with T >= 1");
                }
                Ok(vec![in_shape[0], in_shape[1]])
            }
            Layer::Conv2d(c) => {
                let (cout, cin) = (c.w.dim(0), c.w.dim(1));
                if in_shape.len() != 4 || in_shape[1] != cin {
                    return fail(&format!("[B,{cin},H,W]"));
                }
                Ok(vec![
                    in_shape[0],
                    cout,
                    ops::conv2d_out_extent(in_shape[2], c.stride),
                    ops::conv2d_out_extent(in_shape[3], c.stride),
                ])
            }
            Layer::DepthwiseConv2d(c) => {
                let channels = c.w.dim(0);
                if in_shape.len() != 4 || in_shape[1] != channels {
                    return fail(&format!("[B,{channels},H,W]"));
                }
                Ok(vec![
                    in_shape[0],
                    channels,
                    ops::conv2d_out_extent(in_shape[2], c.stride),
                    ops::conv2d_out_extent(in_shape[3], c.stride),
                ])
            }
            Layer::PointwiseConv2d(c) => {
                let (cout, cin) = (c.w.dim(0), c.w.dim(1));
                if in_shape.len() != 4 || in_shape[1] != cin {
                    return fail(&format!("[B,{cin},H,W]"));
                }
                Ok(vec![in_shape[0], cout, in_shape[2], in_shape[3]])
            }
            Layer::GlobalAvgPool2d { .. } => {
                if in_shape.len() != 4 || in_shape[2] == 0 || in_shape[3] == 0 {
                    return fail("[B,C,H,W] with H,W >= 1");
                }
                Ok(vec![in_shape[0], in_shape[1]])
            }
        }
    }

    /// Training/eval forward; caches intermediates when `mode == Train`.
    pub fn forward(&mut self, x: &Tensor, mode: Mode, rng: &mut Rng) -> Result<Tensor> {
        match self {
            Layer::Dense(d) => {
                let y = ops::dense_forward(x, &d.w, &d.b)?;
                if mode == Mode::Train {
                    d.cache_x = Some(x.clone());
                }
                Ok(y)
            }
            Layer::Relu { cache_x } => {
                let y = ops::relu_forward(x);
                if mode == Mode::Train {
                    *cache_x = Some(x.clone());
                }
                Ok(y)
            }
            Layer::Dropout(d) => match mode {
                Mode::Train => {
                    let (y, mask) = ops::dropout_forward_train(x, d.rate, rng)?;
                    d.mask = Some(mask);
                    Ok(y)
                }
                Mode::Eval => ops::dropout_forward_eval(x, d.rate),
            },
            Layer::BatchNorm(bn) => match mode {
                Mode::Train => {
                    let (y, cache, stats) =
                        ops::batchnorm_forward_train(x, &bn.gamma, &bn.beta, bn.eps)?;
                    for (r, &b) in bn.running_mean.data_mut().iter_mut().zip(stats.mean.iter()) {
                        *r = bn.momentum * *r + (1.0 - bn.momentum) * b;
                    }
                    for (r, &b) in bn.running_var.data_mut().iter_mut().zip(stats.var.iter()) {
                        *r = bn.momentum * *r + (1.0 - bn.momentum) * b;
                    }
                    bn.cache = Some(cache);
                    Ok(y)
                }
                Mode::Eval => ops::batchnorm_forward_eval(
                    x,
                    &bn.gamma,
                    &bn.beta,
                    &bn.running_mean,
                    &bn.running_var,
                    bn.eps,
                ),
            },
            Layer::Conv1d(c) => {
                let y = ops::conv1d_forward(x, &c.w, &c.b, c.padding)?;
                if mode == Mode::Train {
                    c.cache_x = Some(x.clone());
                }
                Ok(y)
            }
            Layer::MaxPool1d { window, stride, cache } => {
                let (y, argmax) = ops::maxpool1d_forward(x, *window, *stride)?;
                if mode == Mode::Train {
                    *cache = Some((x.shape().to_vec(), argmax));
                }
                Ok(y)
            }
            Layer::MaxOverTime { cache } => {
                let (y, argmax) = ops::max_over_time_forward(x)?;
                if mode == Mode::Train {
                    *cache = Some((x.shape().to_vec(), argmax));
                }
                Ok(y)
            }
            Layer::Conv2d(c) => {
                let y = ops::conv2d_forward(x, &c.w, &c.b, c.stride)?;
                if mode == Mode::Train {
                    c.cache_x = Some(x.clone());
                }
                Ok(y)
            }
            Layer::DepthwiseConv2d(c) => {
                let y = ops::depthwise_conv2d_forward(x, &c.w, &c.b, c.stride)?;
                if mode == Mode::Train {
                    c.cache_x = Some(x.clone());
                }
                Ok(y)
            }
            Layer::PointwiseConv2d(c) => {
                let y = ops::pointwise_conv2d_forward(x, &c.w, &c.b)?;
                if mode == Mode::Train {
                    c.cache_x = Some(x.clone());
                }
                Ok(y)
            }
            Layer::GlobalAvgPool2d { cache_shape } => {
                let y = ops::global_avg_pool2d_forward(x)?;
                if mode == Mode::Train {
                    *cache_shape = Some(x.shape().to_vec());
                }
                Ok(y)
            }
        }
    }

    /// Read-only inference forward (running stats, no dropout, no caches).
    pub fn infer(&self, x: &Tensor) -> Result<Tensor> {
        match self {
            Layer::Dense(d) => ops::dense_forward(x, &d.w, &d.b),
            Layer::Relu { .. } => Ok(ops::relu_forward(x)),
            Layer::Dropout(d) => ops::dropout_forward_eval(x, d.rate),
            Layer::BatchNorm(bn) => ops::batchnorm_forward_eval(
                x,
                &bn.gamma,
                &bn.beta,
                &bn.running_mean,
                &bn.running_var,
                bn.eps,
            ),
            Layer::Conv1d(c) => ops::conv1d_forward(x, &c.w, &c.b, c.padding),
            Layer::MaxPool1d { window, stride, .. } => {
                Ok(ops::maxpool1d_forward(x, *window, *stride)?.0)
            }
            Layer::MaxOverTime { .. } => Ok(ops::max_over_time_forward(x)?.0),
            Layer::Conv2d(c) => ops::conv2d_forward(x, &c.w, &c.b, c.stride),
            Layer::DepthwiseConv2d(c) => ops::depthwise_conv2d_forward(x, &c.w, &c.b, c.stride),
            Layer::PointwiseConv2d(c) => ops::pointwise_conv2d_forward(x, &c.w, &c.b),
            Layer::GlobalAvgPool2d { .. } => ops::global_avg_pool2d_forward(x),
        }
    }

    /// Backward pass; accumulates parameter gradients, returns `dx`.
    /// Panics if no training forward preceded it.
    pub fn backward(&mut self, dy: &Tensor) -> Tensor {
        match self {
            Layer::Dense(d) => {
                let x = d.cache_x.as_ref().expect("dense backward without forward");
                ops::dense_backward(x, &d.w, dy, &mut d.gw, &mut d.gb)
            }
            Layer::Relu { cache_x } => {
                let x = cache_x.as_ref().expect("relu backward without forward");
                ops::relu_backward(x, dy)
            }
            Layer::Dropout(d) => {
                let mask = d.mask.as_ref().expect("dropout backward without forward");
                ops::dropout_backward(mask, dy)
            }
            Layer::BatchNorm(bn) => {
                let cache = bn.cache.as_ref().expect("batchnorm backward without forward");
                ops::batchnorm_backward(cache, &bn.gamma, dy, &mut bn.ggamma, &mut bn.gbeta)
            }
            Layer::Conv1d(c) => {
                let x = c.cache_x.as_ref().expect("conv1d backward without forward");
                ops::conv1d_backward(x, &c.w, dy, c.padding, &mut c.gw, &mut c.gb)
            }
            Layer::MaxPool1d { cache, .. } => {
                let (shape, argmax) = cache.as_ref().expect("maxpool1d backward without forward");
                ops::maxpool1d_backward(shape, argmax, dy)
            }
            Layer::MaxOverTime { cache } => {
                let (shape, argmax) =
                    cache.as_ref().expect("maxovertime backward without forward");
                ops::max_over_time_backward(shape, argmax, dy)
            }
            Layer::Conv2d(c) => {
                let x = c.cache_x.as_ref().expect("conv2d backward without forward");
                ops::conv2d_backward(x, &c.w, dy, c.stride, &mut c.gw, &mut c.gb)
            }
            Layer::DepthwiseConv2d(c) => {
                let x = c.cache_x.as_ref().expect("depthwise backward without forward");
                ops::depthwise_conv2d_backward(x, &c.w, dy, c.stride, &mut c.gw, &mut c.gb)
            }
            Layer::PointwiseConv2d(c) => {
                let x = c.cache_x.as_ref().expect("pointwise backward without forward");
                ops::pointwise_conv2d_backward(x, &c.w, dy, &mut c.gw, &mut c.gb)
            }
            Layer::GlobalAvgPool2d { cache_shape } => {
                let shape = cache_shape.as_ref().expect("gap backward without forward");
                ops::global_avg_pool2d_backward(shape, dy)
            }
        }
    }

    /// Trainable parameters in a stable order.
    pub fn param_slots<'a>(&'a mut self, prefix: &str, out: &mut Vec<ParamSlot<'a>>) {
        match self {
            Layer::Dense(d) => {
                out.push(ParamSlot {
                    name: format!("{prefix}.w"),
                    param: &mut d.w,
                    grad: &mut d.gw,
                });
                out.push(ParamSlot {
                    name: format!("{prefix}.b"),
                    param: &mut d.b,
                    grad: &mut d.gb,
                });
            }
            Layer::Conv1d(c) => {
                out.push(ParamSlot {
                    name: format!("{prefix}.w"),
                    param: &mut c.w,
                    grad: &mut c.gw,
                });
                out.push(ParamSlot {
                    name: format!("{prefix}.b"),
                    param: &mut c.b,
                    grad: &mut c.gb,
                });
            }
            Layer::Conv2d(c) => {
                out.push(ParamSlot {
                    name: format!("{prefix}.w"),
                    param: &mut c.w,
                    grad: &mut c.gw,
                });
                out.push(ParamSlot {
                    name: format!("{prefix}.b"),
                    param: &mut c.b,
                    grad: &mut c.gb,
                });
            }
            Layer::DepthwiseConv2d(c) => {
                out.push(ParamSlot {
                    name: format!("{prefix}.w"),
                    param: &mut c.w,
                    grad: &mut c.gw,
                });
                out.push(ParamSlot {
                    name: format!("{prefix}.b"),
                    param: &mut c.b,
                    grad: &mut c.gb,
                });
            }
            Layer::PointwiseConv2d(c) => {
                out.push(ParamSlot {
                    name: format!("{prefix}.w"),
                    param: &mut c.w,
                    grad: &mut c.gw,
                });
                out.push(ParamSlot {
                    name: format!("{prefix}.b"),
                    param: &mut c.b,
                    grad: &mut c.gb,
                });
            }
            Layer::BatchNorm(bn) => {
                out.push(ParamSlot {
                    name: format!("{prefix}.gamma"),
                    param: &mut bn.gamma,
                    grad: &mut bn.ggamma,
                });
                out.push(ParamSlot {
                    name: format!("{prefix}.beta"),
                    param: &mut bn.beta,
                    grad: &mut bn.gbeta,
                });
            }
            _ => {}
        }
    }

    /// Parameters plus persistent buffers (running stats), read-only.
    pub fn state<'a>(&'a self, prefix: &str, out: &mut Vec<(String, &'a Tensor)>) {
        match self {
            Layer::Dense(d) => {
                out.push((format!("{prefix}.w"), &d.w));
                out.push((format!("{prefix}.b"), &d.b));
            }
            Layer::Conv1d(c) => {
                out.push((format!("{prefix}.w"), &c.w));
                out.push((format!("{prefix}.b"), &c.b));
            }
            Layer::Conv2d(c) => {
                out.push((format!("{prefix}.w"), &c.w));
                out.push((format!("{prefix}.b"), &c.b));
            }
            Layer::DepthwiseConv2d(c) => {
                out.push((format!("{prefix}.w"), &c.w));
                out.push((format!("{prefix}.b"), &c.b));
            }
            Layer::PointwiseConv2d(c) => {
                out.push((format!("{prefix}.w"), &c.w));
                out.push((format!("{prefix}.b"), &c.b));
            }
            Layer::BatchNorm(bn) => {
                out.push((format!("{prefix}.gamma"), &bn.gamma));
                out.push((format!("{prefix}.beta"), &bn.beta));
                out.push((format!("{prefix}.running_mean"), &bn.running_mean));
                out.push((format!("{prefix}.running_var"), &bn.running_var));
            }
            _ => {}
        }
    }

    /// Mutable view of the same entries `state` lists, for checkpoint load.
    pub fn state_mut<'a>(&'a mut self, prefix: &str, out: &mut Vec<(String, &'a mut Tensor)>) {
        match self {
            Layer::Dense(d) => {
                out.push((format!("{prefix}.w"), &mut d.w));
                out.push((format!("{prefix}.b"), &mut d.b));
            }
            Layer::Conv1d(c) => {
                out.push((format!("{prefix}.w"), &mut c.w));
                out.push((format!("{prefix}.b"), &mut c.b));
            }
            Layer::Conv2d(c) => {
                out.push((format!("{prefix}.w"), &mut c.w));
                out.push((format!("{prefix}.b"), &mut c.b));
            }
            Layer::DepthwiseConv2d(c) => {
                out.push((format!("{prefix}.w"), &mut c.w));
                out.push((format!("{prefix}.b"), &mut c.b));
            }
            Layer::PointwiseConv2d(c) => {
                out.push((format!("{prefix}.w"), &mut c.w));
                out.push((format!("{prefix}.b"), &mut c.b));
            }
            Layer::BatchNorm(bn) => {
                out.push((format!("{prefix}.gamma"), &mut bn.gamma));
                out.push((format!("{prefix}.beta"), &mut bn.beta));
                out.push((format!("{prefix}.running_mean"), &mut bn.running_mean));
                out.push((format!("{prefix}.running_var"), &mut bn.running_var));
            }
            _ => {}
        }
    }
}

/// A linear chain of layers with the composed shape contract checked at
/// construction time.
#[derive(Debug, Clone)]
pub struct Stack {
    layers: Vec<Layer>,
    in_shape: Vec<usize>,
    out_shape: Vec<usize>,
    /// Per-layer output shapes (batch dim normalized to 1).
    trace: Vec<Vec<usize>>,
}

impl Stack {
    /// `input_shape` excludes the batch dimension.
    pub fn new(layers: Vec<Layer>, input_shape: &[usize]) -> Result<Stack> {
        let mut shape = vec![1usize];
        shape.extend_from_slice(input_shape);
        let mut trace = Vec::with_capacity(layers.len());
        for (i, layer) in layers.iter().enumerate() {
            shape = layer.out_shape(&shape).map_err(|e| {
                Error::shape(format!("layer {i} ({}): {e}", layer.kind_name()))
            })?;
            trace.push(shape.clone());
        }
        Ok(Stack {
            layers,
            in_shape: input_shape.to_vec(),
            out_shape: shape[1..].to_vec(),
            trace,
        })
    }

    /// Output shape excluding the batch dimension.
    pub fn output_shape(&self) -> &[usize] {
        &self.out_shape
    }

    pub fn input_shape(&self) -> &[usize] {
        &self.in_shape
    }

    /// Per-layer output shapes with a placeholder batch of 1.
    pub fn shape_trace(&self) -> &[Vec<usize>] {
        &self.trace
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn forward(&mut self, x: &Tensor, mode: Mode, rng: &mut Rng) -> Result<Tensor> {
        let mut cur = x.clone();
        for layer in &mut self.layers {
            cur = layer.forward(&cur, mode, rng)?;
        }
        Ok(cur)
    }

    pub fn infer(&self, x: &Tensor) -> Result<Tensor> {
        let mut cur = x.clone();
        for layer in &self.layers {
            cur = layer.infer(&cur)?;
        }
        Ok(cur)
    }

    pub fn backward(&mut self, dy: &Tensor) -> Tensor {
        let mut grad = dy.clone();
        for layer in self.layers.iter_mut().rev() {
            grad = layer.backward(&grad);
        }
        grad
    }

    pub fn param_slots<'a>(&'a mut self, prefix: &str, out: &mut Vec<ParamSlot<'a>>) {
        for (i, layer) in self.layers.iter_mut().enumerate() {
            let name = format!("{prefix}.{i}.{}", layer.kind_name());
            layer.param_slots(&name, out);
        }
    }

    pub fn state<'a>(&'a self, prefix: &str, out: &mut Vec<(String, &'a Tensor)>) {
        for (i, layer) in self.layers.iter().enumerate() {
            let name = format!("{prefix}.{i}.{}", layer.kind_name());
            layer.state(&name, out);
        }
    }

    pub fn state_mut<'a>(&'a mut self, prefix: &str, out: &mut Vec<(String, &'a mut Tensor)>) {
        for (i, layer) in self.layers.iter_mut().enumerate() {
            let name = format!("{prefix}.{i}.{}", layer.kind_name());
            layer.state_mut(&name, out);
        }
    }
}
