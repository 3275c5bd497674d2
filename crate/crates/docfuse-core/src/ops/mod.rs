//! Pure forward/backward kernels.
//!
//! Every kernel is a function: forwards validate shapes and return
//! `Result`, backwards assume the shapes a prior forward established and
//! accumulate (`+=`) into gradient buffers so shared parameters and skip
//! connections compose. Convolutions are cross-correlations (no kernel
//! flip). "Same" zero padding splits `K - 1` as `left = (K - 1) / 2`,
//! remainder on the right; for stride 2 the output extent is `ceil(n / 2)`
//! and the total padding is `max((out - 1) * 2 + K - n, 0)` split the same
//! way.

mod activation;
mod batchnorm;
mod conv1d;
mod conv2d;
mod dense;
mod dropout;
mod fuse;
mod loss;
mod pool1d;
mod pool2d;

pub use activation::{relu_backward, relu_forward};
pub use batchnorm::{
    batchnorm_backward, batchnorm_forward_eval, batchnorm_forward_train, BatchNormCache,
    BatchStats,
};
pub use conv1d::{conv1d_backward, conv1d_forward, conv1d_out_len, Padding};
pub use conv2d::{
    conv2d_backward, conv2d_forward, conv2d_out_extent, depthwise_conv2d_backward,
    depthwise_conv2d_forward, pointwise_conv2d_backward, pointwise_conv2d_forward,
};
pub use dense::{dense_backward, dense_forward};
pub use dropout::{dropout_backward, dropout_forward_eval, dropout_forward_train};
pub use fuse::{fuse_backward, fuse_forward, FusionKind};
pub use loss::{softmax_cross_entropy, softmax_rows, softmax_vec};
pub use pool1d::{
    max_over_time_backward, max_over_time_forward, maxpool1d_backward, maxpool1d_forward,
    maxpool1d_out_len,
};
pub use pool2d::{global_avg_pool2d_backward, global_avg_pool2d_forward};
