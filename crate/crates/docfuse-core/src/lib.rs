//! Core library for multimodal (text + image) document classification.
//!
//! Everything in this crate is pure computation over heap-allocated buffers:
//! tensors with hand-derived backward passes, hashed character-n-gram word
//! embeddings, SIF document embeddings, a 1D-CNN text classifier, an
//! inverted-residual image CNN, and a concatenation-fusion classifier trained
//! end-to-end with SGD + momentum. File formats, dataset handling and the CLI
//! live in the companion `docfuse-cli` crate.
//!
//! The crate is `no_std`-compatible (`alloc` required); disable the default
//! `std` feature for freestanding builds. All float transcendentals go
//! through `libm` so results are bit-stable across platforms.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod error;
pub mod graph;
pub mod image;
pub mod init;
pub mod math;
pub mod metrics;
pub mod models;
pub mod ops;
pub mod optim;
pub mod rng;
pub mod tensor;
pub mod text;

#[cfg(any(test, feature = "testutil"))]
pub mod gradcheck;

pub use error::{Error, Result};
pub use rng::Rng;
pub use tensor::Tensor;
