//! IO, file formats and command implementations for the docfuse toolkit.
//!
//! The algorithmic core lives in `docfuse-core`; this crate adds everything
//! that touches the filesystem or the clock: dataset manifests, PGM images,
//! the checkpoint format, training/evaluation/prediction commands, the
//! synthetic dataset generator and the per-stage latency benchmark.

pub mod bench;
pub mod checkpoint;
pub mod commands;
pub mod dataset;
pub mod history;
pub mod manifest;
pub mod pgm;
pub mod report;
pub mod runconfig;
pub mod synth;
pub mod words;

/// Marker for invalid invocations and configuration (exit code 2, as
/// opposed to runtime failures which exit 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage_error(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}
