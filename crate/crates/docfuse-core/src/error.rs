//! Error type shared by all core modules.

use alloc::string::String;
use core::fmt;

/// Errors raised by tensor ops, graph construction and data handling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Shapes do not conform; the message names both shapes.
    Shape(String),
    /// A hyperparameter or configuration value is invalid.
    Config(String),
    /// Input data is malformed (bad label, bad UTF-8, empty corpus, ...).
    Data(String),
}

impl Error {
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape(m) => write!(f, "shape error: {m}"),
            Error::Config(m) => write!(f, "config error: {m}"),
            Error::Data(m) => write!(f, "data error: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
