use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("group {0} has no receivers")]
    InactiveGroup(usize),

    #[error("group {group} is not assigned to channel {channel}")]
    NotOnChannel { group: usize, channel: usize },

    #[error("closed-form outage expressions require a path-loss exponent of 4, got {0}")]
    UnsupportedExponent(f64),

    #[error(
        "exhaustive search over G={groups}, C={channels} exceeds the guard \
         (G <= {max_groups}, C <= {max_channels}); set `allow_large_search` to override"
    )]
    SearchGuard {
        groups: usize,
        channels: usize,
        max_groups: usize,
        max_channels: usize,
    },

    #[error("size vector {sizes:?} needs {needed} groups but only {available} are available")]
    PoolTooSmall {
        sizes: Vec<usize>,
        needed: usize,
        available: usize,
    },

    #[error("count overflowed u128")]
    Overflow,

    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config is missing required keys: {0}")]
    MissingKeys(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
