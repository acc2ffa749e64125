use std::io;

use thiserror::Error;

/// Errors produced by the codec, the container and the analysis tools.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bit address {addr} out of range for store of {capacity} bits")]
    Address { addr: u64, capacity: u64 },

    #[error("value {value} does not fit in a {width}-bit field")]
    FieldOverflow { value: u128, width: u32 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("capacity exceeded: {nonzero} nonzero blocks but room for {beta}")]
    CapacityExceeded { nonzero: u64, beta: u64 },

    #[error("expected {expected} bits, got {actual}")]
    Length { expected: usize, actual: usize },

    #[error("subblock of weight {weight} exceeds typicality threshold {w0}")]
    NotTypical { weight: u32, w0: u32 },

    #[error("no feasible parameters for n = {n}{}", min_feasible_hint(*.min_feasible_n))]
    Infeasible { n: u64, min_feasible_n: Option<u64> },

    #[error("block {block} is marked failed")]
    BlockFailed { block: u64 },

    #[error("malformed container: {0}")]
    MalformedContainer(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

fn min_feasible_hint(min: Option<u64>) -> String {
    match min {
        Some(m) => format!(" (smallest feasible power of two: {m})"),
        None => String::new(),
    }
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Address { .. } => 3,
            Error::BlockFailed { .. } => 4,
            Error::CapacityExceeded { .. } => 5,
            Error::MalformedContainer(_) => 6,
            Error::Infeasible { .. } => 7,
            Error::Io(_) => 8,
            Error::Parse(_) | Error::InvalidParams(_) | Error::Length { .. } => 2,
            Error::FieldOverflow { .. } | Error::NotTypical { .. } => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
