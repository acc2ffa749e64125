#![doc = include_str!("../README.md")]

pub mod baseline;
pub mod bitstore;
pub mod bounds;
pub mod error;
pub mod rational;
pub mod scheme;
pub mod sparse;
pub mod subblock;

pub use bitstore::{BitStore, Probe, ProbeCounter, ProbeLedger, Unmetered};
pub use error::{Error, Result};
pub use rational::{parse_decimal, Rational};
pub use scheme::{derive_params, Container, SchemeParams};
