//! File formats, configuration, mesh export and the command-line driver
//! for `framecurve-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod export;
pub mod fixtures;
pub mod io;

pub use error::{Error, Result};
