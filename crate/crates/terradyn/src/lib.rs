//! File formats, configuration, plotting and command implementations for
//! the `terradyn` command line. The models live in `terradyn-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod svg;

pub use config::{Format, OutputConfig, RunConfig};
pub use error::{Error, Result};
