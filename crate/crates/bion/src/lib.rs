//! File formats, CSV tables, reports and the command line for the
//! objective-boundary pipeline in `bion-core`.

pub mod cli;
pub mod error;
pub mod files;
pub mod report;
pub mod tables;

pub use error::{BionError, Result};
