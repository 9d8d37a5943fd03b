//! File formats and command implementations behind the `isoforge` binary.

pub mod commands;
pub mod error;
pub mod formats;
pub mod report;
