//! Command-line front end and JSON formats for `posetal-core`.

pub mod cli;
pub mod error;
pub mod format;
