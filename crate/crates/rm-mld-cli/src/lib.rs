//! Command-line companion to `rm-mld-core`: file formats, shipped
//! reference fixtures, report rendering, and the subcommand
//! implementations behind the `rm-mld` binary.

pub mod cli;
pub mod commands;
pub mod fixtures;
pub mod formats;
pub mod report;

/// Exit codes: 0 = success, 1 = verification mismatch, 2 = usage or input
/// error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
