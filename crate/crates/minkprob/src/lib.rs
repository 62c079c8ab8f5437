//! File formats, presets, plots, acceptance criteria and command
//! implementations for the `minkprob` binary.
//!
//! Numeric data travels as CSV with a header row and 17 significant digits;
//! problem specs and reports are JSON; plots are SVG written directly.

pub mod commands;
pub mod criteria;
pub mod families;
pub mod io;
pub mod plot;
pub mod presets;
pub mod spec;

mod error;

pub use error::{CliError, CliResult};
