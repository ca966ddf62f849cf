//! File formats and command line for the rallykit toolkit.
//!
//! The algorithms live in [`rallykit_core`]; this crate reads and writes the
//! files they consume and produce (rally CSVs, probability streams, PPM
//! frames, detection JSON lines) and exposes everything as the `rallykit`
//! binary.

pub mod cli;
pub mod error;
pub mod formats;
pub mod report;

pub use error::{Error, Result};
pub use rallykit_core as core;
