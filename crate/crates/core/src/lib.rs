//! Deterministic core of a badminton hit-event analytics pipeline.
//!
//! Everything here is pure computation over in-memory values and builds
//! without `std` (only `alloc` is required). File formats, frame IO and the
//! command line live in the companion `rallykit` crate.
//!
//! - [`rally`]: shot/rally data model and invariant checking.
//! - [`scoring`]: the per-shot, per-rally and dataset competition score.
//! - [`flow`]: dense Lucas-Kanade flow, background suppression, rendering.
//! - [`events`]: hit-event extraction from per-frame probability streams.
//! - [`assembly`]: rule-based filling of the remaining submission columns.
//! - [`synth`]: seeded fixture generators and an independent scoring oracle.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod assembly;
pub mod error;
pub mod events;
pub mod flow;
pub mod rally;
pub mod scoring;
pub mod synth;

pub use error::{Error, Result};
pub use rally::{Domains, Outcome, Player, Point, Rally, Shot};
