use alloc::string::String;
use core::fmt;

use crate::rally::Violation;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A probability stream or ensemble input with no entries.
    Empty(&'static str),
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    RallyIdMismatch {
        expected: String,
        found: String,
    },
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    ZeroDimension,
    InvalidConfig(&'static str),
    /// Event frames not strictly increasing at the given position.
    UnsortedEvents {
        index: usize,
    },
    DuplicateRallyId(String),
    InvalidRally(Violation),
    ContradictoryPerturbation(&'static str),
    OverlappingPeaks {
        first: u64,
        second: u64,
    },
    PeakOutOfRange {
        frame: u64,
        length: usize,
    },
    InvalidProbabilities {
        shot_seq: u32,
        attribute: &'static str,
        reason: &'static str,
    },
    MissingProbabilities {
        shot_seq: u32,
        attribute: &'static str,
    },
    FrameOutOfRange {
        frame: u64,
        frames: u64,
    },
    MissingPose,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Empty(what) => write!(f, "{what} is empty"),
            Error::LengthMismatch {
                what,
                expected,
                found,
            } => write!(f, "{what}: expected length {expected}, found {found}"),
            Error::RallyIdMismatch { expected, found } => {
                write!(f, "rally id mismatch: expected `{expected}`, found `{found}`")
            }
            Error::DimensionMismatch { expected, found } => write!(
                f,
                "frame dimensions {}x{} do not match {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            Error::ZeroDimension => f.write_str("image has a zero dimension"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::UnsortedEvents { index } => {
                write!(f, "event {index} is not strictly after its predecessor")
            }
            Error::DuplicateRallyId(id) => write!(f, "duplicate rally id `{id}`"),
            Error::InvalidRally(v) => write!(f, "invalid rally: {v}"),
            Error::ContradictoryPerturbation(msg) => {
                write!(f, "contradictory perturbation: {msg}")
            }
            Error::OverlappingPeaks { first, second } => {
                write!(f, "peaks at frames {first} and {second} overlap")
            }
            Error::PeakOutOfRange { frame, length } => {
                write!(f, "peak frame {frame} outside stream of length {length}")
            }
            Error::InvalidProbabilities {
                shot_seq,
                attribute,
                reason,
            } => write!(
                f,
                "shot {shot_seq}: {attribute} probabilities invalid ({reason})"
            ),
            Error::MissingProbabilities {
                shot_seq,
                attribute,
            } => write!(f, "shot {shot_seq}: no {attribute} probabilities"),
            Error::FrameOutOfRange { frame, frames } => {
                write!(f, "frame {frame} outside detection range 0..{frames}")
            }
            Error::MissingPose => f.write_str("pose is missing or incomplete"),
        }
    }
}

impl core::error::Error for Error {}
