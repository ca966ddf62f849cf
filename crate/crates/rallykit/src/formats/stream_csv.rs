//! Per-frame hit probabilities: `frame,prob`, frames `0..n` in order.

use std::fmt::Write as _;
use std::path::Path;

use rallykit_core::events::ProbabilityStream;

use crate::error::{Error, Result};

pub fn parse_stream_csv(text: &str, rally_id: &str) -> Result<ProbabilityStream> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim().trim_start_matches('\u{feff}') == "frame,prob" => {}
        _ => return Err(Error::parse("", 1, "header must be `frame,prob`")),
    }
    let mut probs = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let (frame, prob) = raw
            .split_once(',')
            .ok_or_else(|| Error::parse("", line, "expected `frame,prob`"))?;
        let frame: usize = frame
            .trim()
            .parse()
            .map_err(|_| Error::parse("", line, format!("bad frame `{frame}`")))?;
        if frame != probs.len() {
            return Err(Error::parse(
                "",
                line,
                format!("frame {frame} where {} expected (frames must be contiguous from 0)", probs.len()),
            ));
        }
        let prob: f64 = prob
            .trim()
            .parse()
            .ok()
            .filter(|p: &f64| p.is_finite() && (0.0..=1.0).contains(p))
            .ok_or_else(|| Error::parse("", line, format!("bad probability `{prob}`")))?;
        probs.push(prob);
    }
    ProbabilityStream::new(rally_id, probs).map_err(|e| Error::parse("", 0, e.to_string()))
}

pub fn write_stream_csv(stream: &ProbabilityStream) -> String {
    let mut out = String::from("frame,prob\n");
    for (i, p) in stream.probs.iter().enumerate() {
        let _ = writeln!(out, "{i},{p}");
    }
    out
}

pub fn read_stream_file(path: &Path, rally_id: &str) -> Result<ProbabilityStream> {
    parse_stream_csv(&super::read_text(path)?, rally_id).map_err(|e| e.in_file(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_reject() {
        let s = parse_stream_csv("frame,prob\n0,0.1\n1,0.9\n2,0\n", "r").unwrap();
        assert_eq!(s.probs, vec![0.1, 0.9, 0.0]);
        assert!(parse_stream_csv("frame,prob\n0,0.1\n2,0.9\n", "r").is_err());
        assert!(parse_stream_csv("frame,prob\n0,1.5\n", "r").is_err());
        assert!(parse_stream_csv("frame,prob\n", "r").is_err());
        assert!(parse_stream_csv("f,p\n0,0.1\n", "r").is_err());
    }

    proptest! {
        #[test]
        fn round_trip(probs in prop::collection::vec(0.0f64..=1.0, 1..50)) {
            let s = ProbabilityStream::new("r", probs).unwrap();
            prop_assert_eq!(parse_stream_csv(&write_stream_csv(&s), "r").unwrap(), s);
        }
    }
}
