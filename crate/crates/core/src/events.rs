//! Hit-event extraction from per-frame probability streams.
//!
//! Frames whose probability reaches the stream's own `quantile` become
//! candidates. Candidates closer than `min_gap` frames are grouped, and each
//! group yields one event at its most probable frame.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rally::{Domains, Rally, Shot};

/// Streams whose value range is below this carry no event evidence.
pub const FLAT_STREAM_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityStream {
    pub rally_id: String,
    pub probs: Vec<f64>,
}

impl ProbabilityStream {
    pub fn new(rally_id: impl Into<String>, probs: Vec<f64>) -> Result<Self> {
        let s = ProbabilityStream {
            rally_id: rally_id.into(),
            probs,
        };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<()> {
        if self.probs.is_empty() {
            return Err(Error::Empty("probability stream"));
        }
        if self
            .probs
            .iter()
            .any(|p| !p.is_finite() || !(0.0..=1.0).contains(p))
        {
            return Err(Error::InvalidConfig("probabilities must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionConfig {
    pub quantile: f64,
    /// Candidates at most this many frames apart belong to the same event.
    pub min_gap: u64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            quantile: 0.8,
            min_gap: 3,
        }
    }
}

impl ExtractionConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.quantile > 0.0 && self.quantile < 1.0) {
            return Err(Error::InvalidConfig("quantile must lie in (0, 1)"));
        }
        if self.min_gap < 1 {
            return Err(Error::InvalidConfig("min_gap must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitEvent {
    pub frame: u64,
    pub peak_prob: f64,
}

/// The `q`-quantile of the stream, interpolating linearly between order
/// statistics at position `q * (n - 1)`.
pub fn quantile_threshold(stream: &ProbabilityStream, q: f64) -> Result<f64> {
    if stream.probs.is_empty() {
        return Err(Error::Empty("probability stream"));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidConfig("quantile must lie in (0, 1)"));
    }
    let mut sorted = stream.probs.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(interpolate_sorted(&sorted, q))
}

fn interpolate_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let lo = libm::floor(h);
    let mut frac = h - lo;
    let mut lo = lo as usize;
    // Snap positions that are an integer up to rounding so the threshold is
    // an exact order statistic there.
    if frac < 1e-9 {
        frac = 0.0;
    } else if frac > 1.0 - 1e-9 {
        frac = 0.0;
        lo += 1;
    }
    if frac == 0.0 || lo + 1 >= sorted.len() {
        return sorted[lo.min(sorted.len() - 1)];
    }
    let (a, b) = (sorted[lo], sorted[lo + 1]);
    a + (b - a) * frac
}

/// Extracts hit events; output is sorted by frame and any two consecutive
/// events are more than `cfg.min_gap` frames apart.
pub fn extract_hits(stream: &ProbabilityStream, cfg: &ExtractionConfig) -> Result<Vec<HitEvent>> {
    cfg.check()?;
    let threshold = quantile_threshold(stream, cfg.quantile)?;
    let (min, max) = stream
        .probs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
            (lo.min(p), hi.max(p))
        });
    if max - min < FLAT_STREAM_EPS {
        return Ok(Vec::new());
    }

    let mut events = Vec::new();
    let mut current: Option<(HitEvent, u64)> = None; // (best so far, last candidate frame)
    for (frame, &p) in stream.probs.iter().enumerate() {
        if p < threshold {
            continue;
        }
        let frame = frame as u64;
        current = match current {
            Some((best, last)) if frame - last <= cfg.min_gap => {
                let best = if p > best.peak_prob {
                    HitEvent {
                        frame,
                        peak_prob: p,
                    }
                } else {
                    best
                };
                Some((best, frame))
            }
            other => {
                if let Some((best, _)) = other {
                    events.push(best);
                }
                Some((
                    HitEvent {
                        frame,
                        peak_prob: p,
                    },
                    frame,
                ))
            }
        };
    }
    if let Some((best, _)) = current {
        events.push(best);
    }
    Ok(events)
}

/// Element-wise mean of several streams for the same rally (e.g. one per
/// fold). Values are summed in sorted order per frame so the result does not
/// depend on the order of `streams`.
pub fn merge_streams(streams: &[ProbabilityStream]) -> Result<ProbabilityStream> {
    let first = streams.first().ok_or(Error::Empty("stream list"))?;
    for s in &streams[1..] {
        if s.rally_id != first.rally_id {
            return Err(Error::RallyIdMismatch {
                expected: first.rally_id.clone(),
                found: s.rally_id.clone(),
            });
        }
        if s.probs.len() != first.probs.len() {
            return Err(Error::LengthMismatch {
                what: "probability stream",
                expected: first.probs.len(),
                found: s.probs.len(),
            });
        }
    }

    let k = streams.len() as f64;
    let mut column = Vec::with_capacity(streams.len());
    let probs = (0..first.probs.len())
        .map(|i| {
            column.clear();
            column.extend(streams.iter().map(|s| s.probs[i]));
            column.sort_by(f64::total_cmp);
            (column.iter().sum::<f64>() / k).clamp(0.0, 1.0)
        })
        .collect();
    Ok(ProbabilityStream {
        rally_id: first.rally_id.clone(),
        probs,
    })
}

/// Turns events into a rally whose shots carry `ShotSeq` and `HitFrame`; the
/// remaining columns hold placeholders for later assembly.
pub fn to_shot_rows(rally_id: &str, events: &[HitEvent], domains: &Domains) -> Result<Rally> {
    for (i, pair) in events.windows(2).enumerate() {
        if pair[1].frame <= pair[0].frame {
            return Err(Error::UnsortedEvents { index: i + 1 });
        }
    }
    let shots = events
        .iter()
        .enumerate()
        .map(|(i, e)| Shot::placeholder(i as u32 + 1, e.frame, domains))
        .collect();
    Ok(Rally::new(rally_id, shots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn stream(probs: Vec<f64>) -> ProbabilityStream {
        ProbabilityStream::new("r", probs).unwrap()
    }

    /// Sort-and-index reference for the quantile.
    fn quantile_oracle(values: &[f64], q: f64) -> f64 {
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pos = q * (v.len() - 1) as f64;
        let i = pos.floor() as usize;
        if i + 1 >= v.len() {
            return v[v.len() - 1];
        }
        v[i] + (v[i + 1] - v[i]) * (pos - i as f64)
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(quantile_threshold(&stream(vec![0.3; 17]), 0.8).unwrap(), 0.3);
        let ramp: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let q = quantile_threshold(&stream(ramp.clone()), 0.8).unwrap();
        assert!((q - 0.80).abs() < 1e-12);
        assert!((q - quantile_oracle(&ramp, 0.8)).abs() < 1e-12);
        assert_eq!(quantile_threshold(&stream(vec![0.0, 1.0]), 0.5).unwrap(), 0.5);
        assert_eq!(
            quantile_threshold(&ProbabilityStream { rally_id: "e".into(), probs: vec![] }, 0.5),
            Err(Error::Empty("probability stream"))
        );
    }

    #[test]
    fn flat_streams_yield_nothing() {
        let cfg = ExtractionConfig::default();
        assert!(extract_hits(&stream(vec![0.0; 50]), &cfg).unwrap().is_empty());
        assert!(extract_hits(&stream(vec![0.7; 50]), &cfg).unwrap().is_empty());
    }

    fn bump_stream(len: usize, peaks: &[usize]) -> Vec<f64> {
        let mut v = vec![0.0; len];
        for &c in peaks {
            for d in 0..6usize {
                let val = 1.0 - d as f64 * 0.15;
                if c >= d {
                    v[c - d] = f64::max(v[c - d], val);
                }
                if c + d < len {
                    v[c + d] = f64::max(v[c + d], val);
                }
            }
        }
        v
    }

    #[test]
    fn two_peaks_recovered() {
        let s = stream(bump_stream(60, &[10, 40]));
        let frames: Vec<u64> = extract_hits(&s, &ExtractionConfig::default())
            .unwrap()
            .iter()
            .map(|e| e.frame)
            .collect();
        assert_eq!(frames, vec![10, 40]);
    }

    #[test]
    fn gap_equal_to_min_gap_merges() {
        // Candidates at 10 and 13 (gap 3) merge; 13 and 17 (gap 4) do not.
        let mut v = vec![0.0; 34];
        v[10] = 0.9;
        v[13] = 0.95;
        v[17] = 0.8;
        v[30] = 0.7;
        v[31] = 0.6;
        v[32] = 0.6;
        v[33] = 0.6;
        let cfg = ExtractionConfig {
            quantile: 0.8,
            min_gap: 3,
        };
        let ev = extract_hits(&stream(v), &cfg).unwrap();
        let frames: Vec<u64> = ev.iter().map(|e| e.frame).collect();
        assert_eq!(frames, vec![13, 17, 30]);
    }

    #[test]
    fn ties_break_to_earliest_frame() {
        let mut v = vec![0.0; 30];
        v[5] = 0.9;
        v[6] = 0.9;
        v[7] = 0.9;
        v[8] = 0.5;
        v[9] = 0.5;
        v[10] = 0.5;
        let ev = extract_hits(&stream(v), &ExtractionConfig::default()).unwrap();
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].frame, 5);
    }

    #[test]
    fn merge_examples() {
        let a = stream(vec![0.0, 1.0]);
        let b = stream(vec![1.0, 0.0]);
        assert_eq!(merge_streams(core::slice::from_ref(&a)).unwrap(), a);
        assert_eq!(merge_streams(&[a.clone(), a.clone(), a.clone()]).unwrap(), a);
        assert_eq!(merge_streams(&[a.clone(), b]).unwrap().probs, vec![0.5, 0.5]);
        assert!(matches!(
            merge_streams(&[a.clone(), stream(vec![0.2])]),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(merge_streams(&[]), Err(Error::Empty("stream list")));
        let other = ProbabilityStream::new("q", vec![0.1, 0.2]).unwrap();
        assert!(matches!(
            merge_streams(&[a, other]),
            Err(Error::RallyIdMismatch { .. })
        ));
    }

    #[test]
    fn shot_rows() {
        let d = Domains::default();
        assert!(to_shot_rows("r", &[], &d).unwrap().is_empty());
        let ev: Vec<HitEvent> = [12, 50, 88]
            .iter()
            .map(|&frame| HitEvent {
                frame,
                peak_prob: 1.0,
            })
            .collect();
        let r = to_shot_rows("r", &ev, &d).unwrap();
        let got: Vec<(u32, u64)> = r.shots.iter().map(|s| (s.shot_seq, s.hit_frame)).collect();
        assert_eq!(got, vec![(1, 12), (2, 50), (3, 88)]);
        assert!(crate::rally::validate(&r).is_valid());

        let dup = [ev[0], ev[0]];
        assert_eq!(
            to_shot_rows("r", &dup, &d),
            Err(Error::UnsortedEvents { index: 1 })
        );
    }

    proptest! {
        #[test]
        fn extracted_events_respect_invariants(
            probs in prop::collection::vec(0.0f64..=1.0, 1..200),
            q in 0.05f64..0.95,
            gap in 1u64..8,
        ) {
            let s = stream(probs.clone());
            let cfg = ExtractionConfig { quantile: q, min_gap: gap };
            let thr = quantile_threshold(&s, q).unwrap();
            prop_assert!((thr - quantile_oracle(&probs, q)).abs() < 1e-12);
            let ev = extract_hits(&s, &cfg).unwrap();
            for w in ev.windows(2) {
                prop_assert!(w[1].frame > w[0].frame + gap);
            }
            for e in &ev {
                prop_assert!(e.peak_prob >= thr);
                prop_assert_eq!(e.peak_prob, probs[e.frame as usize]);
            }
        }

        #[test]
        fn scaling_keeps_events(
            probs in prop::collection::vec(0.0f64..=1.0, 2..150),
            c in 0.01f64..=1.0,
        ) {
            let range = probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - probs.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assume!(range * c > 1e-6);
            let cfg = ExtractionConfig::default();
            let a = extract_hits(&stream(probs.clone()), &cfg).unwrap();
            let scaled: Vec<f64> = probs.iter().map(|p| p * c).collect();
            let b = extract_hits(&stream(scaled), &cfg).unwrap();
            let fa: Vec<u64> = a.iter().map(|e| e.frame).collect();
            let fb: Vec<u64> = b.iter().map(|e| e.frame).collect();
            prop_assert_eq!(fa, fb);
        }

        #[test]
        fn merge_is_permutation_invariant(
            rows in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 12), 1..6),
            rot in 0usize..6,
        ) {
            let streams: Vec<ProbabilityStream> = rows.iter().map(|r| stream(r.clone())).collect();
            let mut shuffled = streams.clone();
            let len = shuffled.len();
            shuffled.rotate_left(rot % len);
            shuffled.reverse();
            prop_assert_eq!(merge_streams(&streams).unwrap(), merge_streams(&shuffled).unwrap());
        }
    }
}
