//! Upstream model outputs: detection, pose and class-probability JSON lines,
//! and the trajectory CSV.

use std::path::Path;

use serde::{Deserialize, Serialize};

use rallykit_core::assembly::{
    Attribute, BBox, ClassProbs, DetectionBundle, Keypoint, Pose, POSE_KEYPOINTS,
};
use rallykit_core::rally::Point;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectionKind {
    Player,
    Ball,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub frame: u64,
    pub kind: DetectionKind,
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    #[serde(default = "one")]
    pub conf: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    pub frame: u64,
    #[serde(rename = "box")]
    pub bbox: [f64; 4],
    pub kp: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassProbRecord {
    pub shot_seq: u32,
    pub attribute: String,
    pub probs: Vec<f64>,
}

/// Parses one JSON object per non-blank line.
pub fn parse_jsonl<T: serde::de::DeserializeOwned>(text: &str, path: &Path) -> Result<Vec<T>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::parse(path, i + 1, e.to_string())))
        .collect()
}

/// Player boxes kept per frame; extra detections (officials, spectators) are
/// dropped by confidence.
pub const MAX_PLAYERS: usize = 2;

/// Builds a bundle from detections. Per frame, the two most confident player
/// boxes and the most confident ball are kept; a ball is the center of its
/// box.
pub fn bundle_from_detections(records: &[DetectionRecord]) -> Result<DetectionBundle> {
    let mut bundle = DetectionBundle::new(0);
    let mut players: std::collections::BTreeMap<u64, Vec<(f64, BBox)>> = Default::default();
    let mut balls: std::collections::BTreeMap<u64, (f64, Point)> = Default::default();
    for r in records {
        let b = BBox::new(r.x1, r.y1, r.x2, r.y2);
        if !b.is_valid() || ![r.x1, r.y1, r.x2, r.y2, r.conf].iter().all(|v| v.is_finite()) {
            return Err(Error::parse(
                "",
                0,
                format!("frame {}: bad box ({}, {}, {}, {})", r.frame, r.x1, r.y1, r.x2, r.y2),
            ));
        }
        bundle.frame_mut(r.frame);
        match r.kind {
            DetectionKind::Player => players.entry(r.frame).or_default().push((r.conf, b)),
            DetectionKind::Ball => {
                let e = balls.entry(r.frame).or_insert((f64::NEG_INFINITY, b.center()));
                if r.conf > e.0 {
                    *e = (r.conf, b.center());
                }
            }
        }
    }
    for (frame, mut list) in players {
        // Stable sort keeps file order among equal confidences.
        list.sort_by(|a, b| b.0.total_cmp(&a.0));
        list.truncate(MAX_PLAYERS);
        bundle.frame_mut(frame).players = list.into_iter().map(|(_, b)| b).collect();
    }
    for (frame, (_, p)) in balls {
        bundle.frame_mut(frame).ball = Some(p);
    }
    Ok(bundle)
}

/// Adds trajectory points from `frame,x,y,visible` rows; invisible rows are
/// recorded as frames without a point.
pub fn add_track_csv(bundle: &mut DetectionBundle, text: &str, path: &Path) -> Result<()> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "frame,x,y,visible" => {}
        _ => return Err(Error::parse(path, 1, "header must be `frame,x,y,visible`")),
    }
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = raw.split(',').map(str::trim).collect();
        let bad = || Error::parse(path, line, format!("bad track row `{raw}`"));
        if cells.len() != 4 {
            return Err(bad());
        }
        let frame: u64 = cells[0].parse().map_err(|_| bad())?;
        let x: f64 = cells[1].parse().map_err(|_| bad())?;
        let y: f64 = cells[2].parse().map_err(|_| bad())?;
        let visible = match cells[3] {
            "0" => false,
            "1" => true,
            _ => return Err(bad()),
        };
        let f = bundle.frame_mut(frame);
        if visible {
            if !(x.is_finite() && y.is_finite()) {
                return Err(bad());
            }
            f.track = Some(Point::new(x, y));
        }
    }
    Ok(())
}

pub fn add_poses(bundle: &mut DetectionBundle, records: &[PoseRecord]) -> Result<()> {
    for r in records {
        if !r.kp.is_empty() && r.kp.len() != POSE_KEYPOINTS {
            return Err(Error::parse(
                "",
                0,
                format!("frame {}: pose has {} keypoints, expected 17", r.frame, r.kp.len()),
            ));
        }
        let [x1, y1, x2, y2] = r.bbox;
        let bbox = BBox::new(x1, y1, x2, y2);
        if !bbox.is_valid() {
            return Err(Error::parse("", 0, format!("frame {}: bad pose box", r.frame)));
        }
        let keypoints = r
            .kp
            .iter()
            .map(|&[x, y, conf]| Keypoint { x, y, conf })
            .collect();
        bundle.frame_mut(r.frame).poses.push(Pose { bbox, keypoints });
    }
    Ok(())
}

pub fn class_probs_from_records(records: &[ClassProbRecord]) -> Result<ClassProbs> {
    let mut probs = ClassProbs::default();
    for r in records {
        let attr = Attribute::from_name(&r.attribute).ok_or_else(|| {
            Error::parse("", 0, format!("shot {}: unknown attribute `{}`", r.shot_seq, r.attribute))
        })?;
        probs.push(r.shot_seq, attr, r.probs.clone());
    }
    Ok(probs)
}

pub fn read_detections(path: &Path) -> Result<DetectionBundle> {
    let records: Vec<DetectionRecord> = parse_jsonl(&super::read_text(path)?, path)?;
    bundle_from_detections(&records).map_err(|e| e.in_file(path))
}

pub fn read_track(bundle: &mut DetectionBundle, path: &Path) -> Result<()> {
    add_track_csv(bundle, &super::read_text(path)?, path)
}

pub fn read_poses(bundle: &mut DetectionBundle, path: &Path) -> Result<()> {
    let records: Vec<PoseRecord> = parse_jsonl(&super::read_text(path)?, path)?;
    add_poses(bundle, &records).map_err(|e| e.in_file(path))
}

pub fn read_class_probs(path: &Path) -> Result<ClassProbs> {
    let records: Vec<ClassProbRecord> = parse_jsonl(&super::read_text(path)?, path)?;
    class_probs_from_records(&records).map_err(|e| e.in_file(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detections_keep_two_best_players_and_best_ball() {
        let text = r#"
{"frame": 3, "kind": "player", "x1": 0, "y1": 0, "x2": 10, "y2": 20, "conf": 0.9}
{"frame": 3, "kind": "player", "x1": 50, "y1": 50, "x2": 60, "y2": 80, "conf": 0.3}
{"frame": 3, "kind": "player", "x1": 100, "y1": 300, "x2": 140, "y2": 400, "conf": 0.8}
{"frame": 3, "kind": "ball", "x1": 7, "y1": 9, "x2": 7, "y2": 9, "conf": 0.4}
{"frame": 3, "kind": "ball", "x1": 70, "y1": 90, "x2": 72, "y2": 92, "conf": 0.6}
"#;
        let recs: Vec<DetectionRecord> = parse_jsonl(text, Path::new("d.jsonl")).unwrap();
        let b = bundle_from_detections(&recs).unwrap();
        assert_eq!(b.frames, 4);
        let f = b.frame(3).unwrap();
        assert_eq!(f.players, vec![BBox::new(0.0, 0.0, 10.0, 20.0), BBox::new(100.0, 300.0, 140.0, 400.0)]);
        assert_eq!(f.ball, Some(Point::new(71.0, 91.0)));
    }

    #[test]
    fn bad_json_reports_line() {
        let e = parse_jsonl::<DetectionRecord>("{\"frame\":1}\n", Path::new("d.jsonl")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn track_rows() {
        let mut b = DetectionBundle::new(0);
        add_track_csv(&mut b, "frame,x,y,visible\n0,0,0,0\n5,512.5,300,1\n", Path::new("t.csv")).unwrap();
        assert_eq!(b.frames, 6);
        assert_eq!(b.frame(0).unwrap().track, None);
        assert_eq!(b.frame(5).unwrap().track, Some(Point::new(512.5, 300.0)));
        assert!(add_track_csv(&mut b, "frame,x,y,visible\n1,2,3,4\n", Path::new("t.csv")).is_err());
    }

    #[test]
    fn poses_and_probs() {
        let kp: Vec<[f64; 3]> = (0..17).map(|i| [i as f64, 2.0 * i as f64, 0.5]).collect();
        let line = serde_json::json!({"frame": 2, "box": [0, 0, 10, 10], "kp": kp}).to_string();
        let recs: Vec<PoseRecord> = parse_jsonl(&line, Path::new("p.jsonl")).unwrap();
        let mut b = DetectionBundle::new(0);
        add_poses(&mut b, &recs).unwrap();
        assert_eq!(b.frame(2).unwrap().poses[0].keypoints[16].y, 32.0);

        let text = "{\"shot_seq\":1,\"attribute\":\"BallType\",\"probs\":[0.5,0.5]}\n{\"shot_seq\":1,\"attribute\":\"Spin\",\"probs\":[1]}";
        let recs: Vec<ClassProbRecord> = parse_jsonl(text, Path::new("c.jsonl")).unwrap();
        assert!(class_probs_from_records(&recs).is_err());
        let probs = class_probs_from_records(&recs[..1]).unwrap();
        assert_eq!(probs.get(1, Attribute::BallType).unwrap().len(), 1);
    }
}
