//! Rule-based assembly of the submission columns that follow `HitFrame`.
//!
//! Inputs are the outputs of upstream models, already parsed: player and ball
//! detections, trajectory points, poses, and per-shot class probabilities.
//! The rules are deliberately simple:
//!
//! - hitters alternate from the first predicted hitter;
//! - `Landing` takes x from the ball at the hit frame and y from the bottom
//!   edge of the hitter's box, or `(0, 0)` when no ball was seen;
//! - player locations are the box corner nearest the ball, or the feet
//!   midpoint from a pose.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rally::{CategoryRange, Domains, Outcome, Player, Point, Rally};

/// Axis-aligned box in image coordinates (y grows downward).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl BBox {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        BBox { x1, y1, x2, y2 }
    }

    pub fn is_valid(&self) -> bool {
        self.x1 <= self.x2 && self.y1 <= self.y2
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.x1 + self.x2), 0.5 * (self.y1 + self.y2))
    }

    pub fn bottom_center(&self) -> Point {
        Point::new(0.5 * (self.x1 + self.x2), self.y2)
    }

    /// Corners from top-left, clockwise.
    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x1, self.y1),
            Point::new(self.x2, self.y1),
            Point::new(self.x2, self.y2),
            Point::new(self.x1, self.y2),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint {
    pub x: f64,
    pub y: f64,
    pub conf: f64,
}

pub const POSE_KEYPOINTS: usize = 17;

/// One player's pose: 17 keypoints in COCO order plus the detection box.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    pub bbox: BBox,
    pub keypoints: Vec<Keypoint>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrameDetections {
    pub players: Vec<BBox>,
    pub ball: Option<Point>,
    pub track: Option<Point>,
    pub poses: Vec<Pose>,
}

/// Detections for one rally, keyed by frame. Frames without entries have no
/// detections; `frames` is the exclusive upper bound of valid indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DetectionBundle {
    pub frames: u64,
    pub by_frame: BTreeMap<u64, FrameDetections>,
}

impl DetectionBundle {
    pub fn new(frames: u64) -> Self {
        DetectionBundle {
            frames,
            by_frame: BTreeMap::new(),
        }
    }

    pub fn frame(&self, frame: u64) -> Option<&FrameDetections> {
        self.by_frame.get(&frame)
    }

    pub fn frame_mut(&mut self, frame: u64) -> &mut FrameDetections {
        if frame >= self.frames {
            self.frames = frame + 1;
        }
        self.by_frame.entry(frame).or_default()
    }

    pub fn check(&self) -> Result<()> {
        for f in self.by_frame.values() {
            if f.players.iter().chain(f.poses.iter().map(|p| &p.bbox)).any(|b| !b.is_valid()) {
                return Err(Error::InvalidConfig("box corners must satisfy x1<=x2, y1<=y2"));
            }
            if f.poses.iter().any(|p| !p.keypoints.is_empty() && p.keypoints.len() != POSE_KEYPOINTS) {
                return Err(Error::MissingPose);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Attribute {
    Hitter,
    RoundHead,
    Backhand,
    BallHeight,
    BallType,
    Winner,
}

impl Attribute {
    pub const ALL: [Attribute; 6] = [
        Attribute::Hitter,
        Attribute::RoundHead,
        Attribute::Backhand,
        Attribute::BallHeight,
        Attribute::BallType,
        Attribute::Winner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Attribute::Hitter => "Hitter",
            Attribute::RoundHead => "RoundHead",
            Attribute::Backhand => "Backhand",
            Attribute::BallHeight => "BallHeight",
            Attribute::BallType => "BallType",
            Attribute::Winner => "Winner",
        }
    }

    pub fn from_name(name: &str) -> Option<Attribute> {
        Attribute::ALL.into_iter().find(|a| a.name() == name)
    }

    /// Number of classes the probability vectors must have.
    pub fn classes(self, domains: &Domains) -> usize {
        match self {
            Attribute::Hitter => 2,
            Attribute::Winner => Outcome::ALL.len(),
            Attribute::RoundHead => domains.round_head.len(),
            Attribute::Backhand => domains.backhand.len(),
            Attribute::BallHeight => domains.ball_height.len(),
            Attribute::BallType => domains.ball_type.len(),
        }
    }
}

/// Classifier outputs: for each `(shot_seq, attribute)` one probability
/// vector per model (fold).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClassProbs {
    pub entries: BTreeMap<(u32, Attribute), Vec<Vec<f64>>>,
}

impl ClassProbs {
    pub fn push(&mut self, shot_seq: u32, attribute: Attribute, probs: Vec<f64>) {
        self.entries.entry((shot_seq, attribute)).or_default().push(probs);
    }

    pub fn get(&self, shot_seq: u32, attribute: Attribute) -> Option<&[Vec<f64>]> {
        self.entries.get(&(shot_seq, attribute)).map(Vec::as_slice)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CourtSide {
    Top,
    Bottom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocationMode {
    BboxVertex,
    PoseFeet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LandingYSource {
    /// Bottom edge of the hitter's box.
    HitterBox,
    /// The ball's own y.
    Ball,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleMode {
    Mean,
    Vote,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyConfig {
    /// Court half occupied by player `A`.
    pub side_of_a: CourtSide,
    pub location_mode: LocationMode,
    pub ankle_indices: (usize, usize),
    pub min_keypoint_conf: f64,
    pub landing_y_source: LandingYSource,
    pub ensemble: EnsembleMode,
    /// Rewrite hitters to alternate from the first shot's prediction.
    pub alternate_hitters: bool,
    pub domains: Domains,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        AssemblyConfig {
            side_of_a: CourtSide::Bottom,
            location_mode: LocationMode::BboxVertex,
            ankle_indices: (15, 16),
            min_keypoint_conf: 0.1,
            landing_y_source: LandingYSource::HitterBox,
            ensemble: EnsembleMode::Mean,
            alternate_hitters: true,
            domains: Domains::default(),
        }
    }
}

impl AssemblyConfig {
    pub fn check(&self) -> Result<()> {
        if self.ankle_indices.0 >= POSE_KEYPOINTS || self.ankle_indices.1 >= POSE_KEYPOINTS {
            return Err(Error::InvalidConfig("ankle indices must be below 17"));
        }
        Ok(())
    }
}

/// `n` labels starting at `first`, alternating.
pub fn alternate_hitters(first: Player, n: usize) -> Vec<Player> {
    core::iter::successors(Some(first), |p| Some(p.other()))
        .take(n)
        .collect()
}

/// Most frequent label; ties go to the smallest label.
pub fn vote_ensemble<T: Ord + Copy>(labels: &[T]) -> Result<T> {
    let mut counts: BTreeMap<T, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    // BTreeMap iterates in ascending label order; keep the first maximum.
    counts
        .into_iter()
        .fold(None, |best: Option<(T, usize)>, (l, c)| match best {
            Some((_, bc)) if bc >= c => best,
            _ => Some((l, c)),
        })
        .map(|(l, _)| l)
        .ok_or(Error::Empty("label list"))
}

/// Zero-based class index maximizing the element-wise mean; ties go to the
/// smallest index.
pub fn mean_ensemble(vectors: &[Vec<f64>]) -> Result<usize> {
    let first = vectors.first().ok_or(Error::Empty("probability vector list"))?;
    if first.is_empty() {
        return Err(Error::Empty("probability vector"));
    }
    let mut sums = alloc::vec![0.0; first.len()];
    for v in vectors {
        if v.len() != first.len() {
            return Err(Error::LengthMismatch {
                what: "probability vector",
                expected: first.len(),
                found: v.len(),
            });
        }
        for (s, p) in sums.iter_mut().zip(v) {
            *s += p;
        }
    }
    Ok(argmax(&sums))
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Corner of `bbox` closest to `point`; ties resolve to the earliest corner
/// in top-left, top-right, bottom-right, bottom-left order.
pub fn nearest_vertex(bbox: &BBox, point: Point) -> Point {
    let d2 = |c: &Point| {
        let (dx, dy) = (c.x - point.x, c.y - point.y);
        dx * dx + dy * dy
    };
    let corners = bbox.corners();
    let mut best = corners[0];
    for c in &corners[1..] {
        if d2(c) < d2(&best) {
            best = *c;
        }
    }
    best
}

/// Feet position from a pose: midpoint of the ankles, the single confident
/// ankle, or the bottom-center of the pose box when neither is confident.
pub fn foot_position(pose: &Pose, cfg: &AssemblyConfig) -> Result<Point> {
    if pose.keypoints.len() != POSE_KEYPOINTS {
        return Err(Error::MissingPose);
    }
    let (li, ri) = cfg.ankle_indices;
    let (l, r) = (pose.keypoints[li], pose.keypoints[ri]);
    let ok = |k: &Keypoint| k.conf >= cfg.min_keypoint_conf;
    Ok(match (ok(&l), ok(&r)) {
        (true, true) => Point::new(0.5 * (l.x + r.x), 0.5 * (l.y + r.y)),
        (true, false) => Point::new(l.x, l.y),
        (false, true) => Point::new(r.x, r.y),
        (false, false) => pose.bbox.bottom_center(),
    })
}

/// Ball position at `frame`: the trajectory point, else the detection.
pub fn ball_at(bundle: &DetectionBundle, frame: u64) -> Option<Point> {
    bundle.frame(frame).and_then(|f| f.track.or(f.ball))
}

/// `Landing` for a shot: x from the ball at the hit frame, y from the bottom
/// edge of the hitter's box. `(0, 0)` when neither trajectory nor detector saw
/// the ball.
pub fn resolve_landing(
    hit_frame: u64,
    bundle: &DetectionBundle,
    hitter_box: Option<&BBox>,
    y_source: LandingYSource,
) -> Point {
    match ball_at(bundle, hit_frame) {
        None => Point::ORIGIN,
        Some(ball) => {
            let y = match (y_source, hitter_box) {
                (LandingYSource::HitterBox, Some(b)) => b.y2,
                _ => ball.y,
            };
            Point::new(ball.x, y)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoleAssignment {
    pub hitter_box: Option<BBox>,
    pub hitter_location: Point,
    pub defender_location: Point,
    /// Set when the frame did not hold exactly two players.
    pub issue: Option<String>,
}

/// Splits the two player boxes at `hit_frame` into hitter and defender by
/// court half, then locates each player.
pub fn assign_roles_and_locations(
    hitter: Player,
    bundle: &DetectionBundle,
    hit_frame: u64,
    ball: Option<Point>,
    cfg: &AssemblyConfig,
) -> RoleAssignment {
    let players = bundle
        .frame(hit_frame)
        .map(|f| f.players.as_slice())
        .unwrap_or(&[]);
    if players.len() != 2 {
        return RoleAssignment {
            hitter_box: None,
            hitter_location: Point::ORIGIN,
            defender_location: Point::ORIGIN,
            issue: Some(format!(
                "frame {hit_frame}: expected 2 player boxes, found {}",
                players.len()
            )),
        };
    }

    let (top, bottom) = if players[1].center().y < players[0].center().y {
        (players[1], players[0])
    } else {
        (players[0], players[1])
    };
    let hitter_on_bottom = match (hitter, cfg.side_of_a) {
        (Player::A, CourtSide::Bottom) | (Player::B, CourtSide::Top) => true,
        (Player::A, CourtSide::Top) | (Player::B, CourtSide::Bottom) => false,
    };
    let (hitter_box, defender_box) = if hitter_on_bottom {
        (bottom, top)
    } else {
        (top, bottom)
    };

    let locate = |b: &BBox| -> Point {
        match cfg.location_mode {
            LocationMode::BboxVertex => match ball {
                Some(p) => nearest_vertex(b, p),
                None => b.bottom_center(),
            },
            LocationMode::PoseFeet => matching_pose(bundle, hit_frame, b)
                .and_then(|p| foot_position(p, cfg).ok())
                .unwrap_or_else(|| b.bottom_center()),
        }
    };
    RoleAssignment {
        hitter_box: Some(hitter_box),
        hitter_location: locate(&hitter_box),
        defender_location: locate(&defender_box),
        issue: None,
    }
}

/// The pose whose box center is nearest the player box center.
fn matching_pose<'a>(bundle: &'a DetectionBundle, frame: u64, player: &BBox) -> Option<&'a Pose> {
    let c = player.center();
    let d2 = |p: &Pose| {
        let pc = p.bbox.center();
        (pc.x - c.x) * (pc.x - c.x) + (pc.y - c.y) * (pc.y - c.y)
    };
    let mut best: Option<&Pose> = None;
    for p in bundle.frame(frame)?.poses.iter().filter(|p| p.keypoints.len() == POSE_KEYPOINTS) {
        if best.is_none_or(|b| d2(p) < d2(b)) {
            best = Some(p);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assembled {
    pub rally: Rally,
    /// Recoverable problems, e.g. frames without two player boxes.
    pub issues: Vec<String>,
}

fn check_probs(shot_seq: u32, attribute: Attribute, vectors: &[Vec<f64>], classes: usize) -> Result<()> {
    let invalid = |reason| Error::InvalidProbabilities {
        shot_seq,
        attribute: attribute.name(),
        reason,
    };
    for v in vectors {
        if v.len() != classes {
            return Err(invalid("wrong number of classes"));
        }
        if v.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(invalid("negative or non-finite entry"));
        }
        if (v.iter().sum::<f64>() - 1.0).abs() > 1e-6 {
            return Err(invalid("entries do not sum to 1"));
        }
    }
    Ok(())
}

fn classify(probs: &ClassProbs, shot_seq: u32, attribute: Attribute, cfg: &AssemblyConfig) -> Result<usize> {
    let vectors = probs
        .get(shot_seq, attribute)
        .filter(|v| !v.is_empty())
        .ok_or(Error::MissingProbabilities {
            shot_seq,
            attribute: attribute.name(),
        })?;
    check_probs(shot_seq, attribute, vectors, attribute.classes(&cfg.domains))?;
    match cfg.ensemble {
        EnsembleMode::Mean => mean_ensemble(vectors),
        EnsembleMode::Vote => {
            let labels: Vec<usize> = vectors.iter().map(|v| argmax(v)).collect();
            vote_ensemble(&labels)
        }
    }
}

fn category(range: CategoryRange, index: usize) -> u8 {
    range.code(index).unwrap_or(range.min)
}

/// Fills every column after `HitFrame` for the shots in `events`.
pub fn assemble_submission(
    events: &Rally,
    probs: &ClassProbs,
    bundle: &DetectionBundle,
    cfg: &AssemblyConfig,
) -> Result<Assembled> {
    cfg.check()?;
    bundle.check()?;
    let report = crate::rally::validate_with(events, &cfg.domains);
    if let Some(v) = report.first() {
        return Err(Error::InvalidRally(v.clone()));
    }
    for s in &events.shots {
        if s.hit_frame >= bundle.frames {
            return Err(Error::FrameOutOfRange {
                frame: s.hit_frame,
                frames: bundle.frames,
            });
        }
    }

    let n = events.shots.len();
    let mut hitters = Vec::with_capacity(n);
    for (j, s) in events.shots.iter().enumerate() {
        if j == 0 || !cfg.alternate_hitters {
            let idx = classify(probs, s.shot_seq, Attribute::Hitter, cfg)?;
            hitters.push(if idx == 0 { Player::A } else { Player::B });
        }
    }
    if cfg.alternate_hitters {
        if let Some(&first) = hitters.first() {
            hitters = alternate_hitters(first, n);
        }
    }

    let d = cfg.domains;
    let mut issues = Vec::new();
    let mut shots = Vec::with_capacity(n);
    for (j, (src, &hitter)) in events.shots.iter().zip(&hitters).enumerate() {
        let seq = src.shot_seq;
        let mut shot = src.clone();
        shot.hitter = hitter;
        shot.round_head = category(d.round_head, classify(probs, seq, Attribute::RoundHead, cfg)?);
        shot.backhand = category(d.backhand, classify(probs, seq, Attribute::Backhand, cfg)?);
        shot.ball_height = category(d.ball_height, classify(probs, seq, Attribute::BallHeight, cfg)?);
        shot.ball_type = category(d.ball_type, classify(probs, seq, Attribute::BallType, cfg)?);
        shot.winner = if j + 1 == n {
            Some(Outcome::ALL[classify(probs, seq, Attribute::Winner, cfg)?])
        } else {
            None
        };

        let ball = ball_at(bundle, shot.hit_frame);
        let roles = assign_roles_and_locations(hitter, bundle, shot.hit_frame, ball, cfg);
        if let Some(issue) = roles.issue.clone() {
            issues.push(format!("shot {seq}: {issue}"));
        }
        shot.landing = resolve_landing(
            shot.hit_frame,
            bundle,
            roles.hitter_box.as_ref(),
            cfg.landing_y_source,
        );
        shot.hitter_location = roles.hitter_location;
        shot.defender_location = roles.defender_location;
        for p in [&mut shot.landing, &mut shot.hitter_location, &mut shot.defender_location] {
            // Detections may poke past the image edge.
            p.x = p.x.max(0.0);
            p.y = p.y.max(0.0);
        }
        shots.push(shot);
    }

    Ok(Assembled {
        rally: Rally::new(events.id.clone(), shots),
        issues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn alternation() {
        use Player::*;
        assert_eq!(alternate_hitters(A, 4), vec![A, B, A, B]);
        assert_eq!(alternate_hitters(B, 1), vec![B]);
        assert!(alternate_hitters(A, 0).is_empty());
    }

    #[test]
    fn voting() {
        assert_eq!(vote_ensemble(&[2, 2, 1, 2, 3]).unwrap(), 2);
        assert_eq!(vote_ensemble(&[1, 2]).unwrap(), 1);
        assert_eq!(vote_ensemble(&[2, 1]).unwrap(), 1);
        assert_eq!(vote_ensemble(&[7; 5]).unwrap(), 7);
        assert_eq!(vote_ensemble::<u8>(&[]), Err(Error::Empty("label list")));
    }

    #[test]
    fn mean_ensembling() {
        assert_eq!(mean_ensemble(&[vec![0.0255, 0.9745]]).unwrap() + 1, 2);
        let v = vec![0.2, 0.5, 0.3];
        assert_eq!(mean_ensemble(&[v.clone(), v.clone(), v.clone()]).unwrap(), 1);
        assert_eq!(mean_ensemble(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(), 0);
        assert!(matches!(
            mean_ensemble(&[vec![1.0, 0.0], vec![1.0]]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    /// Brute force over the four corners in tie-break order.
    fn nearest_oracle(b: &BBox, p: Point) -> Point {
        let cs = [(b.x1, b.y1), (b.x2, b.y1), (b.x2, b.y2), (b.x1, b.y2)];
        let mut best = (f64::INFINITY, Point::ORIGIN);
        for (x, y) in cs {
            let d = libm::sqrt((x - p.x) * (x - p.x) + (y - p.y) * (y - p.y));
            if d < best.0 {
                best = (d, Point::new(x, y));
            }
        }
        best.1
    }

    #[test]
    fn vertices() {
        let b = BBox::new(0.0, 0.0, 10.0, 10.0);
        assert_eq!(nearest_vertex(&b, Point::new(100.0, 100.0)), Point::new(10.0, 10.0));
        assert_eq!(nearest_vertex(&b, Point::new(5.0, 5.0)), Point::new(0.0, 0.0));
        let p = Point::new(-5.0, 3.0);
        assert_eq!(nearest_vertex(&b, p), nearest_oracle(&b, p));
        assert_eq!(nearest_vertex(&b, p), Point::new(0.0, 0.0));
        for i in 0..40 {
            for j in 0..40 {
                let p = Point::new(i as f64 * 0.7 - 8.0, j as f64 * 0.65 - 6.0);
                assert_eq!(nearest_vertex(&b, p), nearest_oracle(&b, p));
            }
        }
    }

    fn pose(bbox: BBox, left: Keypoint, right: Keypoint) -> Pose {
        let mut kps = vec![
            Keypoint {
                x: 0.0,
                y: 0.0,
                conf: 0.9
            };
            POSE_KEYPOINTS
        ];
        kps[15] = left;
        kps[16] = right;
        Pose { bbox, keypoints: kps }
    }

    fn kp(x: f64, y: f64, conf: f64) -> Keypoint {
        Keypoint { x, y, conf }
    }

    #[test]
    fn feet() {
        let cfg = AssemblyConfig::default();
        let b = BBox::new(0.0, 20.0, 40.0, 120.0);
        let p = pose(b, kp(10.0, 100.0, 0.9), kp(20.0, 100.0, 0.8));
        assert_eq!(foot_position(&p, &cfg).unwrap(), Point::new(15.0, 100.0));
        let p = pose(b, kp(10.0, 100.0, 0.0), kp(20.0, 104.0, 0.8));
        assert_eq!(foot_position(&p, &cfg).unwrap(), Point::new(20.0, 104.0));
        let p = pose(b, kp(10.0, 100.0, 0.05), kp(20.0, 104.0, 0.02));
        assert_eq!(foot_position(&p, &cfg).unwrap(), Point::new(20.0, 120.0));
        let broken = Pose {
            bbox: b,
            keypoints: vec![],
        };
        assert_eq!(foot_position(&broken, &cfg), Err(Error::MissingPose));
    }

    fn two_player_bundle() -> DetectionBundle {
        let mut bundle = DetectionBundle::new(100);
        let f = bundle.frame_mut(30);
        f.players = vec![
            BBox::new(400.0, 500.0, 480.0, 650.0), // bottom
            BBox::new(600.0, 100.0, 660.0, 200.0), // top
        ];
        bundle
    }

    #[test]
    fn landing_rules() {
        let mut bundle = two_player_bundle();
        let hb = BBox::new(400.0, 500.0, 480.0, 603.0);
        assert_eq!(
            resolve_landing(30, &bundle, Some(&hb), LandingYSource::HitterBox),
            Point::ORIGIN
        );
        bundle.frame_mut(30).ball = Some(Point::new(400.0, 300.0));
        let hb2 = BBox::new(400.0, 500.0, 480.0, 650.0);
        assert_eq!(
            resolve_landing(30, &bundle, Some(&hb2), LandingYSource::HitterBox),
            Point::new(400.0, 650.0)
        );
        bundle.frame_mut(30).track = Some(Point::new(512.0, 280.0));
        assert_eq!(
            resolve_landing(30, &bundle, Some(&hb), LandingYSource::HitterBox),
            Point::new(512.0, 603.0)
        );
        assert_eq!(
            resolve_landing(30, &bundle, Some(&hb), LandingYSource::Ball),
            Point::new(512.0, 280.0)
        );
    }

    #[test]
    fn roles_by_court_half() {
        let bundle = two_player_bundle();
        let cfg = AssemblyConfig::default();
        let ball = Some(Point::new(0.0, 1000.0));
        let r = assign_roles_and_locations(Player::A, &bundle, 30, ball, &cfg);
        assert_eq!(r.hitter_box, Some(BBox::new(400.0, 500.0, 480.0, 650.0)));
        assert_eq!(r.hitter_location, Point::new(400.0, 650.0));
        assert_eq!(r.defender_location, Point::new(600.0, 200.0));
        let r = assign_roles_and_locations(Player::B, &bundle, 30, ball, &cfg);
        assert_eq!(r.hitter_box, Some(BBox::new(600.0, 100.0, 660.0, 200.0)));
        let top = AssemblyConfig {
            side_of_a: CourtSide::Top,
            ..cfg
        };
        let r = assign_roles_and_locations(Player::A, &bundle, 30, ball, &top);
        assert_eq!(r.hitter_box, Some(BBox::new(600.0, 100.0, 660.0, 200.0)));
    }

    #[test]
    fn roles_with_poses() {
        let mut bundle = two_player_bundle();
        let f = bundle.frame_mut(30);
        f.poses.push(pose(
            BBox::new(598.0, 98.0, 662.0, 202.0),
            kp(610.0, 195.0, 0.9),
            kp(640.0, 199.0, 0.9),
        ));
        f.poses.push(pose(
            BBox::new(401.0, 502.0, 478.0, 648.0),
            kp(420.0, 640.0, 0.9),
            kp(450.0, 646.0, 0.9),
        ));
        let cfg = AssemblyConfig {
            location_mode: LocationMode::PoseFeet,
            ..Default::default()
        };
        let r = assign_roles_and_locations(Player::A, &bundle, 30, None, &cfg);
        assert_eq!(r.hitter_location, Point::new(435.0, 643.0));
        assert_eq!(r.defender_location, Point::new(625.0, 197.0));
    }

    #[test]
    fn missing_player_falls_back() {
        let mut bundle = two_player_bundle();
        bundle.frame_mut(30).players.pop();
        let r = assign_roles_and_locations(Player::A, &bundle, 30, None, &Default::default());
        assert_eq!(r.hitter_location, Point::ORIGIN);
        assert_eq!(r.defender_location, Point::ORIGIN);
        assert!(r.issue.is_some());
    }

    fn full_probs(n: u32, first_hitter: usize) -> ClassProbs {
        let mut p = ClassProbs::default();
        for seq in 1..=n {
            // Per-shot hitter predictions deliberately disagree with alternation.
            let h = if seq == 1 { first_hitter } else { 0 };
            let mut hv = vec![0.1, 0.1];
            hv[h] = 0.9;
            p.push(seq, Attribute::Hitter, hv);
            p.push(seq, Attribute::RoundHead, vec![0.3, 0.7]);
            p.push(seq, Attribute::Backhand, vec![0.6, 0.4]);
            p.push(seq, Attribute::BallHeight, vec![0.5, 0.5]);
            let mut bt = vec![0.0; 9];
            bt[(seq as usize) % 9] = 1.0;
            p.push(seq, Attribute::BallType, bt);
            p.push(seq, Attribute::Winner, vec![0.2, 0.7, 0.1]);
        }
        p
    }

    fn events(frames: &[u64]) -> Rally {
        let d = Domains::default();
        let shots = frames
            .iter()
            .enumerate()
            .map(|(i, &f)| crate::rally::Shot::placeholder(i as u32 + 1, f, &d))
            .collect();
        Rally::new("r", shots)
    }

    #[test]
    fn assemble_first_hitter_seeds_alternation() {
        let ev = events(&[10, 30, 60]);
        let bundle = DetectionBundle::new(100);
        let out = assemble_submission(&ev, &full_probs(3, 1), &bundle, &Default::default()).unwrap();
        let hitters: Vec<Player> = out.rally.shots.iter().map(|s| s.hitter).collect();
        assert_eq!(hitters, vec![Player::B, Player::A, Player::B]);
        assert!(out.rally.shots.iter().all(|s| s.landing == Point::ORIGIN));
        let winners: Vec<Option<Outcome>> = out.rally.shots.iter().map(|s| s.winner).collect();
        assert_eq!(winners, vec![None, None, Some(Outcome::B)]);
        assert_eq!(out.rally.shots[0].round_head, 2);
        assert_eq!(out.rally.shots[0].backhand, 1);
        assert_eq!(out.rally.shots[0].ball_height, 1);
        assert_eq!(out.rally.shots[0].ball_type, 2);
        assert!(crate::rally::validate(&out.rally).is_valid());
        assert_eq!(out.issues.len(), 3);

        let per_shot = AssemblyConfig {
            alternate_hitters: false,
            ..Default::default()
        };
        let out = assemble_submission(&ev, &full_probs(3, 1), &bundle, &per_shot).unwrap();
        let hitters: Vec<Player> = out.rally.shots.iter().map(|s| s.hitter).collect();
        assert_eq!(hitters, vec![Player::B, Player::A, Player::A]);
    }

    #[test]
    fn assemble_errors() {
        let ev = events(&[10, 30]);
        let bundle = DetectionBundle::new(20);
        assert_eq!(
            assemble_submission(&ev, &full_probs(2, 0), &bundle, &Default::default()),
            Err(Error::FrameOutOfRange { frame: 30, frames: 20 })
        );
        let bundle = DetectionBundle::new(100);
        let mut probs = full_probs(2, 0);
        probs.entries.remove(&(2, Attribute::BallType));
        assert_eq!(
            assemble_submission(&ev, &probs, &bundle, &Default::default()),
            Err(Error::MissingProbabilities {
                shot_seq: 2,
                attribute: "BallType"
            })
        );
        let mut probs = full_probs(2, 0);
        probs.push(1, Attribute::RoundHead, vec![0.7, 0.7]);
        assert!(matches!(
            assemble_submission(&ev, &probs, &bundle, &Default::default()),
            Err(Error::InvalidProbabilities { .. })
        ));
    }
}
