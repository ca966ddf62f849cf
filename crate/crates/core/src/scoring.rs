//! Competition scoring.
//!
//! A rally earns nothing unless the predicted shot count matches. When it
//! does, the rally earns 0.1 plus the average per-shot content score. Each
//! shot whose `HitFrame` is within tolerance earns a 0.1 base plus fixed
//! weights for every matching column, up to 0.9.
//!
//! Weights are kept as integer hundredths and sums are formed on integers,
//! so a fully correct shot is exactly `0.9` and a fully correct rally exactly
//! `1.0` in `f64`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rally::{Point, Rally, Shot};

/// A scored column of the submission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Column {
    HitFrame,
    Hitter,
    BallHeight,
    Landing,
    HitterLocation,
    DefenderLocation,
    Backhand,
    RoundHead,
    BallType,
    Winner,
}

impl Column {
    pub const ALL: [Column; 10] = [
        Column::HitFrame,
        Column::Hitter,
        Column::BallHeight,
        Column::Landing,
        Column::HitterLocation,
        Column::DefenderLocation,
        Column::Backhand,
        Column::RoundHead,
        Column::BallType,
        Column::Winner,
    ];

    /// Weight in hundredths of a point. `HitFrame` is the base awarded when
    /// the frame gate passes.
    pub const fn weight_hundredths(self) -> u32 {
        match self {
            Column::HitFrame => 10,
            Column::Hitter => 10,
            Column::BallHeight => 10,
            Column::Landing => 10,
            Column::HitterLocation => 5,
            Column::DefenderLocation => 5,
            Column::Backhand => 5,
            Column::RoundHead => 5,
            Column::BallType => 20,
            Column::Winner => 10,
        }
    }

    pub fn weight(self) -> f64 {
        f64::from(self.weight_hundredths()) / 100.0
    }

    pub fn name(self) -> &'static str {
        match self {
            Column::HitFrame => "HitFrame",
            Column::Hitter => "Hitter",
            Column::BallHeight => "BallHeight",
            Column::Landing => "Landing",
            Column::HitterLocation => "HitterLocation",
            Column::DefenderLocation => "DefenderLocation",
            Column::Backhand => "Backhand",
            Column::RoundHead => "RoundHead",
            Column::BallType => "BallType",
            Column::Winner => "Winner",
        }
    }
}

/// Sum of all column weights in hundredths (0.9 points).
pub const MAX_SHOT_HUNDREDTHS: u32 = {
    let mut sum = 0;
    let mut i = 0;
    while i < Column::ALL.len() {
        sum += Column::ALL[i].weight_hundredths();
        i += 1;
    }
    sum
};

/// Base awarded for a correct shot count, in hundredths.
pub const COUNT_GATE_HUNDREDTHS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoringConfig {
    /// Largest accepted |HitFrame error| in frames.
    pub hit_frame_tolerance: u64,
    pub landing_threshold: f64,
    pub location_threshold: f64,
    /// Accept distances equal to the threshold (`<=`) instead of strict `<`.
    pub inclusive_distance: bool,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            hit_frame_tolerance: 2,
            landing_threshold: 6.0,
            location_threshold: 10.0,
            inclusive_distance: false,
        }
    }
}

impl ScoringConfig {
    pub fn inclusive(mut self, inclusive: bool) -> Self {
        self.inclusive_distance = inclusive;
        self
    }

    pub fn check(&self) -> Result<()> {
        let positive = |t: f64| t.is_finite() && t > 0.0;
        if !positive(self.landing_threshold) || !positive(self.location_threshold) {
            return Err(Error::InvalidConfig("distance thresholds must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShotScore {
    /// The HitFrame gate passed.
    pub gated: bool,
    /// Earned weight per column; every column is present when gated, none
    /// otherwise.
    pub terms: BTreeMap<Column, f64>,
    pub total: f64,
    /// `total` in hundredths of a point.
    pub hundredths: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RallyScore {
    pub count_gate: bool,
    /// Average shot score.
    pub ass: f64,
    pub total: f64,
    pub per_shot: Vec<ShotScore>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreReport {
    pub per_rally: BTreeMap<String, RallyScore>,
    pub total: f64,
    /// Non-fatal findings: missing or unexpected prediction rallies.
    pub warnings: Vec<String>,
}

/// Euclidean distance test against `threshold`, compared in squared form so
/// integer pixel coordinates are decided exactly.
pub fn dist_within(p: Point, q: Point, threshold: f64, inclusive: bool) -> bool {
    let (dx, dy) = (p.x - q.x, p.y - q.y);
    let d2 = dx * dx + dy * dy;
    let t2 = threshold * threshold;
    if inclusive {
        d2 <= t2
    } else {
        d2 < t2
    }
}

/// Scores one predicted shot against ground truth. `is_last` selects the
/// winner rule: the last shot compares labels, earlier shots earn the term
/// only when the prediction leaves the winner empty.
pub fn shot_score(gt: &Shot, pred: &Shot, is_last: bool, cfg: &ScoringConfig) -> ShotScore {
    if gt.hit_frame.abs_diff(pred.hit_frame) > cfg.hit_frame_tolerance {
        return ShotScore::default();
    }

    let near = |a: Point, b: Point, t: f64| dist_within(a, b, t, cfg.inclusive_distance);
    let winner_ok = if is_last {
        gt.winner == pred.winner
    } else {
        pred.winner.is_none()
    };

    let mut terms = BTreeMap::new();
    let mut hundredths = 0;
    for column in Column::ALL {
        let earned = match column {
            Column::HitFrame => true,
            Column::Hitter => gt.hitter == pred.hitter,
            Column::BallHeight => gt.ball_height == pred.ball_height,
            Column::Landing => near(gt.landing, pred.landing, cfg.landing_threshold),
            Column::HitterLocation => near(
                gt.hitter_location,
                pred.hitter_location,
                cfg.location_threshold,
            ),
            Column::DefenderLocation => near(
                gt.defender_location,
                pred.defender_location,
                cfg.location_threshold,
            ),
            Column::Backhand => gt.backhand == pred.backhand,
            Column::RoundHead => gt.round_head == pred.round_head,
            Column::BallType => gt.ball_type == pred.ball_type,
            Column::Winner => winner_ok,
        };
        let w = if earned { column.weight_hundredths() } else { 0 };
        hundredths += w;
        terms.insert(column, f64::from(w) / 100.0);
    }

    ShotScore {
        gated: true,
        terms,
        total: f64::from(hundredths) / 100.0,
        hundredths,
    }
}

/// Scores a predicted rally. Shots are paired by position.
pub fn rally_score(gt: &Rally, pred: &Rally, cfg: &ScoringConfig) -> RallyScore {
    let n = gt.shots.len();
    if n != pred.shots.len() {
        return RallyScore {
            count_gate: false,
            ass: 0.0,
            total: 0.0,
            per_shot: Vec::new(),
        };
    }
    if n == 0 {
        return RallyScore {
            count_gate: true,
            ass: 0.0,
            total: f64::from(COUNT_GATE_HUNDREDTHS) / 100.0,
            per_shot: Vec::new(),
        };
    }

    let per_shot: Vec<ShotScore> = gt
        .shots
        .iter()
        .zip(&pred.shots)
        .enumerate()
        .map(|(j, (g, p))| shot_score(g, p, j + 1 == n, cfg))
        .collect();
    let earned: u64 = per_shot.iter().map(|s| u64::from(s.hundredths)).sum();
    let n = n as u64;
    let denom = (100 * n) as f64;
    RallyScore {
        count_gate: true,
        ass: earned as f64 / denom,
        total: (u64::from(COUNT_GATE_HUNDREDTHS) * n + earned) as f64 / denom,
        per_shot,
    }
}

/// Scores every ground-truth rally against the prediction with the same id.
/// A missing prediction scores 0; a prediction with no ground truth is
/// reported and left out of the mean.
pub fn dataset_score(gt: &[Rally], pred: &[Rally], cfg: &ScoringConfig) -> Result<ScoreReport> {
    let mut gt_by_id: BTreeMap<&str, &Rally> = BTreeMap::new();
    for r in gt {
        if gt_by_id.insert(&r.id, r).is_some() {
            return Err(Error::DuplicateRallyId(r.id.clone()));
        }
    }
    let mut pred_by_id: BTreeMap<&str, &Rally> = BTreeMap::new();
    for r in pred {
        if pred_by_id.insert(&r.id, r).is_some() {
            return Err(Error::DuplicateRallyId(r.id.clone()));
        }
    }

    let mut report = ScoreReport::default();
    for id in pred_by_id.keys() {
        if !gt_by_id.contains_key(id) {
            report
                .warnings
                .push(format!("prediction for unknown rally `{id}` ignored"));
        }
    }
    for (id, g) in &gt_by_id {
        let score = match pred_by_id.get(id) {
            Some(p) => rally_score(g, p, cfg),
            None => {
                report
                    .warnings
                    .push(format!("no prediction for rally `{id}`; scored 0"));
                RallyScore {
                    count_gate: false,
                    ass: 0.0,
                    total: 0.0,
                    per_shot: Vec::new(),
                }
            }
        };
        report.per_rally.insert(String::from(*id), score);
    }

    let totals: Vec<f64> = report.per_rally.values().map(|r| r.total).collect();
    report.total = if totals.is_empty() {
        0.0
    } else {
        pairwise_sum(&totals) / totals.len() as f64
    };
    Ok(report)
}

pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}
