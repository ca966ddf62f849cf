//! Shot and rally data model.
//!
//! A [`Rally`] is the scoring unit: one video clip, an ordered list of
//! [`Shot`]s. Invariants are checked by [`validate`], which reports every
//! violation as data instead of failing.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

/// Image-space point in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    A,
    B,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::A => Player::B,
            Player::B => Player::A,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Player::A => "A",
            Player::B => "B",
        }
    }
}

impl FromStr for Player {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "A" => Ok(Player::A),
            "B" => Ok(Player::B),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rally outcome label carried by the `Winner` column. `X` marks a rally
/// that ended without a winner (faults and the like).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    A,
    B,
    X,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::A, Outcome::B, Outcome::X];

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::A => "A",
            Outcome::B => "B",
            Outcome::X => "X",
        }
    }
}

impl FromStr for Outcome {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "A" => Ok(Outcome::A),
            "B" => Ok(Outcome::B),
            "X" => Ok(Outcome::X),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Inclusive range of integer category codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CategoryRange {
    pub min: u8,
    pub max: u8,
}

impl CategoryRange {
    pub const fn new(min: u8, max: u8) -> Self {
        CategoryRange { min, max }
    }

    pub fn contains(&self, v: u8) -> bool {
        (self.min..=self.max).contains(&v)
    }

    /// Number of categories; zero when `min > max`.
    pub fn len(&self) -> usize {
        if self.min > self.max {
            0
        } else {
            usize::from(self.max - self.min) + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Category code for a zero-based index into the domain.
    pub fn code(&self, index: usize) -> Option<u8> {
        (index < self.len()).then(|| self.min + index as u8)
    }
}

/// Declared category domains. The defaults are conventions of the
/// competition data (two-valued flags, nine ball types), not fixed facts, so
/// they can be overridden.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Domains {
    pub round_head: CategoryRange,
    pub backhand: CategoryRange,
    pub ball_height: CategoryRange,
    pub ball_type: CategoryRange,
}

impl Default for Domains {
    fn default() -> Self {
        Domains {
            round_head: CategoryRange::new(1, 2),
            backhand: CategoryRange::new(1, 2),
            ball_height: CategoryRange::new(1, 2),
            ball_type: CategoryRange::new(1, 9),
        }
    }
}

/// One hit event: a row of the submission file.
#[derive(Debug, Clone, PartialEq)]
pub struct Shot {
    pub shot_seq: u32,
    pub hit_frame: u64,
    pub hitter: Player,
    pub round_head: u8,
    pub backhand: u8,
    pub ball_height: u8,
    pub landing: Point,
    pub hitter_location: Point,
    pub defender_location: Point,
    pub ball_type: u8,
    pub winner: Option<Outcome>,
}

impl Shot {
    /// A shot with only sequence number and frame set; every attribute column
    /// holds the lowest category code and coordinates sit at the origin.
    pub fn placeholder(shot_seq: u32, hit_frame: u64, domains: &Domains) -> Self {
        Shot {
            shot_seq,
            hit_frame,
            hitter: Player::A,
            round_head: domains.round_head.min,
            backhand: domains.backhand.min,
            ball_height: domains.ball_height.min,
            landing: Point::ORIGIN,
            hitter_location: Point::ORIGIN,
            defender_location: Point::ORIGIN,
            ball_type: domains.ball_type.min,
            winner: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Rally {
    pub id: String,
    pub shots: Vec<Shot>,
}

impl Rally {
    pub fn new(id: impl Into<String>, shots: Vec<Shot>) -> Self {
        Rally {
            id: id.into(),
            shots,
        }
    }

    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shots.is_empty()
    }
}

/// Invariant checked by [`validate`]. Variants are declared in identifier
/// order so the derived `Ord` sorts by rule id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    CategoryDomain,
    CoordRange,
    HitframeOrder,
    ShotseqOrder,
    WinnerNonlast,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::CategoryDomain => "category-domain",
            Rule::CoordRange => "coord-range",
            Rule::HitframeOrder => "hitframe-order",
            Rule::ShotseqOrder => "shotseq-order",
            Rule::WinnerNonlast => "winner-nonlast",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Zero-based index of the offending shot.
    pub row: usize,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "row {}: [{}] {}", self.row, self.rule.id(), self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

/// Checks a rally against the default [`Domains`].
pub fn validate(rally: &Rally) -> ValidationReport {
    validate_with(rally, &Domains::default())
}

/// Lists every invariant violation, ordered by row and then rule id.
pub fn validate_with(rally: &Rally, domains: &Domains) -> ValidationReport {
    use alloc::format;

    let mut violations = Vec::new();
    let last = rally.shots.len().saturating_sub(1);
    let mut push = |row: usize, rule: Rule, message: String| {
        violations.push(Violation { row, rule, message })
    };

    for (row, shot) in rally.shots.iter().enumerate() {
        let categories = [
            ("RoundHead", shot.round_head, domains.round_head),
            ("Backhand", shot.backhand, domains.backhand),
            ("BallHeight", shot.ball_height, domains.ball_height),
            ("BallType", shot.ball_type, domains.ball_type),
        ];
        for (name, value, range) in categories {
            if !range.contains(value) {
                push(
                    row,
                    Rule::CategoryDomain,
                    format!("{name} {value} outside {}..={}", range.min, range.max),
                );
            }
        }

        let coords = [
            ("Landing", shot.landing),
            ("HitterLocation", shot.hitter_location),
            ("DefenderLocation", shot.defender_location),
        ];
        for (name, p) in coords {
            if !(p.x.is_finite() && p.y.is_finite() && p.x >= 0.0 && p.y >= 0.0) {
                push(
                    row,
                    Rule::CoordRange,
                    format!("{name} ({}, {}) must be finite and non-negative", p.x, p.y),
                );
            }
        }

        if row > 0 {
            let prev = rally.shots[row - 1].hit_frame;
            if shot.hit_frame <= prev {
                push(
                    row,
                    Rule::HitframeOrder,
                    format!("HitFrame {} not after previous {}", shot.hit_frame, prev),
                );
            }
        }

        let expected_seq = row as u64 + 1;
        if u64::from(shot.shot_seq) != expected_seq {
            push(
                row,
                Rule::ShotseqOrder,
                format!("ShotSeq {} where {} expected", shot.shot_seq, expected_seq),
            );
        }

        if shot.winner.is_some() && row != last {
            push(
                row,
                Rule::WinnerNonlast,
                format!("Winner set on shot {} of {}", row + 1, rally.shots.len()),
            );
        }
    }

    violations.sort_by_key(|v| (v.row, v.rule));
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn shot(seq: u32, frame: u64) -> Shot {
        Shot::placeholder(seq, frame, &Domains::default())
    }

    #[test]
    fn valid_rally_has_empty_report() {
        let mut r = Rally::new("r", vec![shot(1, 10), shot(2, 30), shot(3, 55)]);
        r.shots[2].winner = Some(Outcome::B);
        assert!(validate(&r).is_valid());
        assert!(validate(&Rally::new("empty", vec![])).is_valid());
    }

    #[test]
    fn winner_on_non_last_shot() {
        let mut r = Rally::new("r", vec![shot(1, 10), shot(2, 30)]);
        r.shots[0].winner = Some(Outcome::A);
        let rep = validate(&r);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].rule.id(), "winner-nonlast");
        assert_eq!(rep.violations[0].row, 0);
    }

    #[test]
    fn repeated_hit_frame() {
        let r = Rally::new("r", vec![shot(1, 10), shot(2, 10)]);
        let rep = validate(&r);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].rule, Rule::HitframeOrder);
        assert_eq!(rep.violations[0].row, 1);
    }

    #[test]
    fn violations_sorted_by_row_then_rule() {
        let mut r = Rally::new("r", vec![shot(1, 10), shot(5, 10), shot(3, 40)]);
        r.shots[1].winner = Some(Outcome::X);
        r.shots[1].ball_type = 12;
        r.shots[0].landing = Point::new(-1.0, f64::NAN);
        let rep = validate(&r);
        let got: Vec<(usize, &str)> = rep
            .violations
            .iter()
            .map(|v| (v.row, v.rule.id()))
            .collect();
        assert_eq!(
            got,
            vec![
                (0, "coord-range"),
                (1, "category-domain"),
                (1, "hitframe-order"),
                (1, "shotseq-order"),
                (1, "winner-nonlast"),
            ]
        );
    }

    #[test]
    fn category_range_codes() {
        let d = CategoryRange::new(1, 9);
        assert_eq!(d.len(), 9);
        assert_eq!(d.code(0), Some(1));
        assert_eq!(d.code(8), Some(9));
        assert_eq!(d.code(9), None);
        assert!(CategoryRange::new(3, 2).is_empty());
    }
}
