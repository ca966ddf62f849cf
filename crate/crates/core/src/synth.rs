//! Seeded synthetic fixtures and an independent scoring oracle.
//!
//! All randomness comes from [`SplitMix64`] (Steele, Lea & Flood's 64-bit
//! generator, constants `0x9E3779B97F4A7C15`, `0xBF58476D1CE4E5B9`,
//! `0x94D049BB133111EB`), so fixtures are reproducible bit-for-bit from a seed
//! in any language.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::assembly::{Attribute, BBox, ClassProbs, DetectionBundle};
use crate::error::{Error, Result};
use crate::events::ProbabilityStream;
use crate::flow::{GrayFrame, RgbFrame};
use crate::rally::{CategoryRange, Domains, Outcome, Player, Point, Rally, Shot};
use crate::scoring::ScoringConfig;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in the inclusive range `[lo, hi]`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        debug_assert!(lo <= hi);
        let span = hi - lo + 1;
        if span == 0 {
            return self.next_u64();
        }
        lo + self.next_u64() % span
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    pub fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        items[self.range(0, items.len() as u64 - 1) as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    /// Inclusive range of shots per rally.
    pub n_shots: (usize, usize),
    /// Inclusive range of frames between consecutive hits.
    pub frame_gap: (u64, u64),
    pub first_frame: (u64, u64),
    /// Coordinates are whole pixels in `[0, max]`.
    pub max_x: u64,
    pub max_y: u64,
    pub domains: Domains,
    /// Probability that the last shot carries a winner label.
    pub winner_rate: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n_shots: (1, 20),
            frame_gap: (8, 40),
            first_frame: (0, 60),
            max_x: 1280,
            max_y: 720,
            domains: Domains::default(),
            winner_rate: 0.9,
            seed: 0,
        }
    }
}

impl SynthParams {
    pub fn check(&self) -> Result<()> {
        if self.n_shots.0 > self.n_shots.1
            || self.frame_gap.0 > self.frame_gap.1
            || self.first_frame.0 > self.first_frame.1
        {
            return Err(Error::InvalidConfig("empty parameter range"));
        }
        if self.frame_gap.0 == 0 {
            return Err(Error::InvalidConfig("frame gap must be at least 1"));
        }
        let d = &self.domains;
        if [d.round_head, d.backhand, d.ball_height, d.ball_type]
            .iter()
            .any(CategoryRange::is_empty)
        {
            return Err(Error::InvalidConfig("empty category domain"));
        }
        Ok(())
    }
}

fn category(rng: &mut SplitMix64, r: CategoryRange) -> u8 {
    rng.range(u64::from(r.min), u64::from(r.max)) as u8
}

/// A valid rally drawn from `params`; the same params (seed included) give
/// the same rally.
pub fn gen_rally(id: &str, params: &SynthParams) -> Result<Rally> {
    params.check()?;
    let mut rng = SplitMix64::new(params.seed);
    let n = rng.range(params.n_shots.0 as u64, params.n_shots.1 as u64) as usize;
    let mut frame = rng.range(params.first_frame.0, params.first_frame.1);
    let mut hitter = if rng.chance(0.5) { Player::A } else { Player::B };
    let d = params.domains;
    let point = |rng: &mut SplitMix64| {
        Point::new(
            rng.range(0, params.max_x) as f64,
            rng.range(0, params.max_y) as f64,
        )
    };

    let mut shots = Vec::with_capacity(n);
    for j in 0..n {
        if j > 0 {
            frame += rng.range(params.frame_gap.0, params.frame_gap.1);
        }
        let winner = if j + 1 == n && rng.chance(params.winner_rate) {
            Some(rng.pick(&Outcome::ALL))
        } else {
            None
        };
        shots.push(Shot {
            shot_seq: j as u32 + 1,
            hit_frame: frame,
            hitter,
            round_head: category(&mut rng, d.round_head),
            backhand: category(&mut rng, d.backhand),
            ball_height: category(&mut rng, d.ball_height),
            landing: point(&mut rng),
            hitter_location: point(&mut rng),
            defender_location: point(&mut rng),
            ball_type: category(&mut rng, d.ball_type),
            winner,
        });
        hitter = hitter.other();
    }
    Ok(Rally::new(id, shots))
}

/// How a categorical column is perturbed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ColumnAction {
    Keep,
    /// Force an incorrect value on every shot.
    Corrupt,
    /// Corrupt each shot independently with probability one half.
    Mixed,
}

/// How a coordinate column is perturbed. Offsets are realized exactly along
/// an axis, or along a 3-4-5 direction when the distance is a multiple of 5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OffsetAction {
    Keep,
    Offset(f64),
    /// Each shot draws an offset from a fixed grid straddling the thresholds.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameAction {
    Jitter(u64),
    /// Each shot draws an absolute error in `0..=max`.
    Random(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbSpec {
    pub hit_frame: FrameAction,
    pub hitter: ColumnAction,
    pub round_head: ColumnAction,
    pub backhand: ColumnAction,
    pub ball_height: ColumnAction,
    pub ball_type: ColumnAction,
    pub winner: ColumnAction,
    pub landing: OffsetAction,
    pub hitter_location: OffsetAction,
    pub defender_location: OffsetAction,
}

impl PerturbSpec {
    pub const KEEP: PerturbSpec = PerturbSpec {
        hit_frame: FrameAction::Jitter(0),
        hitter: ColumnAction::Keep,
        round_head: ColumnAction::Keep,
        backhand: ColumnAction::Keep,
        ball_height: ColumnAction::Keep,
        ball_type: ColumnAction::Keep,
        winner: ColumnAction::Keep,
        landing: OffsetAction::Keep,
        hitter_location: OffsetAction::Keep,
        defender_location: OffsetAction::Keep,
    };

    /// Every column mixed; frame errors in `0..=4`.
    pub const MIXED: PerturbSpec = PerturbSpec {
        hit_frame: FrameAction::Random(4),
        hitter: ColumnAction::Mixed,
        round_head: ColumnAction::Mixed,
        backhand: ColumnAction::Mixed,
        ball_height: ColumnAction::Mixed,
        ball_type: ColumnAction::Mixed,
        winner: ColumnAction::Mixed,
        landing: OffsetAction::Random,
        hitter_location: OffsetAction::Random,
        defender_location: OffsetAction::Random,
    };
}

/// Offset grid for [`OffsetAction::Random`]; contains both thresholds.
pub const OFFSET_GRID: [f64; 10] = [0.0, 1.0, 3.0, 5.0, 6.0, 7.5, 9.0, 10.0, 15.0, 40.0];

/// What `perturb` did to one shot.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotTruth {
    pub frame_error: u64,
    pub hitter: bool,
    pub round_head: bool,
    pub backhand: bool,
    pub ball_height: bool,
    pub ball_type: bool,
    pub winner: bool,
    pub landing_offset: f64,
    pub hitter_location_offset: f64,
    pub defender_location_offset: f64,
}

/// Correctness of every score term, known by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectnessMap {
    pub shots: Vec<ShotTruth>,
}

impl CorrectnessMap {
    /// Closed-form rally total implied by the recorded correctness.
    pub fn expected_total(&self, cfg: &ScoringConfig) -> f64 {
        let within = |d: f64, t: f64| {
            if cfg.inclusive_distance {
                d <= t
            } else {
                d < t
            }
        };
        let n = self.shots.len() as u64;
        if n == 0 {
            return 0.1;
        }
        let mut hundredths = 10 * n;
        for s in &self.shots {
            if s.frame_error > cfg.hit_frame_tolerance {
                continue;
            }
            let flags = [
                (true, 10),
                (s.hitter, 10),
                (s.ball_height, 10),
                (within(s.landing_offset, cfg.landing_threshold), 10),
                (within(s.hitter_location_offset, cfg.location_threshold), 5),
                (within(s.defender_location_offset, cfg.location_threshold), 5),
                (s.backhand, 5),
                (s.round_head, 5),
                (s.ball_type, 20),
                (s.winner, 10),
            ];
            hundredths += flags.iter().filter(|f| f.0).map(|f| f.1).sum::<u64>();
        }
        hundredths as f64 / (100 * n) as f64
    }
}

fn other_category(rng: &mut SplitMix64, range: CategoryRange, current: u8) -> Result<u8> {
    if range.len() < 2 {
        return Err(Error::ContradictoryPerturbation(
            "cannot corrupt a single-valued category",
        ));
    }
    let k = rng.range(1, range.len() as u64 - 1) as u8;
    let idx = (current - range.min + k) % range.len() as u8;
    Ok(range.min + idx)
}

fn shift_point(rng: &mut SplitMix64, p: Point, dist: f64) -> Point {
    if dist == 0.0 {
        return p;
    }
    let k = dist / 5.0;
    let (ox, oy) = if k == libm::trunc(k) && rng.chance(0.5) {
        if rng.chance(0.5) {
            (3.0 * k, 4.0 * k)
        } else {
            (4.0 * k, 3.0 * k)
        }
    } else if rng.chance(0.5) {
        (dist, 0.0)
    } else {
        (0.0, dist)
    };
    // Move away from zero when the negative direction would leave the image.
    let sx = if p.x >= ox && rng.chance(0.5) { -ox } else { ox };
    let sy = if p.y >= oy && rng.chance(0.5) { -oy } else { oy };
    Point::new(p.x + sx, p.y + sy)
}

/// Builds a prediction from `rally` with known per-term correctness.
pub fn perturb(
    rally: &Rally,
    spec: &PerturbSpec,
    domains: &Domains,
    seed: u64,
) -> Result<(Rally, CorrectnessMap)> {
    for off in [spec.landing, spec.hitter_location, spec.defender_location] {
        if let OffsetAction::Offset(d) = off {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::ContradictoryPerturbation("offsets must be >= 0"));
            }
        }
    }
    let mut rng = SplitMix64::new(seed);
    let n = rally.shots.len();
    let mut pred = rally.clone();
    let mut truth = Vec::with_capacity(n);

    for (j, shot) in pred.shots.iter_mut().enumerate() {
        let corrupt = |a: ColumnAction, rng: &mut SplitMix64| match a {
            ColumnAction::Keep => false,
            ColumnAction::Corrupt => true,
            ColumnAction::Mixed => rng.chance(0.5),
        };

        let frame_error = match spec.hit_frame {
            FrameAction::Jitter(e) => e,
            FrameAction::Random(max) => rng.range(0, max),
        };
        shot.hit_frame = if shot.hit_frame >= frame_error && rng.chance(0.5) {
            shot.hit_frame - frame_error
        } else {
            shot.hit_frame + frame_error
        };

        let hitter_bad = corrupt(spec.hitter, &mut rng);
        if hitter_bad {
            shot.hitter = shot.hitter.other();
        }
        let round_head_bad = corrupt(spec.round_head, &mut rng);
        if round_head_bad {
            shot.round_head = other_category(&mut rng, domains.round_head, shot.round_head)?;
        }
        let backhand_bad = corrupt(spec.backhand, &mut rng);
        if backhand_bad {
            shot.backhand = other_category(&mut rng, domains.backhand, shot.backhand)?;
        }
        let ball_height_bad = corrupt(spec.ball_height, &mut rng);
        if ball_height_bad {
            shot.ball_height = other_category(&mut rng, domains.ball_height, shot.ball_height)?;
        }
        let ball_type_bad = corrupt(spec.ball_type, &mut rng);
        if ball_type_bad {
            shot.ball_type = other_category(&mut rng, domains.ball_type, shot.ball_type)?;
        }

        let is_last = j + 1 == n;
        let winner_bad = corrupt(spec.winner, &mut rng);
        if winner_bad {
            shot.winner = if is_last {
                let mut options: Vec<Option<Outcome>> = vec![None];
                options.extend(Outcome::ALL.iter().copied().map(Some));
                options.retain(|o| *o != shot.winner);
                rng.pick(&options)
            } else {
                Some(rng.pick(&Outcome::ALL))
            };
        } else if !is_last {
            shot.winner = None;
        }

        let offset = |a: OffsetAction, rng: &mut SplitMix64| match a {
            OffsetAction::Keep => 0.0,
            OffsetAction::Offset(d) => d,
            OffsetAction::Random => rng.pick(&OFFSET_GRID),
        };
        let landing_offset = offset(spec.landing, &mut rng);
        shot.landing = shift_point(&mut rng, shot.landing, landing_offset);
        let hitter_location_offset = offset(spec.hitter_location, &mut rng);
        shot.hitter_location = shift_point(&mut rng, shot.hitter_location, hitter_location_offset);
        let defender_location_offset = offset(spec.defender_location, &mut rng);
        shot.defender_location =
            shift_point(&mut rng, shot.defender_location, defender_location_offset);

        truth.push(ShotTruth {
            frame_error,
            hitter: !hitter_bad,
            round_head: !round_head_bad,
            backhand: !backhand_bad,
            ball_height: !ball_height_bad,
            ball_type: !ball_type_bad,
            winner: !winner_bad,
            landing_offset,
            hitter_location_offset,
            defender_location_offset,
        });
    }
    Ok((pred, CorrectnessMap { shots: truth }))
}

/// Rally score written out term by term from the published formula, with no
/// code shared with [`crate::scoring`]. Used only as a cross-check.
pub fn oracle_score(gt: &Rally, pred: &Rally, cfg: &ScoringConfig) -> f64 {
    let s_i = gt.shots.len();
    let s_pred = pred.shots.len();
    if s_i != s_pred {
        return 0.0;
    }
    let mut ass = 0.0;
    if s_i > 0 {
        let mut sum = 0.0;
        for j in 0..s_i {
            let g = &gt.shots[j];
            let p = &pred.shots[j];
            let err = if g.hit_frame > p.hit_frame {
                g.hit_frame - p.hit_frame
            } else {
                p.hit_frame - g.hit_frame
            };
            if err > cfg.hit_frame_tolerance {
                continue;
            }
            let close = |a: Point, b: Point, limit: f64| -> f64 {
                let d = libm::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
                let ok = if cfg.inclusive_distance { d <= limit } else { d < limit };
                if ok {
                    1.0
                } else {
                    0.0
                }
            };
            let eq = |ok: bool| if ok { 1.0 } else { 0.0 };
            let winner_ok = if j == s_i - 1 {
                g.winner == p.winner
            } else {
                p.winner.is_none()
            };
            let ss = 0.1
                + 0.1 * eq(g.hitter == p.hitter)
                + 0.1 * eq(g.ball_height == p.ball_height)
                + 0.1 * close(g.landing, p.landing, cfg.landing_threshold)
                + 0.05 * close(g.hitter_location, p.hitter_location, cfg.location_threshold)
                + 0.05 * close(g.defender_location, p.defender_location, cfg.location_threshold)
                + 0.05 * eq(g.backhand == p.backhand)
                + 0.05 * eq(g.round_head == p.round_head)
                + 0.2 * eq(g.ball_type == p.ball_type)
                + 0.1 * eq(winner_ok);
            sum += ss;
        }
        ass = sum / s_i as f64;
    }
    0.1 + ass
}

/// Dataset form of [`oracle_score`]: plain mean over ground-truth rallies,
/// predictions matched by id.
pub fn oracle_dataset_score(gt: &[Rally], pred: &[Rally], cfg: &ScoringConfig) -> f64 {
    if gt.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for g in gt {
        if let Some(p) = pred.iter().find(|p| p.id == g.id) {
            total += oracle_score(g, p, cfg);
        }
    }
    total / gt.len() as f64
}

/// Peak profile: sharp at the center, reaching 0.05 at `width` frames.
fn peak_profile(distance: u64, width: u64) -> f64 {
    if distance > width {
        0.0
    } else {
        libm::exp(-3.0 * distance as f64 / width as f64)
    }
}

/// Per-frame probabilities with a unimodal peak at each hit frame on top of
/// uniform baseline noise in `[0, noise)`.
pub fn gen_probability_stream(
    rally_id: &str,
    hit_frames: &[u64],
    length: usize,
    peak_width: u64,
    noise: f64,
    seed: u64,
) -> Result<ProbabilityStream> {
    if length == 0 {
        return Err(Error::Empty("probability stream"));
    }
    if peak_width == 0 || !(0.0..1.0).contains(&noise) {
        return Err(Error::InvalidConfig("peak width must be >= 1 and noise in [0, 1)"));
    }
    let mut sorted = hit_frames.to_vec();
    sorted.sort_unstable();
    for &f in &sorted {
        if f >= length as u64 {
            return Err(Error::PeakOutOfRange { frame: f, length });
        }
    }
    for w in sorted.windows(2) {
        if w[1] - w[0] <= 2 * peak_width {
            return Err(Error::OverlappingPeaks {
                first: w[0],
                second: w[1],
            });
        }
    }

    let mut rng = SplitMix64::new(seed);
    let probs = (0..length as u64)
        .map(|t| {
            let bump = sorted
                .iter()
                .map(|&c| peak_profile(c.abs_diff(t), peak_width))
                .fold(0.0, f64::max);
            let base = noise * rng.next_f64();
            ((1.0 - noise) * bump + base).clamp(0.0, 1.0)
        })
        .collect();
    ProbabilityStream::new(rally_id, probs)
}

/// Picks `count` hit frames for a stream of `length`, one per equal segment,
/// far enough apart for [`gen_probability_stream`] with the same width.
pub fn plant_hits(length: usize, count: usize, peak_width: u64, seed: u64) -> Result<Vec<u64>> {
    if count == 0 {
        return Err(Error::Empty("planted hits"));
    }
    let seg = (length / count) as u64;
    if seg < 2 * peak_width + 1 {
        return Err(Error::InvalidConfig("stream too short for that many peaks"));
    }
    let mut rng = SplitMix64::new(seed);
    Ok((0..count as u64)
        .map(|i| {
            let start = i * seg;
            rng.range(start + peak_width, start + seg - peak_width - 1)
        })
        .collect())
}

/// Periodic texture with integer spatial frequencies of radius at most
/// `max_freq` cycles per frame width, values inside `[0.1, 0.9]`.
#[derive(Debug, Clone)]
pub struct Texture {
    width: usize,
    height: usize,
    waves: Vec<(f64, f64, f64, f64)>, // (amplitude, fx, fy, phase)
}

impl Texture {
    pub fn random(width: usize, height: usize, max_freq: i32, rng: &mut SplitMix64) -> Self {
        let mut waves = Vec::new();
        for fy in -max_freq..=max_freq {
            for fx in 0..=max_freq {
                if (fx == 0 && fy <= 0) || fx * fx + fy * fy > max_freq * max_freq {
                    continue;
                }
                let amp = 0.5 + rng.next_f64();
                let phase = 2.0 * PI * rng.next_f64();
                waves.push((amp, fx as f64, fy as f64, phase));
            }
        }
        let total: f64 = waves.iter().map(|w| w.0).sum();
        for w in &mut waves {
            w.0 *= 0.4 / total;
        }
        Texture {
            width,
            height,
            waves,
        }
    }

    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let mut v = 0.5;
        for &(a, fx, fy, ph) in &self.waves {
            v += a * libm::cos(2.0 * PI * (fx * x / self.width as f64 + fy * y / self.height as f64) + ph);
        }
        v
    }

    /// The texture translated by `(dx, dy)` pixels, with periodic wrap.
    pub fn frame(&self, dx: f64, dy: f64) -> GrayFrame {
        let mut values = Vec::with_capacity(self.width * self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                values.push(self.sample(x as f64 - dx, y as f64 - dy));
            }
        }
        GrayFrame {
            width: self.width,
            height: self.height,
            values,
        }
    }
}

/// Band-limited texture moving by `shift` pixels per frame; the true flow is
/// `shift` at every pixel.
pub fn gen_motion_sequence(
    size: (usize, usize),
    shift: (i32, i32),
    n_frames: usize,
    seed: u64,
) -> Result<Vec<RgbFrame>> {
    if shift.0.abs() > 2 || shift.1.abs() > 2 {
        return Err(Error::InvalidConfig("per-frame shift must be at most 2 pixels"));
    }
    if size.0 == 0 || size.1 == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut rng = SplitMix64::new(seed);
    let texture = Texture::random(size.0, size.1, 3, &mut rng);
    Ok((0..n_frames)
        .map(|t| {
            let t = t as f64;
            texture
                .frame(f64::from(shift.0) * t, f64::from(shift.1) * t)
                .to_rgb()
        })
        .collect())
}

/// Inputs for [`crate::assembly::assemble_submission`]: event rows, class
/// probabilities from several models, and detections at every hit frame.
#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyFixture {
    pub events: Rally,
    pub probs: ClassProbs,
    pub bundle: DetectionBundle,
}

fn random_distribution(rng: &mut SplitMix64, classes: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..classes).map(|_| 1.0 - rng.next_f64()).collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|v| v / sum).collect()
}

/// One player in each court half at every hit frame; the ball is missing
/// from both detector and trajectory with probability `ball_miss_rate`.
pub fn gen_assembly_fixture(
    id: &str,
    models: usize,
    ball_miss_rate: f64,
    seed: u64,
) -> Result<AssemblyFixture> {
    if models == 0 {
        return Err(Error::InvalidConfig("need at least one model"));
    }
    let mut rng = SplitMix64::new(seed);
    let params = SynthParams {
        seed: rng.next_u64(),
        ..SynthParams::default()
    };
    let domains = params.domains;
    let gt = gen_rally(id, &params)?;
    let shots = gt
        .shots
        .iter()
        .map(|s| Shot::placeholder(s.shot_seq, s.hit_frame, &domains))
        .collect();
    let events = Rally::new(id, shots);

    let mut probs = ClassProbs::default();
    for s in &events.shots {
        for attr in Attribute::ALL {
            for _ in 0..models {
                let v = random_distribution(&mut rng, attr.classes(&domains));
                probs.push(s.shot_seq, attr, v);
            }
        }
    }

    let last = events.shots.last().map_or(0, |s| s.hit_frame);
    let mut bundle = DetectionBundle::new(last + 10);
    for s in &events.shots {
        let player = |rng: &mut SplitMix64, y0: u64| {
            let x = rng.range(100, 1100) as f64;
            let y = rng.range(y0, y0 + 150) as f64;
            BBox::new(x, y, x + rng.range(40, 90) as f64, y + rng.range(120, 200) as f64)
        };
        let top = player(&mut rng, 60);
        let bottom = player(&mut rng, 380);
        let f = bundle.frame_mut(s.hit_frame);
        f.players = if rng.chance(0.5) { vec![top, bottom] } else { vec![bottom, top] };
        if !rng.chance(ball_miss_rate) {
            let p = Point::new(rng.range(0, 1280) as f64, rng.range(0, 720) as f64);
            if rng.chance(0.5) {
                f.track = Some(p);
            } else {
                f.ball = Some(p);
            }
        }
    }
    Ok(AssemblyFixture { events, probs, bundle })
}
