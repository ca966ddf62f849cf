//! `rallykit` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (unreadable or invalid
//! input, with file and line context on stderr).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use rallykit_core::assembly::{
    assemble_submission, AssemblyConfig, CourtSide, EnsembleMode, LandingYSource, LocationMode,
};
use rallykit_core::events::{extract_hits, merge_streams, to_shot_rows, ExtractionConfig};
use rallykit_core::flow::{process_pair, to_grayscale, PreprocConfig, RenderMode};
use rallykit_core::rally::{validate_with, Domains};
use rallykit_core::scoring::{dataset_score, ScoringConfig};
use rallykit_core::synth::{self, SplitMix64, SynthParams};

use crate::error::{Error, Result};
use crate::formats::{detections, ppm, rally_csv, stream_csv};
use crate::report;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Usage = 1,
    Data = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(name = "rallykit", version, about = "Badminton hit-event pipeline tools")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = one per core). Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Also write a machine-readable JSON report here.
    #[arg(long, global = true)]
    json_report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score a directory of predicted rallies against ground truth.
    Score(ScoreArgs),
    /// Turn a frame sequence into background-free motion frames.
    Preprocess(PreprocessArgs),
    /// Extract ShotSeq/HitFrame rows from per-frame hit probabilities.
    ExtractEvents(ExtractArgs),
    /// Fill the remaining submission columns from model outputs.
    Assemble(AssembleArgs),
    /// Generate synthetic fixtures.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Check rally CSV files against the format and its invariants.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    /// Count distances equal to the threshold as correct.
    #[arg(long)]
    inclusive_distance: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Magnitude,
    Hue,
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 2)]
    window: usize,
    #[arg(long, default_value_t = 0.5)]
    bg_threshold: f64,
    #[arg(long, default_value_t = 1e-4)]
    min_eigen: f64,
    #[arg(long, default_value = "180x180", value_parser = parse_size)]
    size: (usize, usize),
    #[arg(long, value_enum, default_value = "magnitude")]
    mode: ModeArg,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    /// A stream CSV, or a directory of them.
    #[arg(long)]
    probs: PathBuf,
    #[arg(long, default_value_t = 0.8)]
    quantile: f64,
    #[arg(long, default_value_t = 3)]
    min_gap: u64,
    /// Average streams of the same rally (files `<rally>.<fold>.csv`).
    #[arg(long)]
    merge: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Top,
    Bottom,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LocationArg {
    BboxVertex,
    PoseFeet,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LandingYArg {
    Box,
    Ball,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Mean,
    Vote,
}

#[derive(Debug, Args)]
struct AssembleArgs {
    /// Rally CSV with ShotSeq/HitFrame filled in.
    #[arg(long)]
    events: PathBuf,
    /// Class probabilities, JSON lines.
    #[arg(long)]
    probs: PathBuf,
    /// Player and ball detections, JSON lines.
    #[arg(long)]
    detections: PathBuf,
    #[arg(long)]
    track: Option<PathBuf>,
    #[arg(long)]
    poses: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "bottom")]
    side_of_a: SideArg,
    #[arg(long, value_enum, default_value = "bbox-vertex")]
    locations: LocationArg,
    #[arg(long, value_enum, default_value = "box")]
    landing_y: LandingYArg,
    #[arg(long, value_enum, default_value = "mean")]
    ensemble: EnsembleArg,
    /// Keep each shot's own hitter prediction instead of alternating.
    #[arg(long)]
    per_shot_hitters: bool,
    /// Number of frames in the clip (defaults to one past the last frame
    /// seen in any input).
    #[arg(long)]
    frames: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum SynthCommand {
    /// Ground-truth rallies, optionally with perturbed predictions.
    Rallies {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write mixed-error predictions for each rally here.
        #[arg(long)]
        pred_out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        min_shots: usize,
        #[arg(long, default_value_t = 20)]
        max_shots: usize,
    },
    /// Probability streams with planted hits (listed in `planted.csv`).
    Streams {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        length: usize,
        #[arg(long, default_value_t = 8)]
        peak_width: u64,
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
    },
    /// A translating texture as a PPM frame sequence.
    Frames {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "64x64", value_parser = parse_size)]
        size: (usize, usize),
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        dx: i32,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        dy: i32,
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Rally CSV files or directories of them.
    #[arg(required = true)]
    paths: Vec<PathBuf>,
}

fn parse_size(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WIDTHxHEIGHT, got `{s}`"))?;
    let w: usize = w.parse().map_err(|_| format!("bad width `{w}`"))?;
    let h: usize = h.parse().map_err(|_| format!("bad height `{h}`"))?;
    if w == 0 || h == 0 {
        return Err("size must be non-zero".into());
    }
    Ok((w, h))
}

/// Runs the CLI with process stdout/stderr.
pub fn run<I, T>(args: I) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    ExitStatus::Success
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    ExitStatus::Usage
                }
            };
        }
    };
    match execute(&cli, out, err) {
        Ok(status) => status,
        Err(Error::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            ExitStatus::Usage
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitStatus::Data
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<ExitStatus> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
    match &cli.command {
        Command::Score(a) => score(cli, a, out, err),
        Command::Preprocess(a) => pool.install(|| preprocess(a)).and_then(|msg| {
            write_out(out, &msg)?;
            Ok(ExitStatus::Success)
        }),
        Command::ExtractEvents(a) => extract_events(a, out),
        Command::Assemble(a) => assemble(a, out, err),
        Command::Synth(s) => synthesize(cli.seed, s, out),
        Command::Validate(a) => validate(a, out),
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn score(cli: &Cli, a: &ScoreArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<ExitStatus> {
    let domains = Domains::default();
    let gt = rally_csv::read_rally_dir(&a.gt, &domains)?;
    let pred = rally_csv::read_rally_dir(&a.pred, &domains)?;
    let cfg = ScoringConfig::default().inclusive(a.inclusive_distance);
    let rep = dataset_score(&gt, &pred, &cfg)?;
    for w in &rep.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    write_out(out, &report::to_text(&rep))?;
    if let Some(path) = &cli.json_report {
        std::fs::write(path, report::to_json(&rep)).map_err(|e| Error::io(path, e))?;
    }
    Ok(ExitStatus::Success)
}

/// Runs inside the worker pool; returns the summary line.
fn preprocess(a: &PreprocessArgs) -> Result<String> {
    let cfg = PreprocConfig {
        window_radius: a.window,
        background_threshold: a.bg_threshold,
        min_eigen: a.min_eigen,
        output_size: a.size,
        render_mode: match a.mode {
            ModeArg::Magnitude => RenderMode::MagnitudeGray,
            ModeArg::Hue => RenderMode::AngleHue,
        },
    };
    cfg.check().map_err(|e| Error::Usage(e.to_string()))?;

    let paths = ppm::frame_paths(&a.input)?;
    if paths.len() < 2 {
        return Err(Error::parse(&a.input, 0, "need at least 2 frames"));
    }
    let gray = paths
        .par_iter()
        .map(|p| {
            let f = ppm::read_ppm(p)?;
            to_grayscale(&f).map_err(|e| Error::parse(p, 0, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let dims = (gray[0].width, gray[0].height);
    if let Some(i) = gray.iter().position(|g| (g.width, g.height) != dims) {
        return Err(Error::parse(
            &paths[i],
            0,
            format!(
                "frame is {}x{}, sequence is {}x{}",
                gray[i].width, gray[i].height, dims.0, dims.1
            ),
        ));
    }

    let frames = gray
        .par_windows(2)
        .map(|pair| process_pair(&pair[0], &pair[1], &cfg))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    ppm::write_sequence(&a.out, &frames)?;
    Ok(format!("wrote {} frames to {}\n", frames.len(), a.out.display()))
}

/// Rally id for a stream file: the stem, cut at the first '.' when merging
/// fold files such as `r1.fold2.csv`.
fn stream_rally_id(path: &Path, merge: bool) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    if merge {
        stem.split('.').next().unwrap_or(&stem).to_string()
    } else {
        stem
    }
}

fn extract_events(a: &ExtractArgs, out: &mut dyn Write) -> Result<ExitStatus> {
    let cfg = ExtractionConfig {
        quantile: a.quantile,
        min_gap: a.min_gap,
    };
    cfg.check().map_err(|e| Error::Usage(e.to_string()))?;
    let files = if a.probs.is_dir() {
        crate::formats::csv_files(&a.probs)?
    } else {
        vec![a.probs.clone()]
    };

    let mut groups: BTreeMap<String, Vec<PathBuf>> = BTreeMap::new();
    for f in files {
        groups.entry(stream_rally_id(&f, a.merge)).or_default().push(f);
    }
    create_dir(&a.out)?;
    let domains = Domains::default();
    for (id, paths) in &groups {
        let streams = paths
            .iter()
            .map(|p| stream_csv::read_stream_file(p, id))
            .collect::<Result<Vec<_>>>()?;
        let stream = merge_streams(&streams).map_err(|e| Error::parse(&paths[0], 0, e.to_string()))?;
        let events = extract_hits(&stream, &cfg)?;
        let rally = to_shot_rows(id, &events, &domains)?;
        rally_csv::write_rally_file(&a.out, &rally, &domains)?;
        write_out(out, &format!("{id} {} events\n", events.len()))?;
    }
    Ok(ExitStatus::Success)
}

fn assemble(a: &AssembleArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<ExitStatus> {
    let cfg = AssemblyConfig {
        side_of_a: match a.side_of_a {
            SideArg::Top => CourtSide::Top,
            SideArg::Bottom => CourtSide::Bottom,
        },
        location_mode: match a.locations {
            LocationArg::BboxVertex => LocationMode::BboxVertex,
            LocationArg::PoseFeet => LocationMode::PoseFeet,
        },
        landing_y_source: match a.landing_y {
            LandingYArg::Box => LandingYSource::HitterBox,
            LandingYArg::Ball => LandingYSource::Ball,
        },
        ensemble: match a.ensemble {
            EnsembleArg::Mean => EnsembleMode::Mean,
            EnsembleArg::Vote => EnsembleMode::Vote,
        },
        alternate_hitters: !a.per_shot_hitters,
        ..AssemblyConfig::default()
    };
    let events = rally_csv::read_rally_file(&a.events, &cfg.domains)?;
    let probs = detections::read_class_probs(&a.probs)?;
    let mut bundle = detections::read_detections(&a.detections)?;
    if let Some(t) = &a.track {
        detections::read_track(&mut bundle, t)?;
    }
    if let Some(p) = &a.poses {
        detections::read_poses(&mut bundle, p)?;
    }
    if let Some(n) = a.frames {
        if n < bundle.frames {
            return Err(Error::Usage(format!(
                "--frames {n} is below the last input frame {}",
                bundle.frames - 1
            )));
        }
        bundle.frames = n;
    }
    let assembled = assemble_submission(&events, &probs, &bundle, &cfg)
        .map_err(|e| Error::parse(&a.events, 0, e.to_string()))?;
    for issue in &assembled.issues {
        let _ = writeln!(err, "warning: {issue}");
    }
    let text = rally_csv::write_rally_csv(&assembled.rally, &cfg.domains)?;
    std::fs::write(&a.out, text).map_err(|e| Error::io(&a.out, e))?;
    write_out(
        out,
        &format!("wrote {} shots to {}\n", assembled.rally.len(), a.out.display()),
    )?;
    Ok(ExitStatus::Success)
}

fn synthesize(seed: u64, cmd: &SynthCommand, out: &mut dyn Write) -> Result<ExitStatus> {
    let mut seeds = SplitMix64::new(seed);
    match cmd {
        SynthCommand::Rallies {
            n,
            out: dir,
            pred_out,
            min_shots,
            max_shots,
        } => {
            let domains = Domains::default();
            create_dir(dir)?;
            if let Some(p) = pred_out {
                create_dir(p)?;
            }
            for i in 1..=*n {
                let params = SynthParams {
                    n_shots: (*min_shots, *max_shots),
                    seed: seeds.next_u64(),
                    ..SynthParams::default()
                };
                let id = format!("rally_{i:04}");
                let rally = synth::gen_rally(&id, &params).map_err(|e| Error::Usage(e.to_string()))?;
                rally_csv::write_rally_file(dir, &rally, &domains)?;
                if let Some(p) = pred_out {
                    let (pred, _) =
                        synth::perturb(&rally, &synth::PerturbSpec::MIXED, &domains, seeds.next_u64())?;
                    let path = p.join(format!("{id}.csv"));
                    std::fs::write(&path, rally_csv::format_rows(&pred))
                        .map_err(|e| Error::io(&path, e))?;
                }
            }
            write_out(out, &format!("wrote {n} rallies to {}\n", dir.display()))?;
        }
        SynthCommand::Streams {
            n,
            out: dir,
            length,
            peak_width,
            noise,
        } => {
            create_dir(dir)?;
            let mut planted = String::from("rally_id,frames\n");
            for i in 1..=*n {
                let id = format!("rally_{i:04}");
                let count = 3 + (seeds.next_u64() % 3) as usize;
                let frames = synth::plant_hits(*length, count, *peak_width, seeds.next_u64())
                    .map_err(|e| Error::Usage(e.to_string()))?;
                let stream =
                    synth::gen_probability_stream(&id, &frames, *length, *peak_width, *noise, seeds.next_u64())
                        .map_err(|e| Error::Usage(e.to_string()))?;
                let path = dir.join(format!("{id}.csv"));
                std::fs::write(&path, stream_csv::write_stream_csv(&stream))
                    .map_err(|e| Error::io(&path, e))?;
                let list: Vec<String> = frames.iter().map(u64::to_string).collect();
                planted.push_str(&format!("{id},{}\n", list.join(" ")));
            }
            let path = dir.join("planted.txt");
            std::fs::write(&path, planted).map_err(|e| Error::io(&path, e))?;
            write_out(out, &format!("wrote {n} streams to {}\n", dir.display()))?;
        }
        SynthCommand::Frames {
            out: dir,
            size,
            dx,
            dy,
            n,
        } => {
            let frames = synth::gen_motion_sequence(*size, (*dx, *dy), *n, seed)
                .map_err(|e| Error::Usage(e.to_string()))?;
            ppm::write_sequence(dir, &frames)?;
            write_out(out, &format!("wrote {n} frames to {}\n", dir.display()))?;
        }
    }
    Ok(ExitStatus::Success)
}

fn validate(a: &ValidateArgs, out: &mut dyn Write) -> Result<ExitStatus> {
    let domains = Domains::default();
    let mut files = Vec::new();
    for p in &a.paths {
        if p.is_dir() {
            files.extend(crate::formats::csv_files(p)?);
        } else {
            files.push(p.clone());
        }
    }
    let mut bad = 0;
    for f in &files {
        let rally = rally_csv::read_rally_file(f, &domains)?;
        let rep = validate_with(&rally, &domains);
        for v in &rep.violations {
            write_out(out, &format!("{}: {v}\n", f.display()))?;
        }
        if !rep.is_valid() {
            bad += 1;
        }
    }
    write_out(
        out,
        &format!("{} files checked, {bad} with violations\n", files.len()),
    )?;
    Ok(if bad == 0 {
        ExitStatus::Success
    } else {
        ExitStatus::Data
    })
}
