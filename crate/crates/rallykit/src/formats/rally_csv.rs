//! One rally per CSV file, one shot per row, fixed 14-column header.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rallykit_core::rally::{validate_with, CategoryRange, Domains, Outcome, Player, Point, Rally, Shot};

use crate::error::{Error, Result};

pub const HEADER: [&str; 14] = [
    "ShotSeq",
    "HitFrame",
    "Hitter",
    "RoundHead",
    "Backhand",
    "BallHeight",
    "LandingX",
    "LandingY",
    "HitterLocationX",
    "HitterLocationY",
    "DefenderLocationX",
    "DefenderLocationY",
    "BallType",
    "Winner",
];

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::parse("", line, message)
}

fn integer<T: FromStr>(cell: &str, column: &str, line: usize) -> Result<T> {
    cell.parse()
        .map_err(|_| err(line, format!("{column}: `{cell}` is not a non-negative integer")))
}

fn category(cell: &str, column: &str, range: CategoryRange, line: usize) -> Result<u8> {
    let v: u8 = integer(cell, column, line)?;
    if !range.contains(v) {
        return Err(err(
            line,
            format!("{column}: {v} outside {}..={}", range.min, range.max),
        ));
    }
    Ok(v)
}

fn coordinate(cell: &str, column: &str, line: usize) -> Result<f64> {
    // Rust float parsing is locale-independent and only accepts '.'.
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(err(line, format!("{column}: `{cell}` is not a finite number"))),
    }
}

/// Parses a rally file. Errors carry 1-based line numbers; use
/// [`Error::in_file`] to attach the path.
pub fn parse_rally_csv(text: &[u8], rally_id: &str, domains: &Domains) -> Result<Rally> {
    let text = std::str::from_utf8(text).map_err(|e| err(0, format!("not UTF-8: {e}")))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text.lines().enumerate();

    let header = lines
        .next()
        .map(|(_, l)| l)
        .ok_or_else(|| err(1, "missing header row"))?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    if names != HEADER {
        return Err(err(
            1,
            format!("header must be `{}`, found `{header}`", HEADER.join(",")),
        ));
    }

    let mut shots = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = raw.split(',').map(str::trim).collect();
        if cells.len() != HEADER.len() {
            return Err(err(
                line,
                format!("expected {} cells, found {}", HEADER.len(), cells.len()),
            ));
        }
        let shot_seq: u32 = integer(cells[0], "ShotSeq", line)?;
        let expected = shots.len() as u32 + 1;
        if shot_seq != expected {
            return Err(err(
                line,
                format!("duplicate/gap in ShotSeq: {shot_seq} where {expected} expected"),
            ));
        }
        let hitter = Player::from_str(cells[2])
            .map_err(|_| err(line, format!("Hitter: `{}` not in {{A, B}}", cells[2])))?;
        let winner = match cells[13] {
            "" => None,
            w => Some(
                Outcome::from_str(w)
                    .map_err(|_| err(line, format!("Winner: `{w}` not in {{A, B, X}}")))?,
            ),
        };
        shots.push(Shot {
            shot_seq,
            hit_frame: integer(cells[1], "HitFrame", line)?,
            hitter,
            round_head: category(cells[3], "RoundHead", domains.round_head, line)?,
            backhand: category(cells[4], "Backhand", domains.backhand, line)?,
            ball_height: category(cells[5], "BallHeight", domains.ball_height, line)?,
            landing: Point::new(
                coordinate(cells[6], "LandingX", line)?,
                coordinate(cells[7], "LandingY", line)?,
            ),
            hitter_location: Point::new(
                coordinate(cells[8], "HitterLocationX", line)?,
                coordinate(cells[9], "HitterLocationY", line)?,
            ),
            defender_location: Point::new(
                coordinate(cells[10], "DefenderLocationX", line)?,
                coordinate(cells[11], "DefenderLocationY", line)?,
            ),
            ball_type: category(cells[12], "BallType", domains.ball_type, line)?,
            winner,
        });
    }
    Ok(Rally::new(rally_id, shots))
}

/// Serializes a valid rally: canonical header, LF endings, shortest
/// round-trip decimal for coordinates (whole numbers without a point).
pub fn write_rally_csv(rally: &Rally, domains: &Domains) -> Result<String> {
    if let Some(v) = validate_with(rally, domains).first() {
        return Err(rallykit_core::Error::InvalidRally(v.clone()).into());
    }
    Ok(format_rows(rally))
}

/// Serializes without validating. Predictions may legitimately break the
/// invariants (a winner on a middle shot, say) and still need to be scored.
pub fn format_rows(rally: &Rally) -> String {
    let mut out = HEADER.join(",");
    out.push('\n');
    for s in &rally.shots {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.shot_seq,
            s.hit_frame,
            s.hitter,
            s.round_head,
            s.backhand,
            s.ball_height,
            num(s.landing.x),
            num(s.landing.y),
            num(s.hitter_location.x),
            num(s.hitter_location.y),
            num(s.defender_location.x),
            num(s.defender_location.y),
            s.ball_type,
            s.winner.map(Outcome::as_str).unwrap_or(""),
        );
    }
    out
}

fn num(v: f64) -> String {
    // `-0` would survive a round trip but reads badly.
    if v == 0.0 {
        "0".to_string()
    } else {
        v.to_string()
    }
}

/// Reads `<dir>/<rally_id>.csv`-style files; the id is the file stem.
pub fn read_rally_file(path: &Path, domains: &Domains) -> Result<Rally> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_rally_csv(&bytes, &id, domains).map_err(|e| e.in_file(path))
}

pub fn write_rally_file(dir: &Path, rally: &Rally, domains: &Domains) -> Result<()> {
    let text = write_rally_csv(rally, domains)?;
    let path = dir.join(format!("{}.csv", rally.id));
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

/// Every `*.csv` in `dir`, sorted by file name.
pub fn read_rally_dir(dir: &Path, domains: &Domains) -> Result<Vec<Rally>> {
    super::csv_files(dir)?
        .iter()
        .map(|p| read_rally_file(p, domains))
        .collect()
}
