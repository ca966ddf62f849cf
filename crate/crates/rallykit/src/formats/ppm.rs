//! Binary PPM (P6, maxval 255) frames and zero-padded frame directories.

use std::path::{Path, PathBuf};

use rallykit_core::flow::RgbFrame;

use crate::error::{Error, Result};

pub fn encode_ppm(frame: &RgbFrame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width, frame.height).into_bytes();
    out.extend_from_slice(&frame.data);
    out
}

/// Next whitespace-delimited header token, skipping `#` comments.
fn token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (*pos > start).then(|| &bytes[start..*pos])
}

pub fn decode_ppm(bytes: &[u8]) -> std::result::Result<RgbFrame, String> {
    let mut pos = 0;
    if token(bytes, &mut pos) != Some(b"P6".as_slice()) {
        return Err("not a binary PPM (P6) file".into());
    }
    let mut number = |what: &str| -> std::result::Result<usize, String> {
        token(bytes, &mut pos)
            .and_then(|t| std::str::from_utf8(t).ok())
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| format!("bad {what} in PPM header"))
    };
    let width = number("width")?;
    let height = number("height")?;
    let maxval = number("maxval")?;
    if maxval != 255 {
        return Err(format!("unsupported maxval {maxval}; only 8-bit PPM is read"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let len = width * height * 3;
    let data = bytes
        .get(pos..pos + len)
        .ok_or_else(|| format!("raster truncated: expected {len} bytes"))?;
    Ok(RgbFrame {
        width,
        height,
        data: data.to_vec(),
    })
}

pub fn read_ppm(path: &Path) -> Result<RgbFrame> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_ppm(&bytes).map_err(|m| Error::parse(path, 0, m))
}

pub fn write_ppm(path: &Path, frame: &RgbFrame) -> Result<()> {
    std::fs::write(path, encode_ppm(frame)).map_err(|e| Error::io(path, e))
}

/// Name of the `index`-th frame (1-based) in a sequence directory.
pub fn frame_name(index: usize) -> String {
    format!("frame_{index:06}.ppm")
}

/// All `*.ppm` files of a sequence directory in name order.
pub fn frame_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    super::files_with_extension(dir, "ppm")
}

pub fn write_sequence(dir: &Path, frames: &[RgbFrame]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (i, f) in frames.iter().enumerate() {
        write_ppm(&dir.join(frame_name(i + 1)), f)?;
    }
    Ok(())
}
