//! Readers and writers for every file the pipeline touches.

pub mod detections;
pub mod ppm;
pub mod rally_csv;
pub mod stream_csv;

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Regular files in `dir` with the given extension, sorted by file name.
pub fn files_with_extension(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == ext) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

pub fn csv_files(dir: &Path) -> Result<Vec<PathBuf>> {
    files_with_extension(dir, "csv")
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}
