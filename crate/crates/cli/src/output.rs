//! Atomic output-file handling: content is buffered, written to a
//! temporary file in the target directory and renamed into place, so a
//! failed run never leaves a partial CSV or JSON behind.

use crate::CliError;
use std::io::Write;
use std::path::{Path, PathBuf};

pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    let path = dir.join(name);
    tmp.persist(&path)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Canonical file-name fragment for an impact speed.
pub fn speed_tag(v0: f64) -> String {
    format!("{v0}")
}
