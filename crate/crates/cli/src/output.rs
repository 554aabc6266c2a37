//! All-or-nothing writing of a set of output files.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

fn staging_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".partial");
    path.with_file_name(name)
}

/// Write every `(path, contents)` pair. Each file is staged next to its target and renamed
/// once all staging writes succeeded; on any failure nothing from this call is left behind.
pub fn write_all(files: &[(PathBuf, String)]) -> CliResult<()> {
    let mut staged: Vec<PathBuf> = Vec::with_capacity(files.len());
    let cleanup = |staged: &[PathBuf]| staged.iter().for_each(|p| drop(fs::remove_file(p)));
    for (path, contents) in files {
        let tmp = staging_path(path);
        if let Err(e) = fs::write(&tmp, contents) {
            let _ = fs::remove_file(&tmp);
            cleanup(&staged);
            return Err(CliError::io(path, e));
        }
        staged.push(tmp);
    }
    let mut done: Vec<&PathBuf> = Vec::new();
    for ((path, _), tmp) in files.iter().zip(&staged) {
        if let Err(e) = fs::rename(tmp, path) {
            cleanup(&staged);
            done.iter().for_each(|p| drop(fs::remove_file(p)));
            return Err(CliError::io(path, e));
        }
        done.push(path);
    }
    Ok(())
}

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}
