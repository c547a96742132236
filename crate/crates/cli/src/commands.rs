pub mod detect;
pub mod eval;
pub mod sweep;
pub mod synth;

use std::path::{Path, PathBuf};

use crate::CliError;

/// Lists image files (`.pgm`, `.png`) in a directory, sorted by name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))? {
        let path = entry.map_err(|e| CliError::Io(e.to_string()))?.path();
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        if matches!(ext.as_deref(), Some("pgm" | "png")) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// File name without its extension.
pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}
