//! Output plumbing: atomic file writes and fixed-precision float formatting.

use std::io::Write;
use std::path::{Path, PathBuf};

use troop::TroopError;

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Writes via a temp file in the destination directory, then renames, so a
/// failed run never leaves a truncated output.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = PathBuf::from(dir);
    tmp.push(format!(
        ".{}.tmp-{}",
        path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        std::process::id()
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

/// Buffered line sink: collects everything, then writes atomically (or
/// streams to stdout when no path is given).
pub enum OutputTarget {
    Stdout,
    File { path: PathBuf, buffer: String },
}

impl OutputTarget {
    pub fn new(path: Option<&Path>) -> Result<Self, TroopError> {
        Ok(match path {
            None => OutputTarget::Stdout,
            Some(p) => OutputTarget::File { path: p.to_path_buf(), buffer: String::new() },
        })
    }

    pub fn line(&mut self, text: &str) -> Result<(), TroopError> {
        match self {
            OutputTarget::Stdout => {
                println!("{text}");
                Ok(())
            }
            OutputTarget::File { buffer, .. } => {
                buffer.push_str(text);
                buffer.push('\n');
                Ok(())
            }
        }
    }

    pub fn finish(self) -> Result<(), TroopError> {
        match self {
            OutputTarget::Stdout => Ok(()),
            OutputTarget::File { path, buffer } => write_atomic(&path, buffer.as_bytes())
                .map_err(|e| TroopError::Config(format!("writing {}: {e}", path.display()))),
        }
    }
}
