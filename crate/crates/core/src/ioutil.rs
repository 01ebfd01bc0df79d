//! Whole-file atomic writes: write to a temporary sibling, then rename.
//!
//! Every output this crate produces (CSV, cache files) goes through
//! [`atomic_write`] so readers never observe a half-written file.

use crate::errors::{Error, Result};
use std::io::Write;
use std::path::Path;

/// Write `content` to `path` atomically (temp file + rename).
pub fn atomic_write(path: &Path, content: &str) -> Result<()> {
    let io_err = |source: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("output path {} has no file name", path.display())))?;
    let mut tmp = std::path::PathBuf::from(dir.unwrap_or_else(|| Path::new(".")));
    tmp.push(format!(".{}.tmp-{}", file_name.to_string_lossy(), std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(content.as_bytes()).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    std::fs::rename(&tmp, path).map_err(|source| {
        let _ = std::fs::remove_file(&tmp);
        io_err(source)
    })
}
