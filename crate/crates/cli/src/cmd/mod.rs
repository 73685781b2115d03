pub mod analyze;
pub mod ingest;
pub mod odmatrix;
pub mod report;
pub mod simulate;
pub mod synth;

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(|f| BufReader::with_capacity(1 << 20, f)).map_err(|e| CliError::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// `path` with its extension replaced, or appended when it has none.
pub fn sibling(path: &Path, ext: &str) -> PathBuf {
    if path.extension().is_some() {
        path.with_extension(ext)
    } else {
        let mut s = path.as_os_str().to_owned();
        s.push(".");
        s.push(ext);
        PathBuf::from(s)
    }
}
