//! Small file helpers shared by every stage.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{AtdsError, Result};

/// Write `bytes` to `path` through a temporary file in the same directory
/// followed by a rename, so readers never observe a partial artifact.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| AtdsError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| AtdsError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| AtdsError::io(path, e))?;
    tmp.persist(path).map_err(|e| AtdsError::io(path, e.error))?;
    Ok(())
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| AtdsError::io(path, e))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| AtdsError::io(path, e))
}

/// Iterate the data lines of a TSV file: skips blank lines and `#` comments,
/// yields 1-based line numbers.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn atomic_write_to_missing_dir_fails() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("nope").join("out.txt");
        assert!(matches!(write_atomic(&p, b"x"), Err(AtdsError::Io { .. })));
    }

    #[test]
    fn data_lines_skip_comments() {
        let lines: Vec<_> = data_lines("# header\na\n\nb\r\n").collect();
        assert_eq!(lines, vec![(2, "a"), (4, "b")]);
    }
}
