//! Machine-readable run reports and atomic output files.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct RunReport<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    /// The argument vector without the output path, so reports written to
    /// different files compare equal.
    pub command: Vec<String>,
    /// SHA-256 over every input file, in the order given.
    pub inputs_digest: String,
    pub seed: Option<u64>,
    pub results: T,
}

impl<T: Serialize> RunReport<T> {
    pub fn new(command: Vec<String>, inputs: &[&[u8]], seed: Option<u64>, results: T) -> Self {
        Self {
            tool: "dpbw",
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs_digest: digest(inputs),
            seed,
            results,
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Internal(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

pub fn digest(inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for bytes in inputs {
        // length prefix keeps ("ab", "c") and ("a", "bc") apart
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(io)
}

/// Minimal CSV writer: numbers use the shortest round-trip form, text is
/// quoted only when it must be.
#[derive(Default)]
pub struct Csv {
    out: String,
}

pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        // Debug on f64 is the shortest string that parses back to the same bits
        format!("{v:?}")
    } else {
        String::new()
    }
}

impl Csv {
    pub fn header(columns: &[&str]) -> Self {
        let mut c = Self::default();
        c.out.push_str(&columns.join(","));
        c.out.push('\n');
        c
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        let parts: Vec<String> = cells
            .into_iter()
            .map(|c| match c {
                Cell::Num(v) => fmt_num(v),
                Cell::Int(v) => v.to_string(),
                Cell::Bool(b) => b.to_string(),
                Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
                Cell::Text(t) => t,
                Cell::Empty => String::new(),
            })
            .collect();
        self.out.push_str(&parts.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_separates_inputs() {
        assert_ne!(digest(&[b"ab", b"c"]), digest(&[b"a", b"bc"]));
        assert_eq!(digest(&[b"x"]).len(), 64);
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 5.0 / 6.0, 123456789.0] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(fmt_num(f64::NAN), "");
    }

    #[test]
    fn csv_quotes_text() {
        let mut c = Csv::header(&["a", "b"]);
        c.row(vec!["x,y".into(), 1.5.into()]);
        assert_eq!(c.finish(), "a,b\n\"x,y\",1.5\n");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
