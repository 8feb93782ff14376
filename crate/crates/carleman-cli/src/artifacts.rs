//! Artifact emission: atomic writes, JSON with floats at 17 significant
//! digits, and plain CSV with the same float format. Identical inputs
//! produce byte-identical files.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::Formatter;

/// Compact JSON with `write_f64` overridden to 17 significant digits.
struct F17;

impl Formatter for F17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, F17);
    value
        .serialize(&mut ser)
        .map_err(|e| format!("serialization failed: {e}"))?;
    out.push(b'\n');
    Ok(out)
}

/// Write via a temp file in the same directory plus rename, so a crashed
/// run never leaves a half-written artifact.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)
            .map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    }
    let mut tmp = PathBuf::from(path);
    let name = tmp
        .file_name()
        .ok_or("artifact path has no file name")?
        .to_string_lossy()
        .into_owned();
    tmp.set_file_name(format!("{name}.tmp"));
    {
        let mut f = std::fs::File::create(&tmp)
            .map_err(|e| format!("cannot create {}: {e}", tmp.display()))?;
        f.write_all(bytes)
            .map_err(|e| format!("cannot write {}: {e}", tmp.display()))?;
        f.sync_all().ok();
    }
    std::fs::rename(&tmp, path)
        .map_err(|e| format!("cannot move artifact into place at {}: {e}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    write_atomic(path, &to_json_bytes(value)?)
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Minimal CSV: header plus rows of 17-significant-digit floats.
pub struct Csv {
    buf: String,
    cols: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Csv {
        Csv {
            buf: format!("{}\n", header.join(",")),
            cols: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[f64]) {
        assert_eq!(cells.len(), self.cols, "csv row width mismatch");
        let mut first = true;
        for &c in cells {
            if !first {
                self.buf.push(',');
            }
            self.buf.push_str(&fmt_f64(c));
            first = false;
        }
        self.buf.push('\n');
    }

    pub fn write(self, path: &Path) -> Result<(), String> {
        write_atomic(path, self.buf.as_bytes())
    }
}
