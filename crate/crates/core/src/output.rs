//! CSV/JSON output conventions shared by the library and the CLI.
//!
//! CSV files carry `# key = value` metadata lines, then a header row, then
//! data rows. Numbers use `.` as decimal separator and shortest round-trip
//! formatting, so identical inputs produce identical bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

pub fn write_metadata<W: Write>(mut w: W, metadata: &[(String, String)]) -> Result<()> {
    for (k, v) in metadata {
        writeln!(w, "# {k} = {v}")?;
    }
    Ok(())
}

/// Metadata block followed by a CSV table of numbers.
pub fn write_numeric_csv<W, I, R>(w: W, metadata: &[(String, String)], header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = f64>,
{
    write_optional_csv(w, metadata, header, rows.into_iter().map(|r| r.into_iter().map(Some)))
}

/// Like [`write_numeric_csv`], with `None` written as an empty cell.
pub fn write_optional_csv<W, I, R>(mut w: W, metadata: &[(String, String)], header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = Option<f64>>,
{
    write_metadata(&mut w, metadata)?;
    let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    csv.write_record(header)?;
    for row in rows {
        csv.write_record(row.into_iter().map(|x| x.map(format_number).unwrap_or_default()))?;
    }
    csv.flush()?;
    Ok(())
}

/// Shortest round-trip text, switching to exponent form for very small or
/// large magnitudes.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    let tmp = path.with_file_name(format!(".{file_name}.tmp{}", std::process::id()));
    fs::write(&tmp, bytes)?;
    if let Err(e) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}
