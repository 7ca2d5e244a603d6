//! Byte-stable CSV output.
//!
//! Columns: `sweep_axis,sweep_value,scheme,frame,value,lower,upper,status,
//! oracle_estimate,oracle_stderr`. Numbers carry nine significant digits
//! with a `.` decimal separator, the infinite rate serializes as the literal
//! `inf`, absent fields stay empty, lines end in LF.

use std::io::Write;
use std::path::Path;

use sarlab_core::gaussian::Bits;

use crate::sweep::Row;
use crate::CliError;

pub const HEADER: &str =
    "sweep_axis,sweep_value,scheme,frame,value,lower,upper,status,oracle_estimate,oracle_stderr";

/// Nine significant digits in positional notation.
pub fn format_value(x: f64) -> String {
    if x == 0.0 {
        return "0.000000000".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (9 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn format_bits(b: Bits) -> String {
    match b {
        Bits::Finite(v) => format_value(v),
        Bits::Infinite => "inf".to_string(),
    }
}

fn format_row(row: &Row) -> String {
    let opt = |v: Option<f64>| v.map(format_value).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        row.sweep_axis,
        format_value(row.sweep_value),
        row.scheme,
        row.frame,
        row.value.map(format_bits).unwrap_or_default(),
        opt(row.lower),
        opt(row.upper),
        row.status.as_csv(),
        opt(row.oracle_estimate),
        opt(row.oracle_stderr),
    )
}

/// Renders the full CSV document (header plus rows, LF line endings).
pub fn render_csv(rows: &[Row]) -> Result<String, CliError> {
    if rows.is_empty() {
        return Err(CliError::Config("no rows to write".into()));
    }
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format_row(row));
        out.push('\n');
    }
    Ok(out)
}

/// Writes the CSV document; refuses to create a file for an empty table.
pub fn write_csv(path: &Path, rows: &[Row]) -> Result<(), CliError> {
    let doc = render_csv(rows)?;
    let mut f = std::fs::File::create(path)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    f.write_all(doc.as_bytes())
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}
