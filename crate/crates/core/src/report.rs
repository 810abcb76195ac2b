//! Grid and estimate export: CSV with complex entries written as `re+imj`
//! (17 significant digits) and JSON via serde.

use std::io::Write;

use crate::engine::LimitGrid;
use crate::error::{Error, Result};
use crate::matrix::C64;

/// `re+imj` with 17 significant digits in each part, e.g.
/// `1.0000000000000000e0-2.5000000000000000e-1j`.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e}{sign}{:.16e}j", z.re, z.im.abs())
}

/// Inverse of [`format_complex`].
pub fn parse_complex(s: &str) -> Result<C64> {
    let bad = || Error::invalid(format!("not a complex literal: {s:?}"));
    let body = s.trim().strip_suffix('j').ok_or_else(bad)?;
    // the separating sign is the first '+'/'-' that is not a leading sign or
    // part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re: f64 = body[..split].parse().map_err(|_| bad())?;
    let im: f64 = body[split + 1..].parse().map_err(|_| bad())?;
    Ok(C64::new(re, if bytes[split] == b'-' { -im } else { im }))
}

/// Row-major CSV of the grid entries, one grid row per line, no header.
pub fn write_grid_csv<W: Write>(grid: &LimitGrid, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    for row in grid.entries.chunks(grid.n) {
        w.write_record(row.iter().map(|&z| format_complex(z)))
            .map_err(|e| Error::invalid(format!("csv write failed: {e}")))?;
    }
    w.flush()
        .map_err(|e| Error::invalid(format!("csv flush failed: {e}")))?;
    Ok(())
}

pub fn grid_csv_string(grid: &LimitGrid) -> Result<String> {
    let mut buf = Vec::new();
    write_grid_csv(grid, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is ascii"))
}

/// Parses a grid CSV back into row-major entries.
pub fn read_grid_csv(text: &str) -> Result<Vec<Vec<C64>>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| Error::invalid(format!("csv read failed: {e}")))?;
            rec.iter().map(parse_complex).collect()
        })
        .collect()
}
