//! Field files.
//!
//! CSV layout: a header line `# nx ny h x0 y0`, then `ny` rows of `nx`
//! comma-separated values, the first row at `y0`. Cells that carry no value
//! are written as `nan`. Numbers use Rust's shortest round-trip formatting, so
//! a save/load cycle is bit-exact.
//!
//! PGM export is binary 8-bit grayscale (P5), top row first, with the
//! carried values mapped linearly from [min, max] onto [0, 255]; cells without
//! a value are black.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{check_len, DomainGrid, ScalarField};

/// Serialize raw per-cell values; `carried[k] == false` writes `nan`.
pub fn format_field(grid: &DomainGrid, values: &[f64], carried: &[bool]) -> Result<String> {
    check_len(grid, values.len())?;
    check_len(grid, carried.len())?;
    let mut out = String::with_capacity(grid.len() * 12);
    writeln!(out, "# {} {} {:?} {:?} {:?}", grid.nx, grid.ny, grid.h, grid.origin[0], grid.origin[1]).unwrap();
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let k = grid.index(i, j);
            if i > 0 {
                out.push(',');
            }
            if carried[k] && !values[k].is_nan() {
                write!(out, "{:?}", values[k]).unwrap();
            } else {
                out.push_str("nan");
            }
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn save_field(path: &Path, grid: &DomainGrid, values: &[f64], carried: &[bool]) -> Result<()> {
    fs::write(path, format_field(grid, values, carried)?)?;
    Ok(())
}

/// Header of a field file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldHeader {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: [f64; 2],
}

fn malformed(path: &Path, reason: impl Into<String>) -> Error {
    Error::MalformedFile { path: path.to_path_buf(), reason: reason.into() }
}

fn parse_value(tok: &str) -> Option<f64> {
    let t = tok.trim();
    if t.eq_ignore_ascii_case("nan") {
        Some(f64::NAN)
    } else {
        t.parse().ok()
    }
}

/// Parse a field file into its header and raw row-major values (NaN where
/// the file says `nan`).
pub fn parse_field(path: &Path, text: &str) -> Result<(FieldHeader, Vec<f64>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| malformed(path, "empty file"))?;
    let toks: Vec<&str> = header
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| malformed(path, "missing `#` header"))?
        .split_whitespace()
        .collect();
    if toks.len() != 5 {
        return Err(malformed(path, "header must read `# nx ny h x0 y0`"));
    }
    let nx: usize = toks[0].parse().map_err(|_| malformed(path, "bad nx"))?;
    let ny: usize = toks[1].parse().map_err(|_| malformed(path, "bad ny"))?;
    let nums: Vec<f64> = toks[2..]
        .iter()
        .map(|t| parse_value(t).filter(|v| v.is_finite()))
        .collect::<Option<_>>()
        .ok_or_else(|| malformed(path, "bad h/x0/y0"))?;
    let hdr = FieldHeader { nx, ny, h: nums[0], origin: [nums[1], nums[2]] };
    let mut values = Vec::with_capacity(nx * ny);
    for (row, line) in lines.enumerate() {
        if row >= ny {
            return Err(malformed(path, format!("more than {ny} data rows")));
        }
        let before = values.len();
        for tok in line.split(',') {
            values.push(parse_value(tok).ok_or_else(|| malformed(path, format!("bad value `{tok}` in row {row}")))?);
        }
        if values.len() - before != nx {
            return Err(malformed(path, format!("row {row} has {} values, expected {nx}", values.len() - before)));
        }
    }
    if values.len() != nx * ny {
        return Err(malformed(path, format!("{} data rows, expected {ny}", values.len() / nx.max(1))));
    }
    Ok((hdr, values))
}

/// Load raw values and check them against the grid geometry.
pub fn load_field(path: &Path, grid: &DomainGrid) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let (hdr, values) = parse_field(path, &text)?;
    if (hdr.nx, hdr.ny) != (grid.nx, grid.ny) {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", grid.nx, grid.ny),
            found: format!("{}x{}", hdr.nx, hdr.ny),
        });
    }
    let tol = 1e-9 * grid.h;
    if (hdr.h - grid.h).abs() > tol
        || (hdr.origin[0] - grid.origin[0]).abs() > tol
        || (hdr.origin[1] - grid.origin[1]).abs() > tol
    {
        return Err(Error::DimensionMismatch {
            expected: format!("h={} origin={:?}", grid.h, grid.origin),
            found: format!("h={} origin={:?}", hdr.h, hdr.origin),
        });
    }
    Ok(values)
}

pub fn save_scalar(path: &Path, grid: &DomainGrid, u: &ScalarField) -> Result<()> {
    save_field(path, grid, &u.values, grid.inside_mask())
}

pub fn load_scalar(path: &Path, grid: &DomainGrid) -> Result<ScalarField> {
    ScalarField::from_raw(grid, load_field(path, grid)?)
}

/// Read only the header of a field file.
pub fn read_header(path: &Path) -> Result<FieldHeader> {
    let text = fs::read_to_string(path)?;
    Ok(parse_field(path, &text)?.0)
}

pub fn format_pgm(grid: &DomainGrid, values: &[f64], carried: &[bool]) -> Result<Vec<u8>> {
    check_len(grid, values.len())?;
    check_len(grid, carried.len())?;
    let (lo, hi) = values
        .iter()
        .zip(carried)
        .filter(|(v, &c)| c && v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&v, _)| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    let mut out = format!("P5\n{} {}\n255\n", grid.nx, grid.ny).into_bytes();
    for j in (0..grid.ny).rev() {
        for i in 0..grid.nx {
            let k = grid.index(i, j);
            let v = values[k];
            let byte = if !carried[k] || !v.is_finite() || !(span > 0.0) {
                0
            } else {
                ((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
            };
            out.push(byte);
        }
    }
    Ok(out)
}

pub fn save_pgm(path: &Path, grid: &DomainGrid, u: &ScalarField) -> Result<()> {
    fs::write(path, format_pgm(grid, &u.values, grid.inside_mask())?)?;
    Ok(())
}
