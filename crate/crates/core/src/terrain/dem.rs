//! ESRI-ASCII-style grid reading and writing.
//!
//! ```text
//! ncols         3
//! nrows         2
//! xllcorner     0
//! yllcorner     0
//! cellsize      5
//! NODATA_value  -9999
//! 1 2 3
//! 4 5 6
//! ```
//!
//! Rows are stored north first. Values are node samples at
//! `xllcorner + col * cellsize`, `yllcorner + row * cellsize`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::{GridShape, TerrainGrid};
use crate::error::{Error, Result};

pub const NODATA_DEFAULT: f64 = -9999.0;

#[derive(Default)]
struct Header {
    ncols: Option<usize>,
    nrows: Option<usize>,
    xll: Option<f64>,
    yll: Option<f64>,
    cellsize: Option<f64>,
    nodata: Option<f64>,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Splits a line into (1-based column, token) pairs.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out.into_iter()
}

pub fn parse_dem(text: &str) -> Result<TerrainGrid> {
    let mut header = Header::default();
    let mut lines = text.lines().enumerate().peekable();

    // Header: leading lines whose first token starts with a letter.
    while let Some(&(idx, line)) = lines.peek() {
        let mut toks = tokens(line);
        let Some((_, key)) = toks.next() else {
            lines.next();
            continue;
        };
        if !key.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            break;
        }
        lines.next();
        let lineno = idx + 1;
        let (col, value) = toks
            .next()
            .ok_or_else(|| parse_err(lineno, line.len() + 1, format!("missing value for `{key}`")))?;
        if let Some((extra_col, _)) = toks.next() {
            return Err(parse_err(lineno, extra_col, "unexpected token after header value"));
        }
        let number = || {
            value
                .parse::<f64>()
                .map_err(|_| parse_err(lineno, col, format!("invalid number `{value}` for `{key}`")))
        };
        let count = || {
            value
                .parse::<usize>()
                .map_err(|_| parse_err(lineno, col, format!("invalid count `{value}` for `{key}`")))
        };
        match key.to_ascii_lowercase().as_str() {
            "ncols" => header.ncols = Some(count()?),
            "nrows" => header.nrows = Some(count()?),
            "xllcorner" | "xllcenter" => header.xll = Some(number()?),
            "yllcorner" | "yllcenter" => header.yll = Some(number()?),
            "cellsize" => header.cellsize = Some(number()?),
            "nodata_value" => header.nodata = Some(number()?),
            _ => return Err(parse_err(lineno, 1, format!("unknown header key `{key}`"))),
        }
    }

    let last_line = text.lines().count().max(1);
    let ncols = header
        .ncols
        .ok_or_else(|| parse_err(last_line, 1, "missing `ncols` header"))?;
    let nrows = header
        .nrows
        .ok_or_else(|| parse_err(last_line, 1, "missing `nrows` header"))?;
    let cellsize = header
        .cellsize
        .ok_or_else(|| parse_err(last_line, 1, "missing `cellsize` header"))?;
    if ncols < 2 || nrows < 2 {
        return Err(parse_err(1, 1, "grid must be at least 2x2"));
    }
    if !(cellsize > 0.0 && cellsize.is_finite()) {
        return Err(parse_err(1, 1, "cellsize must be positive"));
    }

    // Data rows, north first.
    let mut north_first: Vec<Vec<f64>> = Vec::with_capacity(nrows);
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if north_first.len() == nrows {
            return Err(parse_err(lineno, 1, format!("more than {nrows} data rows")));
        }
        let mut row = Vec::with_capacity(ncols);
        for (col, tok) in tokens(line) {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(lineno, col, format!("invalid elevation `{tok}`")))?;
            if header.nodata == Some(v) {
                return Err(parse_err(lineno, col, "nodata value present in grid"));
            }
            if !v.is_finite() {
                return Err(parse_err(lineno, col, "non-finite elevation"));
            }
            row.push(v);
        }
        if row.len() != ncols {
            return Err(parse_err(
                lineno,
                line.len() + 1,
                format!("expected {ncols} values, found {}", row.len()),
            ));
        }
        north_first.push(row);
    }
    if north_first.len() != nrows {
        return Err(parse_err(
            last_line,
            1,
            format!("expected {nrows} data rows, found {}", north_first.len()),
        ));
    }

    let elevations: Vec<f64> = north_first.into_iter().rev().flatten().collect();
    TerrainGrid::new(
        [header.xll.unwrap_or(0.0), header.yll.unwrap_or(0.0)],
        cellsize,
        GridShape::new(nrows, ncols),
        elevations,
    )
}

/// Reads a grid file; `cell_size_override` replaces the header's cell size.
pub fn load_dem(path: impl AsRef<Path>, cell_size_override: Option<f64>) -> Result<TerrainGrid> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let grid = parse_dem(&text)?;
    match cell_size_override {
        Some(cell) => TerrainGrid::new(grid.origin(), cell, grid.shape(), grid.elevations().to_vec()),
        None => Ok(grid),
    }
}

/// Writes `grid` in the ASCII grid format. Values use the shortest representation
/// that parses back to the identical `f64`.
pub fn write_dem<W: Write>(grid: &TerrainGrid, mut out: W) -> std::io::Result<()> {
    let [xll, yll] = grid.origin();
    writeln!(out, "ncols {}", grid.cols())?;
    writeln!(out, "nrows {}", grid.rows())?;
    writeln!(out, "xllcorner {xll}")?;
    writeln!(out, "yllcorner {yll}")?;
    writeln!(out, "cellsize {}", grid.cell_size())?;
    writeln!(out, "NODATA_value {NODATA_DEFAULT}")?;
    let mut line = String::new();
    for row in (0..grid.rows()).rev() {
        line.clear();
        for col in 0..grid.cols() {
            if col > 0 {
                line.push(' ');
            }
            let _ = write!(line, "{}", grid.height(row, col));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn save_dem(grid: &TerrainGrid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_dem(grid, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 5\nNODATA_value -9999\n1 2\n3 4\n";

    #[test]
    fn reads_small_grid_north_first() {
        let g = parse_dem(SMALL).unwrap();
        assert_eq!(g.cell_size(), 5.0);
        assert_eq!(g.extent(), [5.0, 5.0]);
        // first text row is the northern one
        assert_eq!(g.height(1, 0), 1.0);
        assert_eq!(g.height(1, 1), 2.0);
        assert_eq!(g.height(0, 0), 3.0);
        assert_eq!(g.height(0, 1), 4.0);
    }

    #[test]
    fn ragged_row_is_error() {
        let text = "ncols 3\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n1 2 3\n4 5\n";
        match parse_dem(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 8),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_error() {
        assert!(matches!(parse_dem(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn nodata_cell_is_error() {
        let text = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n1 -9999\n3 4\n";
        match parse_dem(text) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (7, 3)),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_header_is_error() {
        let text = "ncols two\nnrows 2\ncellsize 1\n1 2\n3 4\n";
        match parse_dem(text) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 7)),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_dem("nrows 2\ncellsize 1\n1 2\n3 4\n").is_err());
        assert!(parse_dem("ncols 2\nnrows 3\ncellsize 1\n1 2\n3 4\n").is_err());
        assert!(parse_dem("ncols 2\nnrows 2\ncellsize 1\n1 2\n3 4\n5 6\n").is_err());
    }

    #[test]
    fn roundtrip_is_bit_identical() {
        let g = TerrainGrid::from_fn([12.5, -3.0], 0.1, GridShape::new(7, 9), |x, y| {
            (x * 1.7).sin() * 1e3 + y.cos() / 7.0
        })
        .unwrap();
        let mut buf = Vec::new();
        write_dem(&g, &mut buf).unwrap();
        let back = parse_dem(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, g);
    }
}
