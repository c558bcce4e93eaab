//! Text matrix/vector files and atomic writes.
//!
//! A matrix file starts with a header line `# m n` followed by `m` lines of
//! `n` comma-separated values. A vector file starts with `# n` followed by
//! its values, one per line (any comma/newline layout is accepted on read).
//! Values are written with Rust's shortest round-trip formatting, so a
//! write/read cycle is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Parsed contents of a matrix or vector file.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseData {
    /// `[m, n]` for matrices, `[n]` for vectors.
    pub shape: Vec<usize>,
    /// Row-major values.
    pub values: Vec<f64>,
}

fn parse_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

pub fn parse_dense(text: &str, path: &Path) -> Result<DenseData> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| parse_err(path, "empty file"))?;
    let dims = header.strip_prefix('#').ok_or_else(|| parse_err(path, "missing '# m n' header"))?;
    let shape: Vec<usize> = dims
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|e| parse_err(path, format!("bad dimension {s:?}: {e}"))))
        .collect::<Result<_>>()?;
    if shape.is_empty() || shape.len() > 2 {
        return Err(parse_err(path, format!("header must give 1 or 2 dimensions, got {}", shape.len())));
    }

    let mut values = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| parse_err(path, format!("line {}: bad value {s:?}: {e}", lineno + 2)))
            })
            .collect::<Result<_>>()?;
        if shape.len() == 2 && row.len() != shape[1] {
            return Err(parse_err(
                path,
                format!("line {}: expected {} values, got {}", lineno + 2, shape[1], row.len()),
            ));
        }
        values.extend(row);
    }
    let expected: usize = shape.iter().product();
    if values.len() != expected {
        return Err(parse_err(path, format!("expected {expected} values, got {}", values.len())));
    }
    Ok(DenseData { shape, values })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a matrix file; returns `(m, n, row-major values)`.
pub fn read_matrix(path: &Path) -> Result<(usize, usize, Vec<f64>)> {
    let data = parse_dense(&read_text(path)?, path)?;
    match data.shape[..] {
        [m, n] => Ok((m, n, data.values)),
        _ => Err(parse_err(path, "expected a matrix header '# m n'")),
    }
}

/// Reads a vector file. A one-column or one-row matrix is accepted too.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let data = parse_dense(&read_text(path)?, path)?;
    match data.shape[..] {
        [_] => Ok(data.values),
        [_, 1] | [1, _] => Ok(data.values),
        _ => Err(parse_err(path, "expected a vector header '# n'")),
    }
}

pub fn format_matrix(m: usize, n: usize, rows: &[f64]) -> String {
    let mut out = format!("# {m} {n}\n");
    for row in rows.chunks(n.max(1)).take(m) {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn format_vector(values: &[f64]) -> String {
    let mut out = format!("# {}\n", values.len());
    for v in values {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn write_matrix(path: &Path, m: usize, n: usize, rows: &[f64]) -> Result<()> {
    write_atomic(path, format_matrix(m, n, rows).as_bytes())
}

pub fn write_vector(path: &Path, values: &[f64]) -> Result<()> {
    write_atomic(path, format_vector(values).as_bytes())
}

/// Writes to a temporary sibling file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp: PathBuf = dir.join(tmp_name);
    {
        let mut f = fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(bytes).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(e)
    })
}
