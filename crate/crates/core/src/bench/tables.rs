//! CSV tables written and read by the harness.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{BenchRow, DetectionRow, ProfileRow};
use crate::error::{Error, Result};
use crate::io::write_atomic;

pub const DETECTION_HEADER: &str = "trial,r0,strategy,detection_pct";
pub const BENCH_HEADER: &str = "trial,solver,final_gap,wall_time_s";
pub const PROFILE_HEADER: &str = "delta,solver,rho";

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        msg: e.to_string(),
    }
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T], header: &str) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    let body = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut bytes = format!("{header}\n").into_bytes();
    bytes.extend(body);
    write_atomic(path, &bytes)
}

fn read_rows<T: DeserializeOwned>(path: &Path, header: &str) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let found = r.headers().map_err(|e| csv_err(path, e))?.iter().collect::<Vec<_>>().join(",");
    if found != header {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            msg: format!("expected header {header:?}, found {found:?}"),
        });
    }
    r.deserialize().map(|row| row.map_err(|e| csv_err(path, e))).collect()
}

pub fn write_detection_csv(path: &Path, rows: &[DetectionRow]) -> Result<()> {
    write_rows(path, rows, DETECTION_HEADER)
}

pub fn read_detection_csv(path: &Path) -> Result<Vec<DetectionRow>> {
    read_rows(path, DETECTION_HEADER)
}

pub fn write_bench_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    write_rows(path, rows, BENCH_HEADER)
}

pub fn read_bench_csv(path: &Path) -> Result<Vec<BenchRow>> {
    read_rows(path, BENCH_HEADER)
}

pub fn write_profile_csv(path: &Path, rows: &[ProfileRow]) -> Result<()> {
    write_rows(path, rows, PROFILE_HEADER)
}

pub fn read_profile_csv(path: &Path) -> Result<Vec<ProfileRow>> {
    read_rows(path, PROFILE_HEADER)
}
