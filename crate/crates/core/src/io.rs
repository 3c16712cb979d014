//! On-disk formats (JSON for instances and solutions, CSV for tables) and
//! atomic file writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bco::Mode;
use crate::bench::{ExperimentReport, ExperimentRow};
use crate::solution::Solution;
use crate::state::SegmentedAssignment;
use crate::topology::{LightpathId, LightpathRequest};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestsFile {
    pub requests: Vec<LightpathRequest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub objective: usize,
    pub established: Vec<SegmentedAssignment>,
    pub failed: Vec<LightpathId>,
    pub seed: u64,
    pub mode: Mode,
    pub converters: Vec<usize>,
}

impl SolutionFile {
    pub fn new(solution: Solution, seed: u64, mode: Mode, converters: impl IntoIterator<Item = usize>) -> Self {
        Self {
            objective: solution.objective,
            established: solution.established,
            failed: solution.failed,
            seed,
            mode,
            converters: converters.into_iter().collect(),
        }
    }

    pub fn solution(&self) -> Solution {
        Solution {
            objective: self.objective,
            established: self.established.clone(),
            failed: self.failed.clone(),
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| FileError::Json {
        path: path.to_owned(),
        source,
    })
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), FileError> {
    let io_err = |source| FileError::Io {
        path: path.to_owned(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FileError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| FileError::Json {
        path: path.to_owned(),
        source,
    })?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub const TABLE_HEADER: [&str; 5] = ["nodes", "mode", "mean", "variance", "time_s"];

pub fn table_csv(rows: &[ExperimentRow]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TABLE_HEADER)?;
    for r in rows {
        w.write_record([
            r.nodes.to_string(),
            r.mode.to_string(),
            r.mean.to_string(),
            r.variance.to_string(),
            r.time_s.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

pub fn read_table_csv(path: &Path) -> Result<Vec<ExperimentRow>, FileError> {
    let csv_err = |source| FileError::Csv {
        path: path.to_owned(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    reader.deserialize().collect::<Result<Vec<_>, _>>().map_err(csv_err)
}

/// Sidecar file for raw per-run records: `bench.csv` -> `bench.runs.json`.
pub fn sidecar_path(table: &Path) -> PathBuf {
    table.with_extension("runs.json")
}

pub fn write_report(table: &Path, report: &ExperimentReport) -> Result<PathBuf, FileError> {
    let bytes = table_csv(&report.rows).map_err(|source| FileError::Csv {
        path: table.to_owned(),
        source,
    })?;
    write_atomic(table, &bytes)?;
    let sidecar = sidecar_path(table);
    write_json(&sidecar, &report.runs)?;
    Ok(sidecar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::route::Route;

    #[test]
    fn solution_schema() {
        let a = SegmentedAssignment::continuous(LightpathId(3), Route::new(vec![0, 1]), 2);
        let file = SolutionFile::new(Solution::new(vec![a], vec![LightpathId(4)]), 9, Mode::Full, [1]);
        let json: serde_json::Value = serde_json::to_value(&file).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "objective": 1,
                "established": [{"request": 3, "route": [0, 1], "segments": [{"links": [[0, 1]], "wavelength": 2}]}],
                "failed": [4],
                "seed": 9,
                "mode": "full",
                "converters": [1]
            })
        );
    }

    #[test]
    fn requests_schema() {
        let r: RequestsFile = serde_json::from_str(r#"{"requests": [{"id": 5, "src": 0, "dst": 2}]}"#).unwrap();
        assert_eq!(r.requests, vec![LightpathRequest::new(5, 0, 2)]);
    }

    #[test]
    fn csv_round_trip_keeps_floats_exact() {
        let rows = vec![ExperimentRow {
            nodes: 6,
            mode: Mode::Prob,
            mean: 176.0 / 3.0,
            variance: 0.1 + 0.2,
            time_s: 1.5,
        }];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_atomic(&path, &table_csv(&rows).unwrap()).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("nodes,mode,mean,variance,time_s\n6,prob,"));
        assert_eq!(read_table_csv(&path).unwrap(), rows);
        assert_eq!(sidecar_path(&path), dir.path().join("t.runs.json"));
    }
}
