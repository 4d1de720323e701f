//! CSV output files and readers for them.
//!
//! Every emission writes all four files so a results directory always has
//! the same shape; tables with no data get a header row only.

use std::fs::{self, File};
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::bench::{BenchRow, Kernel};
use crate::sim::{MaeRow, SimulationTrace};

pub const DOMAIN_TRUST_FILE: &str = "domain_trust.csv";
pub const MAE_FILE: &str = "mae.csv";
pub const PRECISION_FILE: &str = "precision.csv";
pub const BENCH_FILE: &str = "bench.csv";

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}: unknown kernel {name:?}", path.display())]
    Kernel { path: PathBuf, name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainTrustRow {
    pub time_s: f64,
    pub sp_id: usize,
    pub domain_trust: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionRow {
    pub iteration: usize,
    pub dev_id: usize,
    pub sp_id: usize,
    pub pt: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct BenchCsvRow {
    n: usize,
    kernel: String,
    median_us: f64,
}

/// Everything one CLI invocation writes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub domain_trust: Vec<DomainTrustRow>,
    pub mae: Vec<MaeRow>,
    pub precision: Vec<PrecisionRow>,
    pub bench: Vec<BenchRow>,
}

impl Report {
    pub fn from_trace(trace: &SimulationTrace) -> Self {
        Self {
            domain_trust: trace
                .iterations
                .iter()
                .map(|r| DomainTrustRow {
                    time_s: r.time,
                    sp_id: r.sp.0,
                    domain_trust: r.domain_trust,
                })
                .collect(),
            mae: trace.mae_table().unwrap_or_default(),
            precision: trace
                .precision
                .iter()
                .map(|r| PrecisionRow {
                    iteration: r.iteration,
                    dev_id: r.dev.0,
                    sp_id: r.sp.0,
                    pt: r.pt,
                })
                .collect(),
            bench: Vec::new(),
        }
    }

    pub fn from_bench(bench: Vec<BenchRow>) -> Self {
        Self {
            bench,
            ..Self::default()
        }
    }

    /// Writes the four CSV files into `out_dir`, creating it if needed.
    pub fn emit(&self, out_dir: &Path) -> Result<(), CsvError> {
        fs::create_dir_all(out_dir).map_err(|source| CsvError::Io {
            path: out_dir.to_path_buf(),
            source,
        })?;
        write_rows(
            &out_dir.join(DOMAIN_TRUST_FILE),
            &["time_s", "sp_id", "domain_trust"],
            &self.domain_trust,
        )?;
        write_rows(
            &out_dir.join(MAE_FILE),
            &["block_start_s", "malicious_fraction", "mae"],
            &self.mae,
        )?;
        write_rows(
            &out_dir.join(PRECISION_FILE),
            &["iteration", "dev_id", "sp_id", "pt"],
            &self.precision,
        )?;
        let bench: Vec<BenchCsvRow> = self
            .bench
            .iter()
            .map(|r| BenchCsvRow {
                n: r.n,
                kernel: r.kernel.name().to_string(),
                median_us: r.median_us,
            })
            .collect();
        write_rows(&out_dir.join(BENCH_FILE), &["n", "kernel", "median_us"], &bench)
    }

    /// Reads back a directory written by [`Report::emit`].
    pub fn read(dir: &Path) -> Result<Self, CsvError> {
        let bench_path = dir.join(BENCH_FILE);
        let bench = read_rows::<BenchCsvRow>(&bench_path)?
            .into_iter()
            .map(|r| {
                let kernel = Kernel::from_name(&r.kernel).ok_or_else(|| CsvError::Kernel {
                    path: bench_path.clone(),
                    name: r.kernel.clone(),
                })?;
                Ok(BenchRow {
                    n: r.n,
                    kernel,
                    median_us: r.median_us,
                })
            })
            .collect::<Result<_, CsvError>>()?;
        Ok(Self {
            domain_trust: read_rows(&dir.join(DOMAIN_TRUST_FILE))?,
            mae: read_rows(&dir.join(MAE_FILE))?,
            precision: read_rows(&dir.join(PRECISION_FILE))?,
            bench,
        })
    }
}

/// Writes the trace's domain trust, MAE and precision tables plus an empty
/// benchmark table.
pub fn emit_trace(trace: &SimulationTrace, out_dir: &Path) -> Result<(), CsvError> {
    Report::from_trace(trace).emit(out_dir)
}

fn write_rows<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), CsvError> {
    let csv_err = |source| CsvError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(|source| CsvError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| CsvError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CsvError> {
    let mut r = csv::Reader::from_path(path).map_err(|source| CsvError::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(|source| CsvError::Csv {
            path: path.to_path_buf(),
            source,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        emit_trace(&SimulationTrace::default(), dir.path()).unwrap();
        let read = |f: &str| fs::read_to_string(dir.path().join(f)).unwrap();
        assert_eq!(read(DOMAIN_TRUST_FILE), "time_s,sp_id,domain_trust\n");
        assert_eq!(read(MAE_FILE), "block_start_s,malicious_fraction,mae\n");
        assert_eq!(read(PRECISION_FILE), "iteration,dev_id,sp_id,pt\n");
        assert_eq!(read(BENCH_FILE), "n,kernel,median_us\n");
    }

    #[test]
    fn io_error_names_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = Report::default().emit(&blocker.join("sub")).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }

    #[test]
    fn bench_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let report = Report::from_bench(vec![
            BenchRow {
                n: 150,
                kernel: Kernel::Grid,
                median_us: 1.25,
            },
            BenchRow {
                n: 150,
                kernel: Kernel::Fcm,
                median_us: 1e-7,
            },
        ]);
        report.emit(dir.path()).unwrap();
        assert_eq!(Report::read(dir.path()).unwrap(), report);
    }
}
