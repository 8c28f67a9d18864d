//! Report files: JSON, CSV and plot-ready tab-separated data.
//!
//! `beta.tsv` has columns `n beta lower_error upper_error`, where both
//! errors are the standard error of β. `time.tsv` has columns
//! `n mean_ms min_ms max_ms`; times are `nan` for deterministic budgets.
//! Both are pure functions of the report, so re-emitting from a saved
//! `report.json` reproduces them byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::protocol::SweepReport;

pub const CSV_HEADER: &str =
    "n,mean_cut,std_cut,beta,beta_stderr,mean_time_ms,min_time_ms,max_time_ms,no_result_count";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// One row per size.
pub fn to_csv(report: &SweepReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &report.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.mean_cut,
            r.std_cut,
            r.beta,
            r.beta_stderr,
            opt(r.mean_time_ms),
            opt(r.min_time_ms),
            opt(r.max_time_ms),
            r.no_result_count
        );
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlotData {
    pub beta: String,
    pub time: String,
}

pub fn emit_plotdata(report: &SweepReport) -> PlotData {
    let mut beta = String::from("# n\tbeta\tlower_error\tupper_error\n");
    let mut time = String::from("# n\tmean_ms\tmin_ms\tmax_ms\n");
    let t = |v: Option<f64>| v.unwrap_or(f64::NAN);
    for r in &report.records {
        let _ = writeln!(beta, "{}\t{}\t{}\t{}", r.n, r.beta, r.beta_stderr, r.beta_stderr);
        let _ = writeln!(
            time,
            "{}\t{}\t{}\t{}",
            r.n,
            t(r.mean_time_ms),
            t(r.min_time_ms),
            t(r.max_time_ms)
        );
    }
    PlotData { beta, time }
}

pub fn write_plotdata(report: &SweepReport, dir: &Path) -> Result<()> {
    let plot = emit_plotdata(report);
    write(&dir.join("beta.tsv"), &plot.beta)?;
    write(&dir.join("time.tsv"), &plot.time)
}

/// Writes `report.json`, `report.csv`, `beta.tsv` and `time.tsv`.
pub fn write_report(report: &SweepReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    write(&dir.join("report.json"), &report.to_json())?;
    write(&dir.join("report.csv"), &to_csv(report))?;
    write_plotdata(report, dir)
}

pub fn read_report(path: &Path) -> Result<SweepReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    SweepReport::from_json(&text)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::file(path, e))
}

/// A fresh directory `<root>/<unix seconds>-<first 12 hex of sha256(config)>`.
/// Existing directories are never reused; a numeric suffix is added.
pub fn run_directory(root: &Path, config_text: &str) -> Result<PathBuf> {
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let digest = Sha256::digest(config_text.as_bytes());
    let hash: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
    fs::create_dir_all(root).map_err(|e| Error::file(root, e))?;
    for attempt in 0.. {
        let name = if attempt == 0 {
            format!("{stamp}-{hash}")
        } else {
            format!("{stamp}-{hash}-{attempt}")
        };
        let dir = root.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(Error::file(dir, e)),
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{run_sweep, BetaParams, Schedule, SweepOptions};
    use crate::solvers::{RandomSolver, SolverBudget};

    fn small_report(m: usize) -> SweepReport {
        run_sweep(
            &RandomSolver,
            Schedule::new(20, 10, 20).unwrap(),
            &BetaParams {
                m_instances: m,
                ..Default::default()
            },
            SolverBudget::wall_clock(1_000, 0).unwrap(),
            0,
            &SweepOptions::default(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn one_size_gives_one_row() {
        let report = small_report(3);
        let plot = emit_plotdata(&report);
        assert_eq!(plot.beta.lines().count(), 2);
        assert_eq!(plot.time.lines().count(), 2);
        assert_eq!(to_csv(&report).lines().count(), 2);
        assert!(to_csv(&report).starts_with(CSV_HEADER));
    }

    #[test]
    fn single_instance_error_bars_collapse() {
        let report = small_report(1);
        let plot = emit_plotdata(&report);
        let row: Vec<&str> = plot.beta.lines().nth(1).unwrap().split('\t').collect();
        assert_eq!(&row[2..], &["0", "0"]);
    }

    #[test]
    fn saved_report_reemits_identically() {
        let report = small_report(4);
        let dir = tempfile::tempdir().unwrap();
        write_report(&report, dir.path()).unwrap();
        let before = fs::read_to_string(dir.path().join("time.tsv")).unwrap();
        let loaded = read_report(&dir.path().join("report.json")).unwrap();
        assert_eq!(loaded, report);
        assert_eq!(emit_plotdata(&loaded).time, before);
    }

    #[test]
    fn run_directories_are_unique() {
        let dir = tempfile::tempdir().unwrap();
        let a = run_directory(dir.path(), "solver = sa").unwrap();
        let b = run_directory(dir.path(), "solver = sa").unwrap();
        assert_ne!(a, b);
    }
}
