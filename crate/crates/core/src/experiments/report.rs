use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::estimators::EnsembleStat;
use crate::solvers::{fmt_f64, Trajectory};

use super::config::ExperimentKind;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub name: String,
    pub stat: EnsembleStat,
}

/// `lower <= value <= upper`; open sides are infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Verdict {
    pub fn within(name: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Verdict {
            name: name.into(),
            passed: value >= lower && value <= upper,
            value,
            lower,
            upper,
        }
    }

    /// `lower < value <= upper`.
    pub fn half_open(name: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Verdict {
            name: name.into(),
            passed: value > lower && value <= upper,
            value,
            lower,
            upper,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub rows: Vec<ReportRow>,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<String>,
    /// Snapshot histories of path 0, one per solver arm.
    pub snapshots: Vec<(String, Trajectory)>,
}

impl ExperimentReport {
    pub(crate) fn new(kind: ExperimentKind) -> Self {
        ExperimentReport {
            kind,
            rows: Vec::new(),
            verdicts: Vec::new(),
            warnings: Vec::new(),
            snapshots: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, name: impl Into<String>, stat: EnsembleStat) {
        self.rows.push(ReportRow {
            name: name.into(),
            stat,
        });
    }

    /// Row for a deterministic quantity.
    pub(crate) fn push_exact(&mut self, name: impl Into<String>, value: f64, n_samples: usize) {
        self.push(
            name,
            EnsembleStat {
                mean: value,
                std_error: 0.0,
                n_samples,
            },
        );
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn row(&self, name: &str) -> Option<&EnsembleStat> {
        self.rows.iter().find(|r| r.name == name).map(|r| &r.stat)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    /// `stat_name,value,std_error,n_samples`
    pub fn stats_csv(&self) -> String {
        let mut s = String::from("stat_name,value,std_error,n_samples\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                r.name,
                fmt_f64(r.stat.mean),
                fmt_f64(r.stat.std_error),
                r.stat.n_samples
            );
        }
        s
    }

    /// `verdict,passed,value,lower,upper`
    pub fn verdicts_csv(&self) -> String {
        let mut s = String::from("verdict,passed,value,lower,upper\n");
        for v in &self.verdicts {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                v.name,
                v.passed,
                fmt_f64(v.value),
                fmt_f64(v.lower),
                fmt_f64(v.upper)
            );
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment: {}", self.kind);
        for r in &self.rows {
            let _ = writeln!(
                s,
                "  {:<40} {:>14.6e} +- {:.2e} (n = {})",
                r.name, r.stat.mean, r.stat.std_error, r.stat.n_samples
            );
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        for v in &self.verdicts {
            let _ = writeln!(
                s,
                "{} {}: {:.6e} in [{:.6e}, {:.6e}]",
                if v.passed { "PASS" } else { "FAIL" },
                v.name,
                v.value,
                v.lower,
                v.upper
            );
        }
        let _ = writeln!(
            s,
            "overall: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        );
        s
    }
}

/// Writes `<kind>.csv`, `verdicts.csv`, `summary.txt` and, when present,
/// `snapshots/<arm>.csv` into `out_dir`.
pub fn emit_report(report: &ExperimentReport, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    fs::write(
        out_dir.join(format!("{}.csv", report.kind)),
        report.stats_csv(),
    )?;
    fs::write(out_dir.join("verdicts.csv"), report.verdicts_csv())?;
    fs::write(out_dir.join("summary.txt"), report.summary())?;
    if !report.snapshots.is_empty() {
        let dir = out_dir.join("snapshots");
        fs::create_dir_all(&dir)?;
        for (label, traj) in &report.snapshots {
            let mut buf = Vec::new();
            traj.write_snapshots_csv(&mut buf)?;
            fs::write(dir.join(format!("{label}.csv")), buf)?;
        }
    }
    Ok(())
}
