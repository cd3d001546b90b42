//! Experiment outcomes and how they land on disk.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use semigroup_lab::{ReportBuilder, VerificationReport};

use crate::error::CliError;

/// Doubles carry 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| fmt_f64(v)).collect());
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join(format!("{}.csv", self.name));
        let mut w = csv::Writer::from_path(&path).map_err(|e| csv_error(&path, e))?;
        w.write_record(&self.header).map_err(|e| csv_error(&path, e))?;
        for row in &self.rows {
            w.write_record(row).map_err(|e| csv_error(&path, e))?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::Data {
        path: path.to_path_buf(),
        detail: e.to_string(),
    }
}

/// Everything one experiment produces.
#[derive(Debug, Default)]
pub struct Outcome {
    pub reports: Vec<VerificationReport>,
    /// Written next to `report.json`.
    pub tables: Vec<Table>,
    /// Written under `plotdata/`.
    pub plots: Vec<Table>,
    pub documents: Vec<(String, serde_json::Value)>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn merge(&mut self, other: Outcome) {
        self.reports.extend(other.reports);
        self.tables.extend(other.tables);
        self.plots.extend(other.plots);
        self.documents.extend(other.documents);
    }

    /// One report holding every residual as `<report>.<key>`.
    pub fn aggregate(&self, name: &str) -> VerificationReport {
        let mut b = ReportBuilder::new(name, "");
        for r in &self.reports {
            for (k, v) in &r.residuals {
                b.check(format!("{}.{k}", r.name), *v, r.tolerances[k]);
            }
        }
        let mut agg = b.finish();
        agg.wall_time = self.reports.iter().map(|r| r.wall_time).sum();
        agg
    }

    /// `report.json`, `reports/<name>.json`, tables, plot data and
    /// documents, every report stamped with `digest`.
    pub fn write(&self, dir: &Path, name: &str, digest: &str) -> Result<(), CliError> {
        let reports_dir = dir.join("reports");
        let plot_dir = dir.join("plotdata");
        for d in [dir, &reports_dir, &plot_dir] {
            fs::create_dir_all(d).map_err(|e| CliError::io(d, e))?;
        }
        write_json(
            &dir.join("report.json"),
            &self.aggregate(name).with_digest(digest.to_string()),
        )?;
        let mut seen = BTreeMap::new();
        for r in &self.reports {
            let count = seen.entry(r.name.clone()).or_insert(0usize);
            *count += 1;
            let file = if *count == 1 {
                format!("{}.json", r.name)
            } else {
                format!("{}_{count}.json", r.name)
            };
            write_json(&reports_dir.join(file), &r.clone().with_digest(digest.to_string()))?;
        }
        for t in &self.tables {
            t.write(dir)?;
        }
        for t in &self.plots {
            t.write(&plot_dir)?;
        }
        for (doc, value) in &self.documents {
            write_json(&dir.join(format!("{doc}.json")), value)?;
        }
        Ok(())
    }

    /// One line per report for the terminal.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for r in &self.reports {
            if r.pass {
                s.push_str(&format!("PASS {}\n", r.name));
            } else {
                let detail: Vec<String> = r
                    .failures()
                    .iter()
                    .map(|k| format!("{k}={:.3e} > {:.3e}", r.residuals[*k], r.tolerances[*k]))
                    .collect();
                s.push_str(&format!("FAIL {} ({})\n", r.name, detail.join(", ")));
            }
        }
        s
    }
}

pub fn write_json<T: serde::Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Data {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}
