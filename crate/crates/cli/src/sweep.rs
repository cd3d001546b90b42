//! One experiment repeated along a parameter axis.

use std::collections::BTreeSet;

use rayon::prelude::*;

use semigroup_lab::ReportBuilder;

use crate::config::{spec_of, RunConfig};
use crate::error::CliError;
use crate::experiments;
use crate::output::{Outcome, Table};

/// `KEY=v1,v2,...` with a numeric key and at least one value.
pub fn parse_sweep(spec: &str) -> Result<(String, Vec<String>), CliError> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| CliError::config("sweep", format!("`{spec}` is not KEY=v1,v2,...")))?;
    let key = key.trim().to_string();
    let kind = spec_of(&key)
        .ok_or_else(|| CliError::config("sweep", format!("unknown key `{key}`")))?
        .kind;
    if !kind.is_numeric() {
        return Err(CliError::config("sweep", format!("`{key}` is not a numeric parameter")));
    }
    let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
    if values.iter().any(String::is_empty) {
        return Err(CliError::config("sweep", "empty value in list"));
    }
    Ok((key, values))
}

pub struct SweepResult {
    pub outcome: Outcome,
    pub exit_code: i32,
}

/// Runs every point (concurrently), sorts by axis value, and tabulates
/// every residual. A point that errors is recorded, not fatal.
pub fn run_sweep(base: &RunConfig, key: &str, values: &[String]) -> Result<SweepResult, CliError> {
    let configs = values
        .iter()
        .map(|v| base.with(key, v).map(|c| (v.clone(), c)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut points: Vec<(f64, String, Result<Outcome, CliError>)> = configs
        .into_par_iter()
        .map(|(v, cfg)| {
            let axis = v.parse::<f64>().unwrap_or(f64::NAN);
            (axis, v, experiments::run(&cfg))
        })
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut columns = BTreeSet::new();
    for (_, _, r) in &points {
        if let Ok(o) = r {
            for rep in &o.reports {
                columns.extend(rep.residuals.keys().map(|k| format!("{}.{k}", rep.name)));
            }
        }
    }
    let mut header = vec![key.to_string(), "status".to_string(), "error".to_string()];
    header.extend(columns.iter().cloned());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new(format!("sweep_{key}"), &header_refs);

    let mut outcome = Outcome::default();
    let mut first_error = None;
    for (_, v, r) in &points {
        let name = format!("{key}={v}");
        match r {
            Ok(o) => {
                let agg = o.aggregate(&name);
                let mut row = vec![
                    v.clone(),
                    if agg.pass { "pass" } else { "fail" }.to_string(),
                    String::new(),
                ];
                row.extend(
                    columns
                        .iter()
                        .map(|c| agg.residual(c).map(crate::output::fmt_f64).unwrap_or_default()),
                );
                table.push(row);
                outcome.reports.push(agg);
            }
            Err(e) => {
                first_error.get_or_insert(e.exit_code());
                let mut row = vec![v.clone(), format!("error:{}", e.exit_code()), e.to_string()];
                row.extend(columns.iter().map(|_| String::new()));
                table.push(row);
                outcome.reports.push(
                    ReportBuilder::new(name, &e.to_string())
                        .check("error", 1.0, 0.0)
                        .finish(),
                );
            }
        }
    }
    outcome.tables.push(table);
    let exit_code = first_error.unwrap_or(if outcome.pass() { 0 } else { 1 });
    Ok(SweepResult { outcome, exit_code })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_numeric_axes_only() {
        let (k, v) = parse_sweep("h=1e-2, 1e-3").unwrap();
        assert_eq!(k, "h");
        assert_eq!(v, vec!["1e-2", "1e-3"]);
        assert!(parse_sweep("family=random").is_err());
        assert!(parse_sweep("bogus=1").is_err());
        assert!(parse_sweep("h").is_err());
        assert!(parse_sweep("h=1,,2").is_err());
    }
}
