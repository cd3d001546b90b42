//! Structured records of residual checks.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Outcome of one verification: named residuals, the tolerance each one is
/// held to, and the verdict.
///
/// `pass` is true iff every residual is `<=` its tolerance. A NaN residual
/// never passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub inputs_digest: String,
    pub residuals: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub pass: bool,
    #[serde(rename = "wall_time_s")]
    pub wall_time: f64,
}

impl VerificationReport {
    pub fn residual(&self, key: &str) -> Option<f64> {
        self.residuals.get(key).copied()
    }

    /// Keys whose residual exceeds the tolerance.
    pub fn failures(&self) -> Vec<&str> {
        self.residuals
            .iter()
            .filter(|(k, r)| !within(**r, self.tolerances[k.as_str()]))
            .map(|(k, _)| k.as_str())
            .collect()
    }

    /// Replace the digest, e.g. with the digest of a resolved run configuration.
    pub fn with_digest(mut self, digest: String) -> Self {
        self.inputs_digest = digest;
        self
    }
}

fn within(residual: f64, tolerance: f64) -> bool {
    residual <= tolerance
}

/// Hex SHA-256 of a canonical input description.
pub fn digest(canonical: &str) -> String {
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// Accumulates residual/tolerance pairs and stamps the wall time on finish.
#[derive(Debug)]
pub struct ReportBuilder {
    name: String,
    digest: String,
    residuals: BTreeMap<String, f64>,
    tolerances: BTreeMap<String, f64>,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(name: impl Into<String>, canonical_inputs: &str) -> Self {
        Self {
            name: name.into(),
            digest: digest(canonical_inputs),
            residuals: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            started: Instant::now(),
        }
    }

    pub fn check(&mut self, key: impl Into<String>, residual: f64, tolerance: f64) -> &mut Self {
        let key = key.into();
        self.residuals.insert(key.clone(), residual);
        self.tolerances.insert(key, tolerance);
        self
    }

    pub fn finish(&mut self) -> VerificationReport {
        let pass = self.residuals.iter().all(|(k, r)| within(*r, self.tolerances[k]));
        VerificationReport {
            name: self.name.clone(),
            inputs_digest: self.digest.clone(),
            residuals: self.residuals.clone(),
            tolerances: self.tolerances.clone(),
            pass,
            wall_time: self.started.elapsed().as_secs_f64(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_requires_every_residual_within_tolerance() {
        let r = ReportBuilder::new("a", "x")
            .check("r1", 1e-3, 1e-2)
            .check("r2", 0.0, 0.0)
            .finish();
        assert!(r.pass);
        let r = ReportBuilder::new("a", "x")
            .check("r1", 1e-3, 1e-2)
            .check("r2", 2.0, 1.0)
            .finish();
        assert!(!r.pass);
        assert_eq!(r.failures(), vec!["r2"]);
    }

    #[test]
    fn nan_never_passes() {
        let r = ReportBuilder::new("a", "x").check("r", f64::NAN, 1.0).finish();
        assert!(!r.pass);
    }

    #[test]
    fn json_schema_field_names() {
        let r = ReportBuilder::new("n", "x").check("r", 0.5, 1.0).finish();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in [
            "name",
            "inputs_digest",
            "residuals",
            "tolerances",
            "pass",
            "wall_time_s",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(r.inputs_digest, digest("x"));
        assert_eq!(r.inputs_digest.len(), 64);
    }
}
