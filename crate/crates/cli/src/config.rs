//! Resolved run configuration: a flat key/value map checked against a
//! registry of known keys.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use semigroup_lab::cole_hopf::GaugeFunction;
use semigroup_lab::evolution::{Coefficient, DifferenceScheme};
use semigroup_lab::report::digest;

use crate::error::CliError;

pub const OUT_ENV: &str = "SEMIGROUP_LAB_OUT";
pub const DEFAULT_OUT: &str = "semigroup-lab-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Subcommand {
    Logrep,
    Colehopf,
    Xevolve,
    Subordinate,
    Identities,
    Suite,
}

impl Subcommand {
    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::Logrep => "logrep",
            Subcommand::Colehopf => "colehopf",
            Subcommand::Xevolve => "xevolve",
            Subcommand::Subordinate => "subordinate",
            Subcommand::Identities => "identities",
            Subcommand::Suite => "suite",
        }
    }

    /// Defaults that differ from the registry's.
    fn overrides(&self) -> &'static [(&'static str, &'static str)] {
        match self {
            Subcommand::Xevolve => &[("L", "1"), ("dt", "0.1"), ("m", "64")],
            Subcommand::Subordinate => &[("dt", "0.05"), ("m", "128")],
            _ => &[],
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Float,
    Positive,
    /// Positive, or `auto` for a derived default.
    PositiveOrAuto,
    Int {
        min: u64,
    },
    Choice(&'static [&'static str]),
    Gauge,
    Coefficient,
    Scheme,
    FloatList,
    PositiveList,
    /// A path; empty means "not given".
    Path,
}

impl Kind {
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Kind::Float | Kind::Positive | Kind::PositiveOrAuto | Kind::Int { .. }
        )
    }
}

pub struct KeySpec {
    pub key: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub help: &'static str,
}

pub const FAMILIES: &[&str] = &["random", "rotation", "identity", "diag", "nilpotent", "modulated"];

pub const KEYS: &[KeySpec] = &[
    KeySpec {
        key: "seed",
        kind: Kind::Int { min: 0 },
        default: "0",
        help: "seed for every randomized draw",
    },
    KeySpec {
        key: "mu",
        kind: Kind::Positive,
        default: "1",
        help: "viscosity-like constant",
    },
    // logrep
    KeySpec {
        key: "family",
        kind: Kind::Choice(FAMILIES),
        default: "random",
        help: "evolution family",
    },
    KeySpec {
        key: "dim",
        kind: Kind::Int { min: 1 },
        default: "3",
        help: "matrix dimension",
    },
    KeySpec {
        key: "norm",
        kind: Kind::Positive,
        default: "1",
        help: "operator norm of random generators",
    },
    KeySpec {
        key: "coefficient",
        kind: Kind::Coefficient,
        default: "sin:1",
        help: "scalar modulation (const:c | linear:c | sin:c)",
    },
    KeySpec {
        key: "T",
        kind: Kind::Positive,
        default: "2",
        help: "families live on [-T, T]",
    },
    KeySpec {
        key: "t",
        kind: Kind::Float,
        default: "0.3",
        help: "evaluation point",
    },
    KeySpec {
        key: "s",
        kind: Kind::Float,
        default: "0",
        help: "base point",
    },
    KeySpec {
        key: "kappa",
        kind: Kind::Float,
        default: "1",
        help: "real part of the shift",
    },
    KeySpec {
        key: "kappa_im",
        kind: Kind::Float,
        default: "0",
        help: "imaginary part of the shift",
    },
    KeySpec {
        key: "h",
        kind: Kind::PositiveOrAuto,
        default: "auto",
        help: "difference step (auto: 1e-4 max(1,|t|))",
    },
    KeySpec {
        key: "scheme",
        kind: Kind::Scheme,
        default: "central",
        help: "central | forward | richardson",
    },
    KeySpec {
        key: "samples",
        kind: Kind::Int { min: 1 },
        default: "8",
        help: "random sample points",
    },
    // colehopf
    KeySpec {
        key: "L",
        kind: Kind::Positive,
        default: "4",
        help: "half width of the spatial domain",
    },
    KeySpec {
        key: "n",
        kind: Kind::Int { min: 8 },
        default: "256",
        help: "interior grid points",
    },
    KeySpec {
        key: "dt",
        kind: Kind::PositiveOrAuto,
        default: "auto",
        help: "time step (auto: grid spacing)",
    },
    KeySpec {
        key: "t_end",
        kind: Kind::Positive,
        default: "0.5",
        help: "final time",
    },
    KeySpec {
        key: "gauge",
        kind: Kind::Gauge,
        default: "sin:1",
        help: "gauge function (const:c | sin:c | poly:c)",
    },
    KeySpec {
        key: "residual_c",
        kind: Kind::Positive,
        default: "10",
        help: "constant in the residual bound C(dx^2 + dt^2)",
    },
    // xevolve
    KeySpec {
        key: "m",
        kind: Kind::Int { min: 2 },
        default: "64",
        help: "time samples (even)",
    },
    KeySpec {
        key: "targets",
        kind: Kind::FloatList,
        default: "-1,0,1",
        help: "x positions to evaluate",
    },
    KeySpec {
        key: "traces",
        kind: Kind::Path,
        default: "",
        help: "CSV with columns t,v0_re,v0_im,v1_re,v1_im",
    },
    KeySpec {
        key: "lambda_re",
        kind: Kind::Positive,
        default: "1",
        help: "resolvent point, real part",
    },
    KeySpec {
        key: "lambda_im",
        kind: Kind::Float,
        default: "0",
        help: "resolvent point, imaginary part",
    },
    // subordinate
    KeySpec {
        key: "x",
        kind: Kind::Positive,
        default: "1",
        help: "subordination parameter",
    },
    KeySpec {
        key: "x2",
        kind: Kind::Positive,
        default: "0.7",
        help: "second parameter for the semigroup law",
    },
    KeySpec {
        key: "ks",
        kind: Kind::PositiveList,
        default: "0.25,1,4",
        help: "Laplace arguments",
    },
];

pub fn spec_of(key: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|s| s.key == key)
}

/// Check one value against its key's kind; returns the canonical text.
pub fn validate(key: &str, value: &str) -> Result<String, CliError> {
    let spec = spec_of(key).ok_or_else(|| CliError::config(key, "unknown key"))?;
    let value = value.trim();
    let bad = |detail: String| CliError::config(key, detail);
    let float = |v: &str| -> Result<f64, CliError> {
        let x: f64 = v.trim().parse().map_err(|_| bad(format!("`{v}` is not a number")))?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(bad(format!("`{v}` is not finite")))
        }
    };
    let positive = |v: &str| -> Result<f64, CliError> {
        let x = float(v)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(bad(format!("must be positive, got {v}")))
        }
    };
    match spec.kind {
        Kind::Float => {
            float(value)?;
        }
        Kind::Positive => {
            positive(value)?;
        }
        Kind::PositiveOrAuto => {
            if value != "auto" {
                positive(value)?;
            }
        }
        Kind::Int { min } => {
            let n: u64 = value
                .parse()
                .map_err(|_| bad(format!("`{value}` is not a nonnegative integer")))?;
            if n < min {
                return Err(bad(format!("must be at least {min}, got {n}")));
            }
        }
        Kind::Choice(options) => {
            if !options.contains(&value) {
                return Err(bad(format!("`{value}` is not one of {}", options.join(" | "))));
            }
        }
        Kind::Gauge => {
            GaugeFunction::from_str(value).map_err(|e| bad(e.to_string()))?;
        }
        Kind::Coefficient => {
            Coefficient::from_str(value).map_err(|e| bad(e.to_string()))?;
        }
        Kind::Scheme => {
            DifferenceScheme::from_str(value).map_err(|e| bad(e.to_string()))?;
        }
        Kind::FloatList | Kind::PositiveList => {
            if value.is_empty() {
                return Err(bad("empty list".into()));
            }
            for item in value.split(',') {
                if spec.kind == Kind::PositiveList {
                    positive(item)?;
                } else {
                    float(item)?;
                }
            }
        }
        Kind::Path => {}
    }
    Ok(value.to_string())
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str, origin: &Path) -> Result<Vec<(String, String)>, CliError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let where_ = format!("{}:{}", origin.display(), lineno + 1);
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(where_.clone(), "expected `key = value`"))?;
        let k = k.trim().to_string();
        if out.iter().any(|(seen, _)| *seen == k) {
            return Err(CliError::config(where_, format!("duplicate key `{k}`")));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    params: BTreeMap<String, String>,
    pub seed: u64,
    pub output_dir: PathBuf,
}

/// Raw sources, lowest precedence first.
#[derive(Debug, Default)]
pub struct Sources {
    pub file: Vec<(String, String)>,
    pub flags: Vec<(String, String)>,
    pub out_flag: Option<PathBuf>,
    pub out_env: Option<PathBuf>,
}

impl RunConfig {
    /// Precedence: flag > file > subcommand default > registry default.
    /// The output directory may also come from the file (`out`), else the
    /// environment, else [`DEFAULT_OUT`].
    pub fn resolve(subcommand: Subcommand, sources: Sources) -> Result<Self, CliError> {
        let mut params: BTreeMap<String, String> = KEYS
            .iter()
            .map(|s| (s.key.to_string(), s.default.to_string()))
            .collect();
        for (k, v) in subcommand.overrides() {
            params.insert(k.to_string(), v.to_string());
        }
        let mut file_out = None;
        // A resolved config records its subcommand; replaying it elsewhere is a mistake.
        if let Some((_, v)) = sources.file.iter().find(|(k, _)| k == "subcommand") {
            if v != subcommand.name() {
                return Err(CliError::config(
                    "subcommand",
                    format!("file was written for `{v}`, not `{subcommand}`"),
                ));
            }
        }
        let file = sources.file.iter().filter(|(k, _)| k != "subcommand");
        for (k, v) in file.chain(&sources.flags) {
            if k == "out" {
                file_out = Some(PathBuf::from(v));
                continue;
            }
            params.insert(k.clone(), validate(k, v)?);
        }
        let output_dir = sources
            .out_flag
            .or(file_out)
            .or(sources.out_env)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        let seed = params["seed"].parse().expect("validated");
        Ok(Self {
            subcommand,
            params,
            seed,
            output_dir,
        })
    }

    /// The same configuration with one key replaced (sweeps).
    pub fn with(&self, key: &str, value: &str) -> Result<Self, CliError> {
        let mut next = self.clone();
        next.params.insert(key.to_string(), validate(key, value)?);
        next.seed = next.params["seed"].parse().expect("validated");
        Ok(next)
    }

    /// `key = value` lines in key order, output directory excluded.
    pub fn canonical(&self) -> String {
        let mut s = format!("subcommand = {}\n", self.subcommand);
        for (k, v) in &self.params {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    pub fn digest(&self) -> String {
        digest(&self.canonical())
    }

    pub fn raw(&self, key: &str) -> &str {
        self.params
            .get(key)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("unregistered key `{key}`"))
    }

    pub fn f64(&self, key: &str) -> f64 {
        self.raw(key).parse().expect("validated")
    }

    /// `None` for `auto`.
    pub fn auto_f64(&self, key: &str) -> Option<f64> {
        match self.raw(key) {
            "auto" => None,
            v => Some(v.parse().expect("validated")),
        }
    }

    pub fn usize(&self, key: &str) -> usize {
        self.raw(key).parse().expect("validated")
    }

    pub fn list(&self, key: &str) -> Vec<f64> {
        self.raw(key)
            .split(',')
            .map(|v| v.trim().parse().expect("validated"))
            .collect()
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        let v = self.raw(key);
        (!v.is_empty()).then(|| PathBuf::from(v))
    }

    pub fn gauge(&self) -> GaugeFunction {
        self.raw("gauge").parse().expect("validated")
    }

    pub fn coefficient(&self) -> Coefficient {
        self.raw("coefficient").parse().expect("validated")
    }

    pub fn scheme(&self) -> DifferenceScheme {
        self.raw("scheme").parse().expect("validated")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(file: &[(&str, &str)], flags: &[(&str, &str)]) -> Result<RunConfig, CliError> {
        let owned = |v: &[(&str, &str)]| v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        RunConfig::resolve(
            Subcommand::Colehopf,
            Sources {
                file: owned(file),
                flags: owned(flags),
                ..Sources::default()
            },
        )
    }

    #[test]
    fn flags_beat_file_beats_default() {
        let c = resolve(&[("n", "64"), ("mu", "2")], &[("n", "128")]).unwrap();
        assert_eq!(c.usize("n"), 128);
        assert_eq!(c.f64("mu"), 2.0);
        assert_eq!(c.f64("t_end"), 0.5);
    }

    #[test]
    fn subcommand_defaults_apply() {
        let c = RunConfig::resolve(Subcommand::Xevolve, Sources::default()).unwrap();
        assert_eq!(c.f64("L"), 1.0);
        assert_eq!(c.auto_f64("dt"), Some(0.1));
        let c = RunConfig::resolve(Subcommand::Colehopf, Sources::default()).unwrap();
        assert_eq!(c.auto_f64("dt"), None);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(resolve(&[("nope", "1")], &[]).is_err());
        assert!(resolve(&[], &[("n", "0")]).is_err());
        assert!(resolve(&[], &[("mu", "-1")]).is_err());
        assert!(resolve(&[], &[("dt", "fast")]).is_err());
        assert!(resolve(&[], &[("gauge", "cos:1")]).is_err());
        assert!(resolve(&[], &[("ks", "1,-2")]).is_err());
    }

    #[test]
    fn resolved_text_replays_for_its_own_subcommand() {
        let c = resolve(&[("n", "64")], &[]).unwrap();
        let text = c.canonical();
        let again = resolve(
            &parse_config_text(&text, Path::new("x"))
                .unwrap()
                .iter()
                .map(|(k, v)| (k.as_str(), v.as_str()))
                .collect::<Vec<_>>(),
            &[],
        )
        .unwrap();
        assert_eq!(again.digest(), c.digest());
        assert!(resolve(&[("subcommand", "logrep")], &[]).is_err());
        assert!(resolve(&[], &[("subcommand", "colehopf")]).is_err());
    }

    #[test]
    fn parses_files_with_comments() {
        let kv = parse_config_text("# header\nmu = 2  # trailing\n\n n=64\n", Path::new("f")).unwrap();
        assert_eq!(kv, vec![("mu".into(), "2".into()), ("n".into(), "64".into())]);
        assert!(parse_config_text("mu 2\n", Path::new("f")).is_err());
        assert!(parse_config_text("mu = 1\nmu = 2\n", Path::new("f")).is_err());
    }

    #[test]
    fn digest_ignores_output_dir_but_not_values() {
        let a = resolve(&[], &[]).unwrap();
        let mut b = a.clone();
        b.output_dir = PathBuf::from("elsewhere");
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), a.with("n", "64").unwrap().digest());
    }
}
