//! Command-line harness: resolves a configuration, runs one experiment (or
//! a sweep of it), writes reports and data, and maps the result to an exit
//! code: 0 all checks pass, 1 a check failed, 2 bad configuration or
//! input, 3 numerical failure.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod sweep;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand as ClapSubcommand};

use config::{parse_config_text, RunConfig, Sources, Subcommand, OUT_ENV};
use error::CliError;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "semigroup-lab",
    version,
    about = "Residual-checked experiments on evolution families, Cole-Hopf and x-direction evolution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, ClapSubcommand)]
enum Command {
    /// Recover generators from the shifted logarithm of an evolution family
    Logrep(Opts),
    /// Heat to Burgers through the transform, against a direct solver
    Colehopf(Opts),
    /// Evolve boundary traces in x, frequency by frequency
    Xevolve(Opts),
    /// Half-order semigroup through subordination
    Subordinate(Opts),
    /// Closed-form identity checks with negative controls
    Identities(Opts),
    /// Every check at its reference parameters
    Suite(Opts),
}

#[derive(Debug, Args)]
struct Opts {
    /// key = value file; flags override it
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (default: $SEMIGROUP_LAB_OUT, else ./semigroup-lab-out)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    seed: Option<String>,
    /// Repeat the run along one numeric parameter
    #[arg(long, value_name = "KEY=V1,V2,..")]
    sweep: Option<String>,
    /// Set any configuration key
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
    #[arg(long = "kappa-im", allow_hyphen_values = true)]
    kappa_im: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    h: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dim: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    #[arg(long = "T", allow_hyphen_values = true)]
    big_t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<String>,
    #[arg(long = "t-end", allow_hyphen_values = true)]
    t_end: Option<String>,
    #[arg(long = "L", allow_hyphen_values = true)]
    big_l: Option<String>,
    #[arg(long)]
    gauge: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long = "lambda-re", allow_hyphen_values = true)]
    lambda_re: Option<String>,
    #[arg(long = "lambda-im", allow_hyphen_values = true)]
    lambda_im: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    targets: Option<String>,
    #[arg(long, value_name = "PATH")]
    traces: Option<String>,
}

impl Opts {
    fn flag_pairs(&self) -> Result<Vec<(String, String)>, CliError> {
        let named = [
            ("seed", &self.seed),
            ("mu", &self.mu),
            ("kappa", &self.kappa),
            ("kappa_im", &self.kappa_im),
            ("h", &self.h),
            ("scheme", &self.scheme),
            ("family", &self.family),
            ("dim", &self.dim),
            ("t", &self.t),
            ("s", &self.s),
            ("T", &self.big_t),
            ("n", &self.n),
            ("dt", &self.dt),
            ("t_end", &self.t_end),
            ("L", &self.big_l),
            ("gauge", &self.gauge),
            ("m", &self.m),
            ("lambda_re", &self.lambda_re),
            ("lambda_im", &self.lambda_im),
            ("x", &self.x),
            ("x2", &self.x2),
            ("targets", &self.targets),
            ("traces", &self.traces),
        ];
        let mut pairs = Vec::new();
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::config("set", format!("`{kv}` is not KEY=VALUE")))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        // Named flags are applied after --set, so they win.
        pairs.extend(
            named
                .into_iter()
                .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))),
        );
        Ok(pairs)
    }
}

fn resolve(sub: Subcommand, opts: &Opts) -> Result<RunConfig, CliError> {
    let file = match &opts.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            parse_config_text(&text, path)?
        }
        None => Vec::new(),
    };
    let sources = Sources {
        file,
        flags: opts.flag_pairs()?,
        out_flag: opts.out.clone(),
        out_env: std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
    };
    RunConfig::resolve(sub, sources)
}

/// Progress goes to stdout; a closed pipe is not an error.
fn say(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn execute(sub: Subcommand, opts: &Opts) -> Result<i32, CliError> {
    let cfg = resolve(sub, opts)?;
    let digest = cfg.digest();
    let resolved_file = |dir: &std::path::Path| -> Result<(), CliError> {
        let path = dir.join("config.resolved");
        fs::write(&path, cfg.canonical()).map_err(|e| CliError::io(&path, e))
    };
    match &opts.sweep {
        Some(spec) => {
            if sub == Subcommand::Suite {
                return Err(CliError::config(
                    "sweep",
                    "the suite runs fixed parameters and cannot be swept",
                ));
            }
            let (key, values) = sweep::parse_sweep(spec)?;
            let result = sweep::run_sweep(&cfg, &key, &values)?;
            result
                .outcome
                .write(&cfg.output_dir, &format!("{sub}_sweep_{key}"), &digest)?;
            resolved_file(&cfg.output_dir)?;
            say(&result.outcome.summary());
            Ok(result.exit_code)
        }
        None => {
            let outcome = experiments::run(&cfg)?;
            outcome.write(&cfg.output_dir, sub.name(), &digest)?;
            resolved_file(&cfg.output_dir)?;
            say(&outcome.summary());
            say(&format!(
                "{} reports written to {}\n",
                outcome.reports.len(),
                cfg.output_dir.display()
            ));
            Ok(if outcome.pass() { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
    }
}

/// Parse arguments (including the program name), run, and return the exit
/// code. Usage errors print clap's message and return 2.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let (sub, opts) = match &cli.command {
        Command::Logrep(o) => (Subcommand::Logrep, o),
        Command::Colehopf(o) => (Subcommand::Colehopf, o),
        Command::Xevolve(o) => (Subcommand::Xevolve, o),
        Command::Subordinate(o) => (Subcommand::Subordinate, o),
        Command::Identities(o) => (Subcommand::Identities, o),
        Command::Suite(o) => (Subcommand::Suite, o),
    };
    match execute(sub, opts) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
