//! Generator recovery from the shifted logarithm of an evolution family.

use rand::Rng;

use semigroup_lab::evolution::{
    build_family, check_group_axioms, Coefficient, DifferenceScheme, EvolutionFamily, GeneratorSpec, TOL_SEMIGROUP,
};
use semigroup_lab::logrep::{
    cole_hopf_factor, generalized_cole_hopf_with, kappa_admissible, log_representation_with, normalized_generator_with,
    KappaShift, LogRepConfig, LogRepResult,
};
use semigroup_lab::operator_core::{op_norm, C64};
use semigroup_lab::{DenseOperator, ReportBuilder, VerificationReport};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{fmt_f64, Outcome, Table};

use super::rng;

pub const TOL_RECOVERY: f64 = 1e-6;
pub const TOL_KAPPA: f64 = 1e-8;
pub const TOL_NORMALIZED: f64 = 1e-8;
pub const GROUP_TRIPLES: usize = 50;

/// Shifts compared for kappa-independence, before the configured one.
pub const KAPPA_PANEL: [(f64, f64); 4] = [(0.3, 0.0), (1.0, 0.0), (2.0, 0.0), (1.0, 1.0)];
/// The comparison uses Richardson at this step so that truncation error,
/// which does depend on kappa, stays below the tolerance.
pub const KAPPA_STEP: f64 = 1e-3;

/// Entries uniform in [-1, 1], rescaled to operator norm `norm`.
pub fn random_matrix(dim: usize, norm: f64, rng: &mut impl Rng) -> Result<DenseOperator, CliError> {
    let entries: Vec<f64> = (0..dim * dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let m = DenseOperator::from_real(dim, &entries)?;
    let size = op_norm(&m);
    Ok(if size > 0.0 { m.scale_real(norm / size) } else { m })
}

pub fn family_from(
    kind: &str,
    dim: usize,
    norm: f64,
    coefficient: Coefficient,
    half_width: f64,
    rng: &mut impl Rng,
) -> Result<EvolutionFamily, CliError> {
    let spec = match kind {
        "random" => GeneratorSpec::constant(random_matrix(dim, norm, rng)?, "t"),
        "modulated" => GeneratorSpec::modulated(coefficient, random_matrix(dim, norm, rng)?, "t"),
        "rotation" => GeneratorSpec::constant(DenseOperator::from_real(2, &[0.0, -norm, norm, 0.0])?, "t"),
        "identity" => GeneratorSpec::constant(DenseOperator::zeros(dim), "t"),
        "diag" => {
            let values: Vec<f64> = (0..dim)
                .map(|k| {
                    if dim == 1 {
                        norm
                    } else {
                        norm * (2.0 * k as f64 / (dim - 1) as f64 - 1.0)
                    }
                })
                .collect();
            GeneratorSpec::constant(DenseOperator::diag_real(&values)?, "t")
        }
        "nilpotent" => {
            let mut entries = vec![0.0; dim * dim];
            for k in 0..dim.saturating_sub(1) {
                entries[k * dim + k + 1] = norm;
            }
            GeneratorSpec::constant(DenseOperator::from_real(dim, &entries)?, "t")
        }
        other => return Err(CliError::config("family", format!("unknown family `{other}`"))),
    };
    Ok(build_family(spec, half_width)?)
}

/// Random `(t, r, s)` in `[-T, T]^3`.
pub fn random_triples(n: usize, half_width: f64, rng: &mut impl Rng) -> Vec<(f64, f64, f64)> {
    let mut draw = || rng.random_range(-half_width..=half_width);
    (0..n).map(|_| (draw(), draw(), draw())).collect()
}

pub fn group_axioms(family: &EvolutionFamily, triples: &[(f64, f64, f64)]) -> VerificationReport {
    VerificationReport {
        name: "group_axioms".into(),
        ..check_group_axioms(family, triples)
    }
}

/// Largest pairwise distance between generators recovered with each
/// admissible shift; also returns how many shifts were admissible.
pub fn kappa_spread(family: &EvolutionFamily, t: f64, s: f64, extra: Option<C64>) -> Result<(f64, usize), CliError> {
    let cfg = LogRepConfig {
        scheme: DifferenceScheme::Richardson,
        ..LogRepConfig::with_step(KAPPA_STEP)
    };
    let (tp, sp) = (family.point(t), family.point(s));
    let mut estimates = Vec::new();
    let kappas = KAPPA_PANEL.iter().map(|&(re, im)| C64::new(re, im)).chain(extra);
    for k in kappas {
        let k = KappaShift::new(k)?;
        if kappa_admissible(family, &tp, &sp, k)? {
            estimates.push(log_representation_with(family, &tp, &sp, k, &cfg)?.generator_estimate);
        }
    }
    let mut spread: f64 = 0.0;
    for (i, a) in estimates.iter().enumerate() {
        for b in &estimates[i + 1..] {
            spread = spread.max(a.max_abs_diff(b));
        }
    }
    Ok((spread, estimates.len()))
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut rng = rng(cfg.seed);
    let half_width = cfg.f64("T");
    let family = family_from(
        cfg.raw("family"),
        cfg.usize("dim"),
        cfg.f64("norm"),
        cfg.coefficient(),
        half_width,
        &mut rng,
    )?;
    let kappa = KappaShift::new(C64::new(cfg.f64("kappa"), cfg.f64("kappa_im")))?;
    let lr = LogRepConfig {
        h: cfg.auto_f64("h"),
        scheme: cfg.scheme(),
        ..LogRepConfig::default()
    };
    let (t, s, mu) = (cfg.f64("t"), cfg.f64("s"), cfg.f64("mu"));
    for (key, v) in [("t", t), ("s", s)] {
        if v.abs() > half_width {
            return Err(CliError::config(
                key,
                format!("{v} lies outside [-T, T] with T = {half_width}"),
            ));
        }
    }

    let mut points = vec![t];
    points.extend((1..cfg.usize("samples")).map(|_| rng.random_range(-0.5 * half_width..=0.5 * half_width)));

    let sp = family.point(s);
    let mut table = Table::new("logrep", &["t", "s", "kappa_re", "kappa_im", "h", "residual"]);
    let (mut recovery, mut normalized_gap, mut scaling): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut first: Option<LogRepResult> = None;
    for &ti in &points {
        let tp = family.point(ti);
        let res = log_representation_with(&family, &tp, &sp, kappa, &lr)?;
        let normalized = normalized_generator_with(&family, &tp, &sp, kappa, &lr)?;
        let ch = generalized_cole_hopf_with(&family, &tp, &sp, kappa, mu, &lr)?;
        let residual = res.residual_vs_true.unwrap_or(f64::NAN);
        recovery = recovery.max(residual);
        normalized_gap = normalized_gap.max(normalized.max_abs_diff(&res.generator_estimate));
        scaling = scaling.max(ch.max_abs_diff(&normalized.scale_real(cole_hopf_factor(mu))));
        table.push(vec![
            fmt_f64(ti),
            fmt_f64(s),
            fmt_f64(kappa.value().re),
            fmt_f64(kappa.value().im),
            fmt_f64(res.fd_step),
            fmt_f64(residual),
        ]);
        first.get_or_insert(res);
    }

    let canonical = cfg.canonical();
    let mut out = Outcome::default();
    out.reports.push(
        ReportBuilder::new("generator_recovery", &canonical)
            .check("max_error", recovery, TOL_RECOVERY)
            .finish(),
    );
    out.reports.push(
        ReportBuilder::new("normalized_agreement", &canonical)
            .check("max_gap", normalized_gap, TOL_NORMALIZED)
            .finish(),
    );
    out.reports.push(
        ReportBuilder::new("cole_hopf_scaling", &canonical)
            .check("max_gap", scaling, 0.0)
            .finish(),
    );
    let (spread, admissible) = kappa_spread(&family, t, s, Some(kappa.value()))?;
    out.reports.push(
        ReportBuilder::new("kappa_independence", &format!("{canonical}admissible = {admissible}\n"))
            .check("max_pairwise", spread, TOL_KAPPA)
            .finish(),
    );
    let triples = random_triples(GROUP_TRIPLES, half_width, &mut rng);
    let axioms = group_axioms(&family, &triples);
    debug_assert!(axioms.tolerances.values().all(|&tol| tol == TOL_SEMIGROUP));
    out.reports.push(axioms);

    // Error against step size at the configured point.
    let mut conv = Table::new("logrep_convergence", &["h", "residual"]);
    let tp = family.point(t);
    for h in [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6] {
        if t.abs() + 2.0 * h > half_width {
            continue;
        }
        let step = LogRepConfig { h: Some(h), ..lr };
        let r = log_representation_with(&family, &tp, &sp, kappa, &step)?;
        conv.push_floats(&[h, r.residual_vs_true.unwrap_or(f64::NAN)]);
    }

    out.tables.push(table);
    out.plots.push(conv);
    if let Some(res) = first {
        let doc = serde_json::to_value(&res).map_err(|e| CliError::config("logrep_result", e.to_string()))?;
        out.documents.push(("logrep_result".into(), doc));
    }
    Ok(out)
}
