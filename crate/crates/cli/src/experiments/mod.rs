//! One module per subcommand. Each turns a resolved configuration into an
//! [`Outcome`]; the suite reuses their typed entry points.

pub mod colehopf;
pub mod identities;
pub mod logrep;
pub mod subordinate;
pub mod suite;
pub mod xevolve;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{RunConfig, Subcommand};
use crate::error::CliError;
use crate::output::Outcome;

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.subcommand {
        Subcommand::Logrep => logrep::run(cfg),
        Subcommand::Colehopf => colehopf::run(cfg),
        Subcommand::Xevolve => xevolve::run(cfg),
        Subcommand::Subordinate => subordinate::run(cfg),
        Subcommand::Identities => identities::run(cfg),
        Subcommand::Suite => suite::run(cfg),
    }
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
