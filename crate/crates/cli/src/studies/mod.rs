//! One runner per study kind.

mod models;
mod operators;
mod windows;

use crate::config::{Settings, StudyKind};
use crate::error::CliResult;
use crate::report::Outcome;

/// Run the study named by `settings` on the current rayon pool.
pub fn run(settings: &Settings) -> CliResult<Outcome> {
    match settings.study {
        StudyKind::Oracle => operators::oracle(settings),
        StudyKind::Semigroup => operators::semigroup(settings),
        StudyKind::Composition => operators::composition(settings),
        StudyKind::Parts => operators::parts(settings),
        StudyKind::RatioLemma => windows::ratio_lemma(settings),
        StudyKind::RlDivergence => windows::rl_divergence(settings),
        StudyKind::ElLimit => models::el_limit(settings),
        StudyKind::EnergyTerm => models::energy_term(settings),
        StudyKind::GradientCheck => models::gradient_check(settings),
    }
}
