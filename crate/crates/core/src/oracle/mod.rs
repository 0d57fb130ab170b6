//! Reference semantics used to cross-check the solvers.

mod language;
mod projection;

pub use language::{
    brute_directed_ph, language, language_with_budget, Bound, LangBox, LanguageBoxUnion, DEFAULT_BOX_BUDGET,
};
pub use projection::{grid_projection_measure, sample_satisfying};
