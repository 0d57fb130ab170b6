//! Distances between Signal Temporal Logic formulae.

pub mod aos;
pub mod error;
pub mod formula;
pub mod geometry;
pub mod ingest;
pub mod milp;
pub mod oracle;
pub mod parser;
pub mod ph;
pub mod rational;
pub mod rewrite;
pub mod robustness;
pub mod scalar;
pub mod sd;
pub mod trace;

pub use aos::{aos, AosConfig, BoxExpr, SpaceTimeBox};
pub use error::{Error, Result, Side};
pub use formula::{Cmp, Formula, Interval, Predicate};
pub use ingest::{load_corpus, Corpus};
pub use parser::parse_formula;
pub use ph::{directed_ph, ph, PhConfig};
pub use rewrite::{delay, disjuncts, negate, relax, to_nnf};
pub use robustness::{robustness, satisfies, Robustness};
pub use scalar::{Rational, Scalar};
pub use sd::{sd, Normalizer};
pub use trace::{Domain, Trace};

pub type ExactFormula = Formula<Rational>;
pub type FloatFormula = Formula<f64>;
pub type ExactTrace = Trace<Rational>;
pub type FloatTrace = Trace<f64>;
