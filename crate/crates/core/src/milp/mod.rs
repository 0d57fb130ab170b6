//! Mixed-integer programming: model, exact simplex, branch and bound, the
//! STL encoding and LP-format export.

mod bnb;
mod encode;
mod lp_format;
mod model;
mod program;
mod simplex;

pub use bnb::{solve, NodeOrder, SolverConfig};
pub use encode::{check_big_m, encode_satisfaction, Encoder, Encoding, Lit, Polarity, TraceVars};
pub use lp_format::{export_lp, export_lp_checked, parse_lp, LpExport};
pub use model::{Constraint, MilpModel, MilpSolution, Relation, Sense, Status, VarId, VarKind, Variable};
pub use program::{build_feasibility_program, build_ph_piece, build_ph_program, build_trace_distance_program, PhProgram};
pub use simplex::{solve_lp, LpOutcome, LpProblem, LpRow, PivotBudget};
