//! Core of the LaSCO policy engine: the predicate language, evaluation into
//! variable conditions, system histories, policy matching and the
//! distributed enforcement simulator.

pub mod distsim;
pub mod eval;
pub mod history;
pub mod lang;
pub mod matcher;
pub mod value;

pub use eval::{eval_pred, VarBindings, VarConditions};
pub use lang::{parse_policy_file, parse_predicate, render_predicate, Expr, PolicyGraph};
pub use value::{AttrSet, Number, Value};
