//! Predicate evaluation into variable conditions, and the algebra over
//! variable conditions: substitution, folding, extraction, reduction and
//! merging.

mod conditions;
mod ops;
mod pipeline;

use std::collections::BTreeMap;
use std::fmt;

use crate::lang::Expr;
use crate::value::Value;

pub use conditions::{consistent, extract_bound, has_vars, may_be_sat, merge_all, merge_conds, reduce_cond};
pub use ops::{apply_binop, apply_not};
pub use pipeline::{eval_pred, eval_pred_with_diagnostics, fold_constants, substitute_vars};

/// Variable name to bound value.
pub type VarBindings = BTreeMap<String, Value>;

/// Bound variables plus a residual condition over the unbound ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarConditions {
    pub bindings: VarBindings,
    pub condition: Expr,
}

impl VarConditions {
    pub fn new(bindings: VarBindings, condition: Expr) -> Self {
        VarConditions { bindings, condition }
    }

    /// `⟨{}, true⟩`, the identity of [`merge_conds`].
    pub fn truth() -> Self {
        VarConditions::new(VarBindings::new(), Expr::t())
    }

    /// `⟨{}, false⟩`, absorbing under [`merge_conds`].
    pub fn falsity() -> Self {
        VarConditions::new(VarBindings::new(), Expr::f())
    }

    /// The condition is literally true.
    pub fn is_true(&self) -> bool {
        self.condition.is_true()
    }

    pub fn is_false(&self) -> bool {
        self.condition.is_false()
    }

    pub fn may_be_sat(&self) -> bool {
        may_be_sat(&self.condition)
    }
}

/// Renders bindings as `{A="team1", R="team1"}`.
pub fn render_bindings(b: &VarBindings) -> String {
    let items: Vec<_> = b.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{{{}}}", items.join(", "))
}

impl fmt::Display for VarConditions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", render_bindings(&self.bindings), self.condition)
    }
}

/// An ill-typed operation met during evaluation. Evaluation carries on,
/// treating the operation as undefined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalWarning {
    pub expr: String,
    pub message: String,
}

impl EvalWarning {
    pub(crate) fn mismatch(at: &Expr, message: String) -> Self {
        EvalWarning {
            expr: at.to_string(),
            message,
        }
    }
}

impl fmt::Display for EvalWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type mismatch in `{}`: {}", self.expr, self.message)
    }
}
