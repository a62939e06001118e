use crate::lang::{BinOp, Expr};
use crate::value::{AttrSet, Value};

use super::ops::{apply_binop, apply_not};
use super::{reduce_cond, EvalWarning, VarBindings, VarConditions};

/// Result of partially evaluating a subtree.
#[derive(Clone, Debug)]
pub(crate) enum Partial {
    /// The undefined marker: a missing attribute or an ill-typed operation.
    Undef,
    Val(Value),
    /// Depends on unbound variables.
    Residual(Expr),
}

impl Partial {
    fn into_expr(self) -> Expr {
        match self {
            Partial::Val(v) => Expr::Literal(v),
            Partial::Residual(e) => e,
            Partial::Undef => unreachable!("undefined never reaches a residual"),
        }
    }
}

/// Replaces every bound variable with its value.
pub fn substitute_vars(p: &Expr, b: &VarBindings) -> Expr {
    match p {
        Expr::Var(v) => match b.get(v) {
            Some(val) => Expr::Literal(val.clone()),
            None => p.clone(),
        },
        Expr::Literal(_) | Expr::Attr(_) => p.clone(),
        Expr::Paren(inner) => Expr::paren(substitute_vars(inner, b)),
        Expr::Not(inner) => Expr::not(substitute_vars(inner, b)),
        Expr::Binary(op, l, r) => Expr::bin(*op, substitute_vars(l, b), substitute_vars(r, b)),
    }
}

/// Replaces every subtree whose operands are all literals with its value,
/// in one postorder pass. Ill-typed literal subtrees are left as they are.
pub fn fold_constants(p: &Expr) -> Expr {
    match p {
        Expr::Literal(_) | Expr::Attr(_) | Expr::Var(_) => p.clone(),
        Expr::Paren(inner) => match fold_constants(inner) {
            lit @ Expr::Literal(_) => lit,
            other => Expr::paren(other),
        },
        Expr::Not(inner) => {
            let inner = fold_constants(inner);
            match inner.as_literal().and_then(apply_not) {
                Some(v) => Expr::Literal(v),
                None => Expr::not(inner),
            }
        }
        Expr::Binary(op, l, r) => {
            let (l, r) = (fold_constants(l), fold_constants(r));
            match (l.as_literal(), r.as_literal()) {
                (Some(a), Some(b)) => match apply_binop(*op, a, b) {
                    Some(v) => Expr::Literal(v),
                    None => Expr::bin(*op, l, r),
                },
                _ => Expr::bin(*op, l, r),
            }
        }
    }
}

/// Evaluates with attributes and bindings substituted, tracking the
/// undefined marker. Only `||` absorbs an undefined operand.
pub(crate) fn partial_eval(e: &Expr, attrs: &AttrSet, b: &VarBindings, warn: &mut Vec<EvalWarning>) -> Partial {
    match e {
        Expr::Literal(v) => Partial::Val(v.clone()),
        Expr::Attr(a) => match attrs.get(a) {
            Some(v) => Partial::Val(v.clone()),
            None => Partial::Undef,
        },
        Expr::Var(v) => match b.get(v) {
            Some(val) => Partial::Val(val.clone()),
            None => Partial::Residual(e.clone()),
        },
        Expr::Paren(inner) => match partial_eval(inner, attrs, b, warn) {
            Partial::Residual(r) => Partial::Residual(Expr::paren(r)),
            other => other,
        },
        Expr::Not(inner) => match partial_eval(inner, attrs, b, warn) {
            Partial::Undef => Partial::Undef,
            Partial::Val(v) => match apply_not(&v) {
                Some(r) => Partial::Val(r),
                None => {
                    warn.push(EvalWarning::mismatch(e, format!("'!' applied to {v}")));
                    Partial::Undef
                }
            },
            Partial::Residual(r) => Partial::Residual(Expr::not(r)),
        },
        Expr::Binary(BinOp::Or, l, r) => {
            let lv = logical_operand(partial_eval(l, attrs, b, warn), e, warn);
            let rv = logical_operand(partial_eval(r, attrs, b, warn), e, warn);
            match (lv, rv) {
                (Partial::Undef, Partial::Residual(r)) | (Partial::Residual(r), Partial::Undef) => {
                    Partial::Residual(boolean_only(r))
                }
                (Partial::Undef, other) | (other, Partial::Undef) => other,
                (Partial::Val(x), Partial::Val(y)) => Partial::Val(apply_binop(BinOp::Or, &x, &y).expect("booleans")),
                (x, y) => Partial::Residual(Expr::or(x.into_expr(), y.into_expr())),
            }
        }
        Expr::Binary(op, l, r) => {
            let lv = partial_eval(l, attrs, b, warn);
            let rv = partial_eval(r, attrs, b, warn);
            match (lv, rv) {
                (Partial::Undef, _) | (_, Partial::Undef) => Partial::Undef,
                (Partial::Val(x), Partial::Val(y)) => match apply_binop(*op, &x, &y) {
                    Some(v) => Partial::Val(v),
                    None => {
                        warn.push(EvalWarning::mismatch(e, format!("'{op}' applied to {x} and {y}")));
                        Partial::Undef
                    }
                },
                (x, y) => Partial::Residual(Expr::bin(*op, x.into_expr(), y.into_expr())),
            }
        }
    }
}

/// A residual equal to `r` when `r` is a boolean and undefined otherwise,
/// which is what `undefined || r` means wherever it sits. Comparisons and
/// logical operators already yield only booleans; anything else gets a
/// `&& true` guard so a later non-boolean binding stays undefined.
fn boolean_only(r: Expr) -> Expr {
    let shaped = match r.unparen() {
        Expr::Not(_) => true,
        Expr::Binary(op, _, _) => !matches!(
            op,
            BinOp::Union | BinOp::Intersect | BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod
        ),
        _ => false,
    };
    if shaped {
        r
    } else {
        Expr::and(r, Expr::t())
    }
}

/// A non-boolean value beneath `||` is ill-typed and so undefined.
fn logical_operand(p: Partial, at: &Expr, warn: &mut Vec<EvalWarning>) -> Partial {
    match p {
        Partial::Val(ref v) if v.as_bool().is_none() => {
            warn.push(EvalWarning::mismatch(at, format!("'||' applied to {v}")));
            Partial::Undef
        }
        other => other,
    }
}

/// The variable conditions under which `p` holds for attributes `attrs`
/// given bindings `b`.
///
/// A missing attribute or ill-typed operation is undefined; undefinedness
/// spreads through every operator except `||`, which yields its other
/// operand. An undefined or false result gives `⟨b, false⟩`.
pub fn eval_pred(p: &Expr, attrs: &AttrSet, b: &VarBindings) -> VarConditions {
    eval_pred_with_diagnostics(p, attrs, b).0
}

/// [`eval_pred`] plus warnings for ill-typed operations met on the way.
pub fn eval_pred_with_diagnostics(p: &Expr, attrs: &AttrSet, b: &VarBindings) -> (VarConditions, Vec<EvalWarning>) {
    let mut warn = Vec::new();
    let out = match partial_eval(p, attrs, b, &mut warn) {
        Partial::Val(Value::Bool(true)) => VarConditions::new(b.clone(), Expr::t()),
        Partial::Residual(r) => {
            let c = reduce_cond(&VarConditions::new(b.clone(), r));
            if c.is_false() {
                VarConditions::new(b.clone(), Expr::f())
            } else {
                c
            }
        }
        Partial::Val(v @ (Value::Num(_) | Value::Str(_) | Value::Set(_))) => {
            warn.push(EvalWarning::mismatch(
                p,
                format!("predicate evaluated to non-boolean {v}"),
            ));
            VarConditions::new(b.clone(), Expr::f())
        }
        _ => VarConditions::new(b.clone(), Expr::f()),
    };
    (out, warn)
}
