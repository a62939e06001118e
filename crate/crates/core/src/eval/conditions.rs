use crate::lang::{BinOp, Expr};
use crate::value::{AttrSet, Value};

use super::pipeline::{partial_eval, substitute_vars, Partial};
use super::{VarBindings, VarConditions};

/// True if any variable occurs in `c`.
pub fn has_vars(c: &Expr) -> bool {
    let mut found = false;
    c.visit(&mut |e| found |= matches!(e, Expr::Var(_)));
    found
}

/// A reduced condition might be satisfiable iff it still has variables or
/// is literally true.
pub fn may_be_sat(c: &Expr) -> bool {
    has_vars(c) || c.is_true()
}

/// Pulls `$v = literal` and `literal = $v` out of conjunctive position,
/// replacing each with `true`. Two pulls giving one variable different
/// values yield `({}, false)`.
pub fn extract_bound(p: &Expr) -> (VarBindings, Expr) {
    let mut found = VarBindings::new();
    let mut conflict = false;
    let rest = extract(p, &mut found, &mut conflict);
    if conflict {
        (VarBindings::new(), Expr::f())
    } else {
        (found, rest)
    }
}

fn extract(e: &Expr, found: &mut VarBindings, conflict: &mut bool) -> Expr {
    match e {
        Expr::Binary(BinOp::And, l, r) => Expr::and(extract(l, found, conflict), extract(r, found, conflict)),
        Expr::Paren(inner) => Expr::paren(extract(inner, found, conflict)),
        Expr::Binary(BinOp::Eq, l, r) => {
            let (l, r) = (l.unparen(), r.unparen());
            let pair = match (l, r) {
                (Expr::Var(v), Expr::Literal(val)) | (Expr::Literal(val), Expr::Var(v)) => Some((v, val)),
                _ => None,
            };
            match pair {
                Some((v, val)) => {
                    if let Some(old) = found.insert(v.clone(), val.clone()) {
                        *conflict |= old != *val;
                    }
                    Expr::t()
                }
                None => e.clone(),
            }
        }
        other => other.clone(),
    }
}

/// Drops `true` conjuncts and `false` disjuncts and settles `false && X`
/// and `X || true`. Only positions where false and undefined behave alike
/// are touched (the root and, recursively, operands of `&&`/`||`), so
/// later substitutions cannot tell the difference.
pub(crate) fn simplify(e: &Expr) -> Expr {
    match e {
        Expr::Paren(inner) => match simplify(inner) {
            lit @ Expr::Literal(_) => lit,
            other => Expr::paren(other),
        },
        Expr::Binary(op @ (BinOp::And | BinOp::Or), l, r) => {
            let (l, r) = (simplify(l), simplify(r));
            match op {
                BinOp::And if l.is_true() => r,
                BinOp::And if r.is_true() => l,
                BinOp::And if l.is_false() => l,
                BinOp::Or if l.is_false() => r,
                BinOp::Or if r.is_false() => l,
                BinOp::Or if r.is_true() => r,
                _ => Expr::bin(*op, l, r),
            }
        }
        other => other.clone(),
    }
}

/// Substitutes, folds and extracts bindings until no new bindings appear.
/// A false condition or conflicting bindings give `⟨{}, false⟩`.
pub fn reduce_cond(c: &VarConditions) -> VarConditions {
    let no_attrs = AttrSet::new();
    let mut bindings = c.bindings.clone();
    let mut cond = c.condition.clone();
    loop {
        let substituted = substitute_vars(&cond, &bindings);
        let residual = match partial_eval(&substituted, &no_attrs, &bindings, &mut Vec::new()) {
            Partial::Val(Value::Bool(true)) => return VarConditions::new(bindings, Expr::t()),
            Partial::Residual(r) => simplify(&r),
            _ => return VarConditions::falsity(),
        };
        if residual.is_true() {
            return VarConditions::new(bindings, Expr::t());
        }
        if residual.is_false() {
            return VarConditions::falsity();
        }
        let (found, rest) = extract_bound(&residual);
        if rest.is_false() {
            return VarConditions::falsity();
        }
        if found.is_empty() {
            return VarConditions::new(bindings, rest);
        }
        // substituted residuals mention only unbound variables
        bindings.extend(found);
        cond = rest;
    }
}

/// True if no variable is bound to different values in `a` and `b`.
pub fn consistent(a: &VarBindings, b: &VarBindings) -> bool {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().all(|(k, v)| large.get(k).is_none_or(|w| w == v))
}

/// Conjoins two variable conditions.
pub fn merge_conds(a: &VarConditions, b: &VarConditions) -> VarConditions {
    if !consistent(&a.bindings, &b.bindings) {
        return VarConditions::falsity();
    }
    let mut bindings = a.bindings.clone();
    bindings.extend(b.bindings.iter().map(|(k, v)| (k.clone(), v.clone())));
    let condition = match (a.condition.is_true(), b.condition.is_true()) {
        (true, _) => b.condition.clone(),
        (_, true) => a.condition.clone(),
        _ => Expr::and(a.condition.clone(), b.condition.clone()),
    };
    reduce_cond(&VarConditions::new(bindings, condition))
}

/// Left fold of [`merge_conds`]; the empty merge is `⟨{}, true⟩`.
pub fn merge_all<'a>(conds: impl IntoIterator<Item = &'a VarConditions>) -> VarConditions {
    conds
        .into_iter()
        .fold(VarConditions::truth(), |acc, c| merge_conds(&acc, c))
}
