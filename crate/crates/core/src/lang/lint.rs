use std::collections::BTreeSet;
use std::fmt;

use super::expr::{BinOp, Expr};
use super::policy::{ElementId, PolicyGraph};
use crate::value::ValueKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolicyDiagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub element: Option<ElementId>,
    pub message: String,
}

impl PolicyDiagnostic {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for PolicyDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.severity, self.code)?;
        if let Some(el) = self.element {
            write!(f, " {el}")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Checks a policy for well-formedness.
///
/// Errors: a variable never anchored by `$v = X` (with `X` variable-free) in
/// conjunctive position of a domain predicate; an attribute inside a node
/// requirement; an operator applied to operands whose kinds are statically
/// known to be wrong. Warnings: `&&` and `||` mixed without parentheses.
pub fn lint_policy(p: &PolicyGraph) -> Vec<PolicyDiagnostic> {
    let mut out = Vec::new();

    let mut anchored = BTreeSet::new();
    for el in p.elements() {
        for c in p.domain(el).conjuncts() {
            if let Some((v, _)) = c.as_var_equality() {
                anchored.insert(v.to_string());
            }
        }
    }
    for v in p.vars() {
        if !anchored.contains(v) {
            let first = p
                .elements()
                .find(|&el| p.domain(el).vars().contains(v) || p.requirement(el).vars().contains(v));
            out.push(PolicyDiagnostic {
                severity: Severity::Error,
                code: "unanchored-variable",
                element: first,
                message: format!(
                    "variable ${v} has no `${v} = value` anchor in conjunctive position of a domain predicate"
                ),
            });
        }
    }

    for el in p.elements() {
        let (dom, req) = (p.domain(el), p.requirement(el));
        if let ElementId::Node(_) = el {
            for a in req.attrs() {
                out.push(PolicyDiagnostic {
                    severity: Severity::Error,
                    code: "attribute-in-node-requirement",
                    element: Some(el),
                    message: format!("node requirement refers to attribute '{a}'"),
                });
            }
        }
        for (which, e) in [("domain", dom), ("requirement", req)] {
            let mut msgs = Vec::new();
            infer(e, &mut msgs);
            if !matches!(kind_of(e), None | Some(ValueKind::Bool)) {
                msgs.push(format!("predicate is a {}, not a boolean", kind_of(e).unwrap()));
            }
            for m in msgs {
                out.push(PolicyDiagnostic {
                    severity: Severity::Error,
                    code: "type-misuse",
                    element: Some(el),
                    message: format!("{which} predicate: {m}"),
                });
            }
            if has_mixed_logic(e) {
                out.push(PolicyDiagnostic {
                    severity: Severity::Warning,
                    code: "mixed-and-or",
                    element: Some(el),
                    message: format!(
                        "{which} predicate mixes && and || without parentheses; they share one precedence level"
                    ),
                });
            }
        }
    }
    out
}

fn kind_of(e: &Expr) -> Option<ValueKind> {
    match e {
        Expr::Literal(v) => Some(v.kind()),
        Expr::Attr(_) | Expr::Var(_) => None,
        Expr::Paren(inner) => kind_of(inner),
        Expr::Not(_) => Some(ValueKind::Bool),
        Expr::Binary(op, _, _) => Some(match op {
            BinOp::Union | BinOp::Intersect => ValueKind::Set,
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => ValueKind::Num,
            _ => ValueKind::Bool,
        }),
    }
}

/// Collects messages for operands whose statically known kind cannot work.
fn infer(e: &Expr, msgs: &mut Vec<String>) {
    let want = |e: &Expr, ok: &[ValueKind], op: &str, msgs: &mut Vec<String>| {
        if let Some(k) = kind_of(e) {
            if !ok.contains(&k) {
                msgs.push(format!("'{op}' applied to a {k} operand ({e})"));
            }
        }
    };
    match e {
        Expr::Literal(_) | Expr::Attr(_) | Expr::Var(_) => {}
        Expr::Paren(inner) => infer(inner, msgs),
        Expr::Not(inner) => {
            want(inner, &[ValueKind::Bool], "!", msgs);
            infer(inner, msgs);
        }
        Expr::Binary(op, l, r) => {
            use ValueKind::*;
            let sym = op.symbol();
            match op {
                BinOp::And | BinOp::Or => {
                    want(l, &[Bool], sym, msgs);
                    want(r, &[Bool], sym, msgs);
                }
                BinOp::Eq | BinOp::Ne => {}
                BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => {
                    want(l, &[Num, Str], sym, msgs);
                    want(r, &[Num, Str], sym, msgs);
                    if let (Some(a), Some(b)) = (kind_of(l), kind_of(r)) {
                        if a != b && [a, b].iter().all(|k| [Num, Str].contains(k)) {
                            msgs.push(format!("'{sym}' compares a {a} with a {b}"));
                        }
                    }
                }
                BinOp::In => {
                    want(l, &[Bool, Num, Str], sym, msgs);
                    want(r, &[Set], sym, msgs);
                }
                BinOp::PCont | BinOp::Cont | BinOp::Union | BinOp::Intersect => {
                    want(l, &[Set], sym, msgs);
                    want(r, &[Set], sym, msgs);
                }
                BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => {
                    want(l, &[Num], sym, msgs);
                    want(r, &[Num], sym, msgs);
                }
            }
            infer(l, msgs);
            infer(r, msgs);
        }
    }
}

fn has_mixed_logic(e: &Expr) -> bool {
    let mut found = false;
    e.visit(&mut |n| {
        if let Expr::Binary(op @ (BinOp::And | BinOp::Or), l, r) = n {
            for child in [l, r] {
                if let Expr::Binary(c @ (BinOp::And | BinOp::Or), _, _) = **child {
                    found |= c != *op;
                }
            }
        }
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_policy_file;

    fn lint(text: &str) -> Vec<PolicyDiagnostic> {
        lint_policy(&parse_policy_file(text).unwrap()[0])
    }

    fn codes(text: &str) -> Vec<&'static str> {
        lint(text).into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn separation_of_duty_is_clean() {
        let text = "n1\tclass=\"user\" && team=$R\nn2\tclass=\"purchase\"\n\
                    n3\tclass=\"user\" && team=$A\t$A != $R\nn1 -> n2\tname=\"request\"\n\
                    n3 -> n2\tname=\"approve\"\n";
        assert!(lint(text).is_empty());
    }

    #[test]
    fn attribute_in_node_requirement() {
        assert_eq!(
            codes("n\tclass=\"file\"\towner=$U"),
            vec!["unanchored-variable", "attribute-in-node-requirement"]
        );
        assert_eq!(codes("n\towner=$U\towner=$U"), vec!["attribute-in-node-requirement"]);
    }

    #[test]
    fn anchor_under_disjunction_does_not_count() {
        assert_eq!(codes("n\t$x=1 || $x=2"), vec!["unanchored-variable"]);
        assert_eq!(codes("n\t!($x=1)"), vec!["unanchored-variable"]);
        assert!(codes("n\t(a=1 && ($x=2))").is_empty());
        // an anchor in a requirement does not count
        assert_eq!(codes("a -> b\tTrue\t$x=1"), vec!["unanchored-variable"]);
    }

    #[test]
    fn static_type_misuse() {
        assert_eq!(codes("n\t1 + \"a\" = 2"), vec!["type-misuse"]);
        assert_eq!(codes("n\tx in 3"), vec!["type-misuse"]);
        assert_eq!(codes("n\t3"), vec!["type-misuse"]);
        assert_eq!(codes("n\t1 < \"b\""), vec!["type-misuse"]);
        assert!(codes("n\tx + 1 > y && s cont {1}").is_empty());
    }

    #[test]
    fn mixed_logic_warns() {
        let d = lint("n\ta=1 && b=2 || c=3");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].severity, Severity::Warning);
        assert!(codes("n\t(a=1 && b=2) || c=3").is_empty());
    }
}
