use std::collections::BTreeSet;
use std::fmt;

use crate::value::Value;

/// Binary operators of the predicate language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    And,
    Or,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    Union,
    Intersect,
    /// Proper subset.
    PCont,
    /// Subset.
    Cont,
    In,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

/// Precedence level of `!`, tighter than every binary operator.
pub const NOT_LEVEL: u8 = 9;

impl BinOp {
    pub const ALL: [BinOp; 18] = [
        BinOp::And,
        BinOp::Or,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Lt,
        BinOp::Gt,
        BinOp::Le,
        BinOp::Ge,
        BinOp::Union,
        BinOp::Intersect,
        BinOp::PCont,
        BinOp::Cont,
        BinOp::In,
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Mod,
    ];

    /// Binding strength, 1 = loosest.
    pub fn level(self) -> u8 {
        match self {
            BinOp::And | BinOp::Or => 1,
            BinOp::Eq | BinOp::Ne => 2,
            BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => 3,
            BinOp::Union | BinOp::Intersect => 4,
            BinOp::PCont | BinOp::Cont => 5,
            BinOp::In => 6,
            BinOp::Add | BinOp::Sub => 7,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 8,
        }
    }

    /// ASCII spelling.
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::Union => "union",
            BinOp::Intersect => "intersect",
            BinOp::PCont => "pcont",
            BinOp::Cont => "cont",
            BinOp::In => "in",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
        }
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A predicate or condition expression tree.
///
/// `Paren` records explicit parentheses from source text. It is semantically
/// transparent; [`Expr::strip_parens`] removes it for structural comparisons.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Literal(Value),
    Attr(String),
    Var(String),
    Paren(Box<Expr>),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn t() -> Expr {
        Expr::Literal(Value::Bool(true))
    }

    pub fn f() -> Expr {
        Expr::Literal(Value::Bool(false))
    }

    pub fn lit(v: impl Into<Value>) -> Expr {
        Expr::Literal(v.into())
    }

    pub fn attr(name: impl Into<String>) -> Expr {
        Expr::Attr(name.into())
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn and(l: Expr, r: Expr) -> Expr {
        Expr::bin(BinOp::And, l, r)
    }

    pub fn or(l: Expr, r: Expr) -> Expr {
        Expr::bin(BinOp::Or, l, r)
    }

    pub fn eq(l: Expr, r: Expr) -> Expr {
        Expr::bin(BinOp::Eq, l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn paren(e: Expr) -> Expr {
        Expr::Paren(Box::new(e))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Expr::Literal(Value::Bool(true)))
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Expr::Literal(Value::Bool(false)))
    }

    pub fn as_literal(&self) -> Option<&Value> {
        match self {
            Expr::Literal(v) => Some(v),
            _ => None,
        }
    }

    /// Removes every `Paren` node.
    pub fn strip_parens(&self) -> Expr {
        match self {
            Expr::Paren(inner) => inner.strip_parens(),
            Expr::Not(inner) => Expr::not(inner.strip_parens()),
            Expr::Binary(op, l, r) => Expr::bin(*op, l.strip_parens(), r.strip_parens()),
            leaf => leaf.clone(),
        }
    }

    /// Equality ignoring explicit parentheses.
    pub fn same_structure(&self, other: &Expr) -> bool {
        self.strip_parens() == other.strip_parens()
    }

    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Paren(inner) | Expr::Not(inner) => inner.visit(f),
            Expr::Binary(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
            _ => {}
        }
    }

    /// Names of all variables referenced.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Var(v) = e {
                out.insert(v.clone());
            }
        });
        out
    }

    /// Names of all attributes referenced.
    pub fn attrs(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Attr(a) = e {
                out.insert(a.clone());
            }
        });
        out
    }

    /// Subexpressions in conjunctive position: reached from the root through
    /// `&&` and parentheses only.
    pub fn conjuncts(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        fn walk<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
            match e {
                Expr::Binary(BinOp::And, l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                Expr::Paren(inner) => walk(inner, out),
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// If this is `$v = X` or `X = $v` with `X` free of variables, returns
    /// the variable and `X`.
    pub fn as_var_equality(&self) -> Option<(&str, &Expr)> {
        let Expr::Binary(BinOp::Eq, l, r) = self else {
            return None;
        };
        let (l, r) = (l.unparen(), r.unparen());
        match (l, r) {
            (Expr::Var(v), other) | (other, Expr::Var(v)) if other.vars().is_empty() => Some((v, other)),
            _ => None,
        }
    }

    /// Strips any outer parentheses.
    pub fn unparen(&self) -> &Expr {
        let mut e = self;
        while let Expr::Paren(inner) = e {
            e = inner;
        }
        e
    }

    pub fn has_attrs(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| found |= matches!(e, Expr::Attr(_)));
        found
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::render::render_predicate(self))
    }
}
