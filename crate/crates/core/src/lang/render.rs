use super::expr::{BinOp, Expr};

/// Renders an expression in ASCII predicate syntax, adding parentheses only
/// where the tree would otherwise re-parse differently. Explicit `Paren`
/// nodes are always kept.
pub fn render_predicate(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out);
    out
}

fn write_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Literal(v) => out.push_str(&v.to_string()),
        Expr::Attr(a) => out.push_str(a),
        Expr::Var(v) => {
            out.push('$');
            out.push_str(v);
        }
        Expr::Paren(inner) => {
            out.push('(');
            write_expr(inner, out);
            out.push(')');
        }
        Expr::Not(inner) => {
            out.push('!');
            write_wrapped(inner, matches!(**inner, Expr::Binary(..)), out);
        }
        Expr::Binary(op, l, r) => {
            let level = op.level();
            write_wrapped(l, binary_level(l).is_some_and(|c| c < level), out);
            if *op == BinOp::Eq {
                out.push('=');
            } else {
                out.push(' ');
                out.push_str(op.symbol());
                out.push(' ');
            }
            write_wrapped(r, binary_level(r).is_some_and(|c| c <= level), out);
        }
    }
}

fn binary_level(e: &Expr) -> Option<u8> {
    match e {
        Expr::Binary(op, _, _) => Some(op.level()),
        _ => None,
    }
}

fn write_wrapped(e: &Expr, wrap: bool, out: &mut String) {
    if wrap {
        out.push('(');
        write_expr(e, out);
        out.push(')');
    } else {
        write_expr(e, out);
    }
}
