use std::collections::BTreeSet;

use crate::lang::BinOp;
use crate::value::{Number, Value};

/// Applies a binary operator to two values. `None` means the operands do
/// not fit the operator (including division by zero), which evaluation
/// treats as undefined.
pub fn apply_binop(op: BinOp, l: &Value, r: &Value) -> Option<Value> {
    use Value::*;
    Some(match (op, l, r) {
        (BinOp::And, Bool(a), Bool(b)) => Bool(*a && *b),
        (BinOp::Or, Bool(a), Bool(b)) => Bool(*a || *b),
        (BinOp::Eq, a, b) => Bool(a == b),
        (BinOp::Ne, a, b) => Bool(a != b),
        (BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge, a, b) => {
            let ord = match (a, b) {
                (Num(x), Num(y)) => x.cmp(y),
                (Str(x), Str(y)) => x.as_bytes().cmp(y.as_bytes()),
                _ => return None,
            };
            Bool(match op {
                BinOp::Lt => ord.is_lt(),
                BinOp::Gt => ord.is_gt(),
                BinOp::Le => ord.is_le(),
                _ => ord.is_ge(),
            })
        }
        (BinOp::In, x, Set(s)) if !x.is_set() => Bool(s.contains(x)),
        (BinOp::PCont, Set(a), Set(b)) => Bool(a.len() < b.len() && a.is_subset(b)),
        (BinOp::Cont, Set(a), Set(b)) => Bool(a.is_subset(b)),
        (BinOp::Union, Set(a), Set(b)) => Set(a.union(b).cloned().collect::<BTreeSet<_>>()),
        (BinOp::Intersect, Set(a), Set(b)) => Set(a.intersection(b).cloned().collect::<BTreeSet<_>>()),
        (BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod, Num(a), Num(b)) => {
            let (a, b) = (a.get(), b.get());
            let v = match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div if b != 0.0 => a / b,
                BinOp::Mod if b != 0.0 => a % b,
                _ => return None,
            };
            Num(Number::new(v)?)
        }
        _ => return None,
    })
}

/// Applies `!`. `None` for a non-boolean operand.
pub fn apply_not(v: &Value) -> Option<Value> {
    v.as_bool().map(|b| Value::Bool(!b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[i64]) -> Value {
        Value::set(items.iter().map(|&i| Value::int(i))).unwrap()
    }

    #[test]
    fn equality_across_kinds() {
        assert_eq!(
            apply_binop(BinOp::Eq, &Value::int(1), &Value::str("1")),
            Some(Value::Bool(false))
        );
        assert_eq!(
            apply_binop(BinOp::Ne, &Value::str("team1"), &Value::str("team1")),
            Some(Value::Bool(false))
        );
        let one_point_oh = Value::Num(Number::new(1.0).unwrap());
        assert_eq!(
            apply_binop(BinOp::Eq, &Value::int(1), &one_point_oh),
            Some(Value::Bool(true))
        );
    }

    #[test]
    fn ordering() {
        assert_eq!(
            apply_binop(BinOp::Gt, &Value::int(4), &Value::int(1)),
            Some(Value::Bool(true))
        );
        assert_eq!(
            apply_binop(BinOp::Lt, &Value::str("B"), &Value::str("a")),
            Some(Value::Bool(true))
        );
        assert_eq!(apply_binop(BinOp::Lt, &Value::int(3), &Value::str("x")), None);
        assert_eq!(apply_binop(BinOp::Le, &Value::Bool(true), &Value::Bool(true)), None);
    }

    #[test]
    fn sets() {
        assert_eq!(
            apply_binop(BinOp::In, &Value::int(1), &set(&[1, 2])),
            Some(Value::Bool(true))
        );
        assert_eq!(apply_binop(BinOp::In, &set(&[1]), &set(&[1, 2])), None);
        assert_eq!(
            apply_binop(BinOp::PCont, &set(&[1, 2]), &set(&[1, 2])),
            Some(Value::Bool(false))
        );
        assert_eq!(
            apply_binop(BinOp::Cont, &set(&[1, 2]), &set(&[1, 2])),
            Some(Value::Bool(true))
        );
        assert_eq!(
            apply_binop(BinOp::PCont, &set(&[]), &set(&[1])),
            Some(Value::Bool(true))
        );
        assert_eq!(apply_binop(BinOp::Union, &set(&[1]), &set(&[2])), Some(set(&[1, 2])));
        assert_eq!(
            apply_binop(BinOp::Intersect, &set(&[1, 3]), &set(&[2, 3])),
            Some(set(&[3]))
        );
        assert_eq!(apply_binop(BinOp::Union, &set(&[1]), &Value::int(2)), None);
    }

    #[test]
    fn arithmetic() {
        assert_eq!(
            apply_binop(BinOp::Mod, &Value::int(7), &Value::int(3)),
            Some(Value::int(1))
        );
        assert_eq!(apply_binop(BinOp::Div, &Value::int(1), &Value::int(0)), None);
        assert_eq!(apply_binop(BinOp::Add, &Value::int(1), &Value::str("a")), None);
        assert_eq!(apply_not(&Value::int(1)), None);
    }
}
