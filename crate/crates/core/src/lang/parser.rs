//! Precedence-climbing parser for the predicate text format.

use crate::value::Value;

use super::expr::Expr;
use super::lexer::{tokenize, Spanned, Tok};
use super::ParseError;

/// Parses predicate text.
///
/// Binary operators are left-associative; `&&` and `||` share the loosest
/// level. A bare name is an attribute reference, `$name` a variable.
pub fn parse_predicate(text: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr(1)?;
    match p.peek() {
        Tok::Eof => Ok(e),
        other => Err(p.unexpected(other.clone())),
    }
}

/// Parses a single literal value (scalar or set) such as `"x"`, `-3.5`,
/// `true` or `{1, 2}`.
pub fn parse_literal(text: &str) -> Result<Value, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let v = match p.peek().clone() {
        Tok::Lit(v) => {
            p.pos += 1;
            v
        }
        Tok::LBrace => p.set_literal()?,
        other => return Err(p.unexpected(other)),
    };
    match p.peek() {
        Tok::Eof => Ok(v),
        other => Err(p.unexpected(other.clone())),
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn unexpected(&self, tok: Tok) -> ParseError {
        let (line, column) = self.here();
        let what = match tok {
            Tok::Eof => "unexpected end of predicate".to_string(),
            Tok::Op(op) => format!("unexpected operator '{op}'"),
            Tok::Name(n) => format!("unexpected name '{n}'"),
            Tok::Var(v) => format!("unexpected variable '${v}'"),
            Tok::Lit(v) => format!("unexpected literal {v}"),
            Tok::Not => "unexpected '!'".to_string(),
            Tok::LParen => "unexpected '('".to_string(),
            Tok::RParen => "unexpected ')'".to_string(),
            Tok::LBrace => "unexpected '{'".to_string(),
            Tok::RBrace => "unexpected '}'".to_string(),
            Tok::Comma => "unexpected ','".to_string(),
        };
        ParseError::syntax(line, column, what)
    }

    fn expr(&mut self, min_level: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(op) = *self.peek() {
            let level = op.level();
            if level < min_level {
                break;
            }
            self.pos += 1;
            let rhs = self.expr(level + 1)?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let tok = self.peek().clone();
        match tok {
            Tok::Not => {
                self.pos += 1;
                Ok(Expr::not(self.unary()?))
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr(1)?;
                match self.peek() {
                    Tok::RParen => {
                        self.pos += 1;
                        Ok(Expr::paren(inner))
                    }
                    other => Err(self.unexpected(other.clone())),
                }
            }
            Tok::LBrace => Ok(Expr::Literal(self.set_literal()?)),
            Tok::Lit(v) => {
                self.pos += 1;
                Ok(Expr::Literal(v))
            }
            Tok::Name(n) => {
                self.pos += 1;
                Ok(Expr::Attr(n))
            }
            Tok::Var(v) => {
                self.pos += 1;
                Ok(Expr::Var(v))
            }
            other => Err(self.unexpected(other)),
        }
    }

    fn set_literal(&mut self) -> Result<Value, ParseError> {
        // at '{'
        self.pos += 1;
        let mut items = Vec::new();
        if *self.peek() == Tok::RBrace {
            self.pos += 1;
            return Ok(Value::set(items).expect("empty set"));
        }
        loop {
            match self.peek().clone() {
                Tok::Lit(v) => {
                    self.pos += 1;
                    items.push(v);
                }
                Tok::LBrace => {
                    let (line, column) = self.here();
                    return Err(ParseError::syntax(line, column, "sets may not contain sets"));
                }
                other => return Err(self.unexpected(other)),
            }
            match self.peek() {
                Tok::Comma => self.pos += 1,
                Tok::RBrace => {
                    self.pos += 1;
                    return Ok(Value::set(items).expect("scalar members"));
                }
                other => return Err(self.unexpected(other.clone())),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::BinOp;
    use crate::value::Value;

    fn p(s: &str) -> Expr {
        parse_predicate(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn conjunction_with_variable() {
        let want = Expr::and(
            Expr::eq(Expr::attr("class"), Expr::lit("user")),
            Expr::eq(Expr::attr("team"), Expr::var("R")),
        );
        assert_eq!(p("class=\"user\" && team=$R"), want);
    }

    #[test]
    fn boolean_literals_any_case() {
        assert_eq!(p("True"), Expr::t());
        assert_eq!(p("tRuE"), Expr::t());
        assert_eq!(p("FALSE"), Expr::f());
    }

    #[test]
    fn and_or_share_level_left_assoc() {
        let want = Expr::or(
            Expr::and(
                Expr::eq(Expr::attr("a"), Expr::lit(1)),
                Expr::eq(Expr::attr("b"), Expr::lit(2)),
            ),
            Expr::eq(Expr::attr("c"), Expr::lit(3)),
        );
        assert_eq!(p("a=1 && b=2 || c=3"), want);
        // and the other way round: || first, then &&
        let want = Expr::and(
            Expr::or(
                Expr::eq(Expr::attr("a"), Expr::lit(1)),
                Expr::eq(Expr::attr("b"), Expr::lit(2)),
            ),
            Expr::eq(Expr::attr("c"), Expr::lit(3)),
        );
        assert_eq!(p("a=1 || b=2 && c=3"), want);
    }

    #[test]
    fn not_binds_tightest_and_nests() {
        assert_eq!(p("!a = 1"), Expr::eq(Expr::not(Expr::attr("a")), Expr::lit(1)));
        assert_eq!(p("!!x"), Expr::not(Expr::not(Expr::attr("x"))));
    }

    #[test]
    fn negative_literals_and_subtraction() {
        assert_eq!(p("a-1"), Expr::bin(BinOp::Sub, Expr::attr("a"), Expr::lit(1)));
        assert_eq!(p("a - -1"), Expr::bin(BinOp::Sub, Expr::attr("a"), Expr::lit(-1)));
        assert_eq!(
            p("-2.5"),
            Expr::Literal(Value::Num(crate::value::Number::new(-2.5).unwrap()))
        );
    }

    #[test]
    fn set_literals() {
        let s = Value::set([Value::str("blue"), Value::str("green")]).unwrap();
        assert_eq!(
            p("color in {\"blue\",\"green\"}"),
            Expr::bin(BinOp::In, Expr::attr("color"), Expr::Literal(s))
        );
        assert_eq!(p("{}"), Expr::Literal(Value::set([]).unwrap()));
        assert!(parse_predicate("{1, {2}}").is_err());
    }

    #[test]
    fn unicode_aliases() {
        assert_eq!(p("$A ≠ $R"), p("$A != $R"));
        assert_eq!(p("x ∈ s"), p("x in s"));
        assert_eq!(p("s ⊂ t"), p("s pcont t"));
        assert_eq!(p("s ⊆ t"), p("s cont t"));
        assert_eq!(p("s ∩ t ∪ u"), p("s intersect t union u"));
        assert_eq!(p("$UL ≥ $FL"), p("$UL >= $FL"));
    }

    #[test]
    fn names_may_start_with_digits() {
        assert_eq!(p("3d=1"), Expr::eq(Expr::attr("3d"), Expr::lit(1)));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_predicate("a = \"open") {
            Err(ParseError::UnterminatedString { line: 1, column: 5 }) => {}
            other => panic!("{other:?}"),
        }
        match parse_predicate("a & b") {
            Err(ParseError::UnknownOperator {
                line: 1,
                column: 3,
                token,
            }) => assert_eq!(token, "&"),
            other => panic!("{other:?}"),
        }
        match parse_predicate("a = \n  = b") {
            Err(ParseError::Syntax { line: 2, column: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_predicate("").is_err());
        assert!(parse_predicate("(a = 1").is_err());
        assert!(parse_predicate("a = 1)").is_err());
        assert!(parse_predicate("$").is_err());
    }

    #[test]
    fn literal_values() {
        assert_eq!(parse_literal("\"x y\"").unwrap(), Value::str("x y"));
        assert_eq!(parse_literal("-4").unwrap(), Value::int(-4));
        assert_eq!(
            parse_literal("{1, 2}").unwrap(),
            Value::set([Value::int(1), Value::int(2)]).unwrap()
        );
        assert!(parse_literal("a").is_err());
        assert!(parse_literal("1 2").is_err());
    }
}
