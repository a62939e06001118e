use crate::value::{Number, Value};

use super::expr::BinOp;
use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Lit(Value),
    Name(String),
    Var(String),
    Op(BinOp),
    Not,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Eof,
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    column: usize,
    expect_operand: bool,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut lx = Lexer {
        chars: src.char_indices().peekable(),
        src,
        line: 1,
        column: 1,
        expect_operand: true,
    };
    let mut out = Vec::new();
    loop {
        let t = lx.next_token()?;
        let done = t.tok == Tok::Eof;
        lx.expect_operand = matches!(t.tok, Tok::Op(_) | Tok::Not | Tok::LParen | Tok::LBrace | Tok::Comma);
        out.push(t);
        if done {
            return Ok(out);
        }
    }
}

impl<'a> Lexer<'a> {
    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len())
    }

    fn next_token(&mut self) -> Result<Spanned, ParseError> {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
        let (line, column) = (self.line, self.column);
        let at = |tok| Ok(Spanned { tok, line, column });
        let Some(c) = self.peek() else {
            return at(Tok::Eof);
        };
        match c {
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\n') | None => return Err(ParseError::UnterminatedString { line, column }),
                        Some(ch) => s.push(ch),
                    }
                }
                at(Tok::Lit(Value::Str(s)))
            }
            '$' => {
                self.bump();
                let name = self.word();
                if name.is_empty() {
                    return Err(ParseError::syntax(line, column, "expected variable name after '$'"));
                }
                at(Tok::Var(name))
            }
            '-' if self.expect_operand && matches!(self.peek2(), Some(d) if d.is_ascii_digit()) => {
                self.bump();
                let word = self.word();
                let n = self.number(&word, line, column)?;
                at(Tok::Lit(Value::Num(Number::new(-n.get()).expect("finite"))))
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let word = self.word();
                if word.bytes().all(|b| b.is_ascii_digit()) {
                    let n = self.number(&word, line, column)?;
                    return at(Tok::Lit(Value::Num(n)));
                }
                let tok = match word.as_str() {
                    "in" => Tok::Op(BinOp::In),
                    "pcont" => Tok::Op(BinOp::PCont),
                    "cont" => Tok::Op(BinOp::Cont),
                    "union" => Tok::Op(BinOp::Union),
                    "intersect" => Tok::Op(BinOp::Intersect),
                    w if w.eq_ignore_ascii_case("true") => Tok::Lit(Value::Bool(true)),
                    w if w.eq_ignore_ascii_case("false") => Tok::Lit(Value::Bool(false)),
                    _ => Tok::Name(word),
                };
                at(tok)
            }
            _ => {
                self.bump();
                let next = self.peek();
                let two = |lx: &mut Self, tok| {
                    lx.bump();
                    at(tok)
                };
                match (c, next) {
                    ('&', Some('&')) => two(self, Tok::Op(BinOp::And)),
                    ('|', Some('|')) => two(self, Tok::Op(BinOp::Or)),
                    ('!', Some('=')) => two(self, Tok::Op(BinOp::Ne)),
                    ('<', Some('=')) => two(self, Tok::Op(BinOp::Le)),
                    ('>', Some('=')) => two(self, Tok::Op(BinOp::Ge)),
                    ('!', _) => at(Tok::Not),
                    ('<', _) => at(Tok::Op(BinOp::Lt)),
                    ('>', _) => at(Tok::Op(BinOp::Gt)),
                    ('=', _) => at(Tok::Op(BinOp::Eq)),
                    ('+', _) => at(Tok::Op(BinOp::Add)),
                    ('-', _) => at(Tok::Op(BinOp::Sub)),
                    ('*', _) => at(Tok::Op(BinOp::Mul)),
                    ('/', _) => at(Tok::Op(BinOp::Div)),
                    ('%', _) => at(Tok::Op(BinOp::Mod)),
                    ('(', _) => at(Tok::LParen),
                    (')', _) => at(Tok::RParen),
                    ('{', _) => at(Tok::LBrace),
                    ('}', _) => at(Tok::RBrace),
                    (',', _) => at(Tok::Comma),
                    ('∈', _) => at(Tok::Op(BinOp::In)),
                    ('⊂', _) => at(Tok::Op(BinOp::PCont)),
                    ('⊆', _) => at(Tok::Op(BinOp::Cont)),
                    ('∩', _) => at(Tok::Op(BinOp::Intersect)),
                    ('∪', _) => at(Tok::Op(BinOp::Union)),
                    ('≠', _) => at(Tok::Op(BinOp::Ne)),
                    ('≤', _) => at(Tok::Op(BinOp::Le)),
                    ('≥', _) => at(Tok::Op(BinOp::Ge)),
                    _ => Err(ParseError::UnknownOperator {
                        line,
                        column,
                        token: c.to_string(),
                    }),
                }
            }
        }
    }

    fn word(&mut self) -> String {
        let start = self.offset();
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        let end = self.offset();
        self.src[start..end].to_string()
    }

    /// `digits` has been consumed; picks up an optional `.digits` tail.
    fn number(&mut self, digits: &str, line: usize, column: usize) -> Result<Number, ParseError> {
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseError::syntax(line, column, format!("malformed number '{digits}'")));
        }
        let mut text = digits.to_string();
        if self.peek() == Some('.') && matches!(self.peek2(), Some(d) if d.is_ascii_digit()) {
            self.bump();
            let frac = self.word();
            if !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(ParseError::syntax(
                    line,
                    column,
                    format!("malformed number '{digits}.{frac}'"),
                ));
            }
            text.push('.');
            text.push_str(&frac);
        }
        text.parse::<f64>()
            .ok()
            .and_then(Number::new)
            .ok_or_else(|| ParseError::syntax(line, column, format!("number out of range '{text}'")))
    }
}
