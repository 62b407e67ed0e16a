//! Recursive-descent parser for the model DSL.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' exponent)?
//! exponent:= ['-'] INT | '(' ['-'] INT ')'
//! atom    := NUMBER | jet | 'eta' | ('sin' | 'cos') '(' IDENT ')'
//!          | 'D' '[' IDENT ',' INT ']' | '(' expr ')'
//! jet     := IDENT ('_' [xt]+)?          e.g. q, q_xx, u_xt
//! ```

use num_bigint::BigInt;
use thiserror::Error;

use super::expr::Expr;
use super::generator::{Generator, Symbol};
use super::normal::NormalForm;
use super::poly::Rational;
use super::SymError;

/// Field and potential names recognised when no explicit list is given.
pub const DEFAULT_FIELDS: &[&str] = &["q", "r", "u", "phi"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown generator `{name}` at byte {pos}")]
    UnknownGenerator { pos: usize, name: String },
}

/// Parses with the default field vocabulary.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, DEFAULT_FIELDS)
}

/// Parses and normalizes without a model.
pub fn parse_normal(text: &str) -> Result<NormalForm, SymError> {
    parse(text)?.normalize()
}

pub fn parse_with(text: &str, fields: &[&str]) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text,
        toks: lex(text)?,
        pos: 0,
        fields,
    };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(t) => Err(p.syntax(t.pos, format!("unexpected `{}`", t.text(text)))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    Num,
    Ident,
    Op(char),
}

#[derive(Clone, Copy, Debug)]
struct Tok {
    kind: Kind,
    pos: usize,
    end: usize,
}

impl Tok {
    fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.pos..self.end]
    }
}

fn lex(src: &str) -> Result<Vec<Tok>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            out.push(Tok { kind: Kind::Num, pos: start, end: i });
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Tok { kind: Kind::Ident, pos: start, end: i });
        } else if "+-*/^()[],".contains(c) {
            out.push(Tok { kind: Kind::Op(c), pos: i, end: i + 1 });
            i += 1;
        } else {
            return Err(ParseError::Syntax {
                pos: i,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Tok>,
    pos: usize,
    fields: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn at_op(&self, c: char) -> bool {
        self.peek().is_some_and(|t| t.kind == Kind::Op(c))
    }

    fn end_pos(&self) -> usize {
        self.src.len()
    }

    fn syntax(&self, pos: usize, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { pos, msg: msg.into() }
    }

    fn expect_op(&mut self, c: char, context: &str) -> Result<Tok, ParseError> {
        match self.peek() {
            Some(t) if t.kind == Kind::Op(c) => {
                self.pos += 1;
                Ok(t)
            }
            Some(t) => Err(self.syntax(t.pos, format!("expected `{c}` {context}"))),
            None => Err(self.syntax(self.end_pos(), format!("expected `{c}` {context}, found end of input"))),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        while let Some(t) = self.peek() {
            match t.kind {
                Kind::Op('+') => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Kind::Op('-') => {
                    self.pos += 1;
                    terms.push(Expr::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        while let Some(t) = self.peek() {
            match t.kind {
                Kind::Op('*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = match acc {
                        Expr::Product(mut xs) => {
                            xs.push(rhs);
                            Expr::Product(xs)
                        }
                        other => Expr::Product(vec![other, rhs]),
                    };
                }
                Kind::Op('/') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = Expr::Quotient(Box::new(acc), Box::new(rhs));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.at_op('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.at_op('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.at_op('^') {
            return Ok(base);
        }
        self.pos += 1;
        let paren = self.at_op('(');
        if paren {
            self.pos += 1;
        }
        let neg = self.at_op('-');
        if neg {
            self.pos += 1;
        }
        let tok = match self.bump() {
            Some(t) if t.kind == Kind::Num => t,
            Some(t) => return Err(self.syntax(t.pos, "exponent must be an integer")),
            None => return Err(self.syntax(self.end_pos(), "missing exponent")),
        };
        let e: i64 = tok
            .text(self.src)
            .parse()
            .map_err(|_| self.syntax(tok.pos, "exponent must be an integer"))?;
        if paren {
            self.expect_op(')', "to close exponent")?;
        }
        Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let Some(t) = self.bump() else {
            return Err(self.syntax(self.end_pos(), "unexpected end of input"));
        };
        match t.kind {
            Kind::Num => number(t.text(self.src)).map(Expr::Const).ok_or_else(|| self.syntax(t.pos, "malformed number")),
            Kind::Op('(') => {
                let e = self.expr()?;
                self.expect_op(')', &format!("to close `(` opened at byte {}", t.pos))?;
                Ok(e)
            }
            Kind::Op(c) => Err(self.syntax(t.pos, format!("unexpected `{c}`"))),
            Kind::Ident => self.identifier(t),
        }
    }

    fn field(&mut self) -> Result<(Symbol, Tok), ParseError> {
        match self.bump() {
            Some(t) if t.kind == Kind::Ident => {
                let name = t.text(self.src);
                if self.fields.contains(&name) {
                    Ok((Symbol::new(name), t))
                } else {
                    Err(ParseError::UnknownGenerator { pos: t.pos, name: name.to_string() })
                }
            }
            Some(t) => Err(self.syntax(t.pos, "expected a field name")),
            None => Err(self.syntax(self.end_pos(), "expected a field name")),
        }
    }

    fn identifier(&mut self, t: Tok) -> Result<Expr, ParseError> {
        let text = t.text(self.src);
        match text {
            "eta" => return Ok(Expr::Gen(Generator::Eta)),
            "sin" | "cos" => {
                self.expect_op('(', &format!("after `{text}`"))?;
                let (p, _) = self.field()?;
                self.expect_op(')', &format!("to close `{text}(`"))?;
                return Ok(Expr::Gen(if text == "sin" { Generator::Sin(p) } else { Generator::Cos(p) }));
            }
            "D" if self.at_op('[') => {
                self.pos += 1;
                let (field, _) = self.field()?;
                self.expect_op(',', "in D[field, order]")?;
                let n = match self.bump() {
                    Some(n) if n.kind == Kind::Num => n,
                    Some(n) => return Err(self.syntax(n.pos, "expected derivative order")),
                    None => return Err(self.syntax(self.end_pos(), "expected derivative order")),
                };
                let order: u32 = n.text(self.src).parse().map_err(|_| self.syntax(n.pos, "malformed derivative order"))?;
                self.expect_op(']', "to close D[...]")?;
                return Ok(Expr::Gen(Generator::Jet { field, order }));
            }
            _ => {}
        }
        let (name, suffix) = match text.split_once('_') {
            Some((n, s)) => (n, Some(s)),
            None => (text, None),
        };
        if !self.fields.contains(&name) {
            return Err(ParseError::UnknownGenerator { pos: t.pos, name: text.to_string() });
        }
        let (mut xs, mut ts) = (0u32, 0u32);
        if let Some(s) = suffix {
            if s.is_empty() {
                return Err(self.syntax(t.pos, "empty derivative suffix"));
            }
            for c in s.chars() {
                match c {
                    'x' => xs += 1,
                    't' => ts += 1,
                    _ => return Err(self.syntax(t.pos, format!("bad derivative suffix `_{s}`"))),
                }
            }
        }
        let field = Symbol::new(name);
        match ts {
            0 => Ok(Expr::Gen(Generator::Jet { field, order: xs })),
            1 => Ok(Expr::TimeJet { field, x_order: xs }),
            _ => Err(self.syntax(t.pos, "only first-order t-derivatives are supported")),
        }
    }
}

fn number(s: &str) -> Option<Rational> {
    match s.split_once('.') {
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
        Some((int, frac)) => {
            if frac.contains('.') {
                return None;
            }
            let digits = format!("{int}{frac}");
            let n: BigInt = if digits.is_empty() { return None } else { digits.parse().ok()? };
            Some(Rational::new(n, BigInt::from(10).pow(frac.len() as u32)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::rat;

    #[test]
    fn product_of_jets() {
        assert_eq!(
            parse("q*q_x").unwrap(),
            Expr::Product(vec![Expr::jet("q", 0), Expr::jet("q", 1)])
        );
    }

    #[test]
    fn mkdv_a_coefficient() {
        let a = parse_normal("-1/2*eta^3 - eta*q^2").unwrap();
        let eta = NormalForm::eta();
        let q = NormalForm::jet("q", 0);
        let expect = &eta.pow(3).unwrap().scale(&rat(-1, 2)) - &(&eta * &(&q * &q));
        assert_eq!(a, expect);
    }

    #[test]
    fn unclosed_paren_reports_position() {
        let err = parse("sin(u)/(2*eta").unwrap_err();
        match err {
            ParseError::Syntax { pos, msg } => {
                assert_eq!(pos, 13);
                assert!(msg.contains("close `(`"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_generator() {
        assert!(matches!(parse("q + w_x"), Err(ParseError::UnknownGenerator { .. })));
        assert!(parse_with("w_x", &["w"]).is_ok());
    }

    #[test]
    fn alternate_jet_syntax_and_decimals() {
        assert_eq!(parse_normal("D[q,3]").unwrap(), parse_normal("q_xxx").unwrap());
        assert_eq!(parse_normal("0.25*q").unwrap(), parse_normal("1/4*q").unwrap());
        assert_eq!(parse_normal("q^(-2)*q^2").unwrap(), NormalForm::one());
    }

    #[test]
    fn time_jets_need_a_model() {
        assert!(matches!(parse("q_t").unwrap(), Expr::TimeJet { .. }));
        assert!(matches!(parse_normal("q_t"), Err(SymError::TimeJetWithoutModel(_))));
    }
}
