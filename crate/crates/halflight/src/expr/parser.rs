//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr     := term { ("+" | "-") term }
//! term     := unary { ("*" | "/") unary }
//! unary    := "-" unary | power
//! power    := atom [ "^" exponent ]
//! exponent := INT | "(" ["-"] INT ["/" "2"] ")"
//! atom     := NUMBER | VAR | FUNC "(" expr ")" | "(" expr ")"
//! ```
//!
//! `^` binds tighter than unary minus, so `-v1^2` is `-(v1^2)`.
//! Variables are `v1`, `v2`, ...; functions are `sqrt`, `sin`, `cos`,
//! `exp`, `log`. Exponents are restricted to integers and half-integers.

use crate::error::ParseError;

use super::ast::{Ast, Exponent, Expression, Func};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_, t) => format!("number `{t}`"),
            Tok::Ident(n) => format!("identifier `{n}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        let single = |tok: Tok| Spanned {
            tok,
            line: tline,
            col: tcol,
        };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
                continue;
            }
            '+' => out.push(single(Tok::Plus)),
            '-' => out.push(single(Tok::Minus)),
            '*' => out.push(single(Tok::Star)),
            '/' => out.push(single(Tok::Slash)),
            '^' => out.push(single(Tok::Caret)),
            '(' => out.push(single(Tok::LParen)),
            ')' => out.push(single(Tok::RParen)),
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let mut ok = true;
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    if i >= chars.len() || !chars[i].is_ascii_digit() {
                        ok = false;
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if ok && i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    i += 1;
                    if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                        i += 1;
                    }
                    if i >= chars.len() || !chars[i].is_ascii_digit() {
                        ok = false;
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                if !ok {
                    return Err(ParseError::MalformedNumber {
                        line: tline,
                        col: tcol,
                        text,
                    });
                }
                let value: f64 = text.parse().map_err(|_| ParseError::MalformedNumber {
                    line: tline,
                    col: tcol,
                    text: text.clone(),
                })?;
                out.push(Spanned {
                    tok: Tok::Num(value, text),
                    line: tline,
                    col: tcol,
                });
                col += i - start;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Spanned {
                    tok: Tok::Ident(text),
                    line: tline,
                    col: tcol,
                });
                col += i - start;
                continue;
            }
            other => {
                return Err(ParseError::UnexpectedChar {
                    line: tline,
                    col: tcol,
                    ch: other,
                });
            }
        }
        i += 1;
        col += 1;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::Syntax {
            line: t.line,
            col: t.col,
            expected: expected.to_string(),
            found: t.tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err_here(expected))
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            Ok(Ast::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Caret {
            self.bump();
            let e = self.exponent()?;
            Ok(Ast::Pow(Box::new(base), e))
        } else {
            Ok(base)
        }
    }

    fn int_literal(&mut self) -> Result<i32, ParseError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Num(_, text) => {
                if text.chars().all(|c| c.is_ascii_digit()) {
                    let n: i32 = text.parse().map_err(|_| ParseError::BadExponent {
                        line: t.line,
                        col: t.col,
                    })?;
                    self.bump();
                    Ok(n)
                } else {
                    Err(ParseError::BadExponent {
                        line: t.line,
                        col: t.col,
                    })
                }
            }
            _ => Err(self.err_here("an integer exponent")),
        }
    }

    fn exponent(&mut self) -> Result<Exponent, ParseError> {
        match self.peek().tok.clone() {
            Tok::Num(..) => Ok(Exponent::int(self.int_literal()?)),
            Tok::LParen => {
                self.bump();
                let neg = if self.peek().tok == Tok::Minus {
                    self.bump();
                    true
                } else {
                    false
                };
                let n = self.int_literal()?;
                let den = if self.peek().tok == Tok::Slash {
                    let slash = self.bump();
                    let d = self.int_literal()?;
                    if d != 2 {
                        return Err(ParseError::BadExponent {
                            line: slash.line,
                            col: slash.col,
                        });
                    }
                    2
                } else {
                    1
                };
                self.expect(Tok::RParen, "`)` closing the exponent")?;
                let num = if neg { -n } else { n };
                Ok(Exponent { num, den })
            }
            _ => Err(self.err_here("an integer exponent or `(`")),
        }
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(value, _) => {
                self.bump();
                Ok(Ast::Const(value))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(func) = match name.as_str() {
                    "sqrt" => Some(Func::Sqrt),
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "exp" => Some(Func::Exp),
                    "log" => Some(Func::Log),
                    _ => None,
                } {
                    self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Ast::Call(func, Box::new(arg)));
                }
                if let Some(rest) = name.strip_prefix('v') {
                    if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
                        let idx: usize =
                            rest.parse().map_err(|_| ParseError::UnknownIdentifier {
                                line: t.line,
                                col: t.col,
                                name: name.clone(),
                            })?;
                        if idx >= 1 {
                            return Ok(Ast::Var(idx - 1));
                        }
                    }
                }
                Err(ParseError::UnknownIdentifier {
                    line: t.line,
                    col: t.col,
                    name,
                })
            }
            _ => Err(self.err_here("a number, variable, function call, or `(`")),
        }
    }
}

/// Parse a source string into an [`Expression`].
pub fn parse(src: &str) -> Result<Expression, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let ast = p.expr()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.err_here("end of input"));
    }
    Ok(Expression::new(ast))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ast(src: &str) -> Ast {
        parse(src).unwrap().ast().clone()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ast("v1 - v2 - v3").to_string(), "v1 - v2 - v3");
        assert_eq!(
            ast("v1 - v2 - v3"),
            ast("(v1 - v2) - v3"),
            "subtraction is left-associative"
        );
        assert_eq!(ast("v1 + v2*v3"), ast("v1 + (v2*v3)"));
        assert_eq!(ast("v1/v2/v3"), ast("(v1/v2)/v3"));
    }

    #[test]
    fn caret_binds_tighter_than_unary_minus() {
        assert_eq!(ast("-v1^2"), Ast::Neg(Box::new(ast("v1^2"))));
        assert_eq!(parse("-v1^2").unwrap().eval(&[3.0]).unwrap(), -9.0);
        assert_eq!(parse("(-v1)^2").unwrap().eval(&[3.0]).unwrap(), 9.0);
    }

    #[test]
    fn exponent_forms() {
        assert_eq!(parse("v1^3").unwrap().eval(&[2.0]).unwrap(), 8.0);
        assert_eq!(parse("v1^(-1)").unwrap().eval(&[2.0]).unwrap(), 0.5);
        assert_eq!(parse("v1^(3/2)").unwrap().eval(&[4.0]).unwrap(), 8.0);
        assert_eq!(parse("v1^(-1/2)").unwrap().eval(&[4.0]).unwrap(), 0.5);
        assert_eq!(parse("v1^0").unwrap().eval(&[5.0]).unwrap(), 1.0);
    }

    #[test]
    fn bad_exponents_are_rejected() {
        assert!(matches!(
            parse("v1^2.5"),
            Err(ParseError::BadExponent { .. })
        ));
        assert!(matches!(
            parse("v1^(1/3)"),
            Err(ParseError::BadExponent { .. })
        ));
        assert!(matches!(parse("v1^v2"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("v1^2^3"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn unknown_identifier_with_position() {
        match parse("v1 + foo(3)") {
            Err(ParseError::UnknownIdentifier { line, col, name }) => {
                assert_eq!((line, col, name.as_str()), (1, 6, "foo"));
            }
            other => panic!("expected UnknownIdentifier, got {other:?}"),
        }
        assert!(matches!(
            parse("v0"),
            Err(ParseError::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn malformed_numbers() {
        for bad in ["1.", "1e", "2.e3", "7e+"] {
            assert!(
                matches!(parse(bad), Err(ParseError::MalformedNumber { .. })),
                "{bad} should be a malformed number"
            );
        }
        assert_eq!(parse("1.5e-3").unwrap().eval(&[]).unwrap(), 1.5e-3);
        assert_eq!(parse("2E2").unwrap().eval(&[]).unwrap(), 200.0);
    }

    #[test]
    fn trailing_tokens_are_an_error() {
        match parse("2 v1") {
            Err(ParseError::Syntax { col, expected, .. }) => {
                assert_eq!(col, 3);
                assert!(expected.contains("end of input"));
            }
            other => panic!("expected Syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unexpected_character() {
        assert!(matches!(
            parse("v1 # v2"),
            Err(ParseError::UnexpectedChar { ch: '#', .. })
        ));
    }

    #[test]
    fn whitespace_and_newlines_track_position() {
        match parse("v1 +\n  bar") {
            Err(ParseError::UnknownIdentifier { line, col, .. }) => {
                assert_eq!((line, col), (2, 3));
            }
            other => panic!("expected UnknownIdentifier, got {other:?}"),
        }
    }

    #[test]
    fn function_calls_need_parens() {
        assert!(matches!(parse("sin v1"), Err(ParseError::Syntax { .. })));
        assert_eq!(
            parse("sin(cos(v1))").unwrap().eval(&[0.0]).unwrap(),
            1f64.sin()
        );
    }
}
