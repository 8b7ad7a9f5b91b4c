//! Text grammar for signatures and formulas.
//!
//! Signatures are whitespace-separated declarations in any order:
//!
//! ```text
//! fun f/1   rel R/2   const c
//! ```
//!
//! Formulas use `&`, `|`, `!`, `->`, `=`, `forall vN`, `exists vN`, and
//! relation application `R(t1,...,tn)`; the symbols `∧ ∨ ¬ → ∀ ∃` are
//! accepted as aliases. `!` binds tightest, then `&`, then `|`, then the
//! right-associative `->`; a quantifier scopes as far right as possible.
//! Errors carry a 1-based line and column.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::syntax::{is_variable_spelling, Formula, Signature, SignatureError, Term};
use alloc::boxed::Box;

/// Syntax error with source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(usize),
    Number(usize),
    Keyword(&'static str),
    LParen,
    RParen,
    Comma,
    Slash,
    Amp,
    Pipe,
    Bang,
    Arrow,
    Equals,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Var(v) => write!(f, "'v{v}'"),
            Tok::Number(n) => write!(f, "'{n}'"),
            Tok::Keyword(k) => write!(f, "'{k}'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Amp => f.write_str("'&'"),
            Tok::Pipe => f.write_str("'|'"),
            Tok::Bang => f.write_str("'!'"),
            Tok::Arrow => f.write_str("'->'"),
            Tok::Equals => f.write_str("'='"),
        }
    }
}

struct Lexer<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    line: usize,
    column: usize,
}

type Spanned = (Tok, usize, usize);

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, column: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column, message: message.into() }
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
                self.bump();
            }
            let (line, col) = (self.line, self.column);
            let c = match self.chars.peek() {
                None => return Ok(out),
                Some(c) => *c,
            };
            let tok = match c {
                '(' => {
                    self.bump();
                    Tok::LParen
                }
                ')' => {
                    self.bump();
                    Tok::RParen
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '/' => {
                    self.bump();
                    Tok::Slash
                }
                '&' | '\u{2227}' => {
                    self.bump();
                    Tok::Amp
                }
                '|' | '\u{2228}' => {
                    self.bump();
                    Tok::Pipe
                }
                '!' | '\u{00ac}' => {
                    self.bump();
                    Tok::Bang
                }
                '=' => {
                    self.bump();
                    Tok::Equals
                }
                '\u{2192}' => {
                    self.bump();
                    Tok::Arrow
                }
                '\u{2200}' => {
                    self.bump();
                    Tok::Keyword("forall")
                }
                '\u{2203}' => {
                    self.bump();
                    Tok::Keyword("exists")
                }
                '-' => {
                    self.bump();
                    match self.chars.peek() {
                        Some('>') => {
                            self.bump();
                            Tok::Arrow
                        }
                        _ => return Err(self.err("expected '>' after '-'")),
                    }
                }
                c if c.is_ascii_digit() => {
                    let mut n = String::new();
                    while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
                        n.push(self.bump().unwrap());
                    }
                    let value = n
                        .parse::<usize>()
                        .map_err(|_| self.err(format!("number '{n}' is too large")))?;
                    Tok::Number(value)
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut word = String::new();
                    while matches!(self.chars.peek(), Some(c) if c.is_ascii_alphanumeric() || *c == '_')
                    {
                        word.push(self.bump().unwrap());
                    }
                    match word.as_str() {
                        "fun" => Tok::Keyword("fun"),
                        "rel" => Tok::Keyword("rel"),
                        "const" => Tok::Keyword("const"),
                        "forall" => Tok::Keyword("forall"),
                        "exists" => Tok::Keyword("exists"),
                        _ if is_variable_spelling(&word) => {
                            let idx = word[1..]
                                .parse::<usize>()
                                .map_err(|_| self.err(format!("variable '{word}' is too large")))?;
                            Tok::Var(idx)
                        }
                        _ => Tok::Ident(word),
                    }
                }
                other => return Err(self.err(format!("unexpected character '{other}'"))),
            };
            out.push((tok, line, col));
        }
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some((_, l, c)) => (*l, *c),
            None => match self.toks.last() {
                Some((_, l, c)) => (*l, *c + 1),
                None => (1, 1),
            },
        }
    }

    fn err_here(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = self.here();
        ParseError { line, column, message: message.into() }
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.next();
                Ok(())
            }
            Some(t) => Err(self.err_here(format!("expected {what}, found {t}"))),
            None => Err(self.err_here(format!("expected {what}, found end of input"))),
        }
    }

    // formula := implies
    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.implies()
    }

    // implies := or ('->' implies)?
    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if matches!(self.peek(), Some(Tok::Arrow)) {
            self.next();
            let rhs = self.implies()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    // or := and ('|' and)*
    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while matches!(self.peek(), Some(Tok::Pipe)) {
            self.next();
            let rhs = self.and()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // and := unary ('&' unary)*
    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while matches!(self.peek(), Some(Tok::Amp)) {
            self.next();
            let rhs = self.unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // unary := '!' unary | quantifier formula | atom
    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.next();
                let inner = self.unary()?;
                Ok(Formula::Not(Box::new(inner)))
            }
            Some(Tok::Keyword(k @ ("forall" | "exists"))) => {
                let k = *k;
                self.next();
                let var = match self.next() {
                    Some((Tok::Var(v), _, _)) => v,
                    Some((t, l, c)) => {
                        return Err(ParseError {
                            line: l,
                            column: c,
                            message: format!("expected a variable after '{k}', found {t}"),
                        })
                    }
                    None => return Err(self.err_here(format!("expected a variable after '{k}'"))),
                };
                let body = self.formula()?;
                Ok(if k == "forall" {
                    Formula::Forall(var, Box::new(body))
                } else {
                    Formula::Exists(var, Box::new(body))
                })
            }
            _ => self.atom(),
        }
    }

    // atom := '(' formula ')' | Rel '(' terms ')' | term '=' term
    fn atom(&mut self) -> Result<Formula, ParseError> {
        if matches!(self.peek(), Some(Tok::LParen)) {
            self.next();
            let inner = self.formula()?;
            self.expect(&Tok::RParen, "')'")?;
            return Ok(inner);
        }
        if let Some(Tok::Ident(name)) = self.peek() {
            if let Some(arity) = self.sig.relation_arity(name) {
                let name = name.clone();
                self.next();
                let args = self.args(&name, arity)?;
                return Ok(Formula::Rel(name, args));
            }
        }
        let lhs = self.term()?;
        self.expect(&Tok::Equals, "'='")?;
        let rhs = self.term()?;
        Ok(Formula::Eq(lhs, rhs))
    }

    fn args(&mut self, name: &str, arity: usize) -> Result<Vec<Term>, ParseError> {
        self.expect(&Tok::LParen, &format!("'(' after '{name}'"))?;
        let mut out = Vec::new();
        loop {
            out.push(self.term()?);
            match self.peek() {
                Some(Tok::Comma) => {
                    self.next();
                }
                Some(Tok::RParen) => {
                    self.next();
                    break;
                }
                Some(t) => return Err(self.err_here(format!("expected ',' or ')', found {t}"))),
                None => return Err(self.err_here("expected ',' or ')', found end of input")),
            }
        }
        if out.len() != arity {
            return Err(self.err_here(format!(
                "'{name}' takes {arity} argument(s), got {}",
                out.len()
            )));
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.next() {
            Some((Tok::Var(v), _, _)) => Ok(Term::Var(v)),
            Some((Tok::Ident(name), l, c)) => {
                if let Some(arity) = self.sig.function_arity(&name) {
                    let args = self.args(&name, arity)?;
                    Ok(Term::App(name, args))
                } else if self.sig.has_constant(&name) {
                    Ok(Term::Const(name))
                } else if self.sig.relation_arity(&name).is_some() {
                    Err(ParseError {
                        line: l,
                        column: c,
                        message: format!("relation '{name}' used where a term is expected"),
                    })
                } else {
                    Err(ParseError {
                        line: l,
                        column: c,
                        message: format!("unknown symbol '{name}'"),
                    })
                }
            }
            Some((t, l, c)) => Err(ParseError {
                line: l,
                column: c,
                message: format!("expected a term, found {t}"),
            }),
            None => Err(self.err_here("expected a term, found end of input")),
        }
    }
}

/// Parse a signature from declaration text.
pub fn parse_signature(text: &str) -> Result<Signature, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut functions = Vec::new();
    let mut relations = Vec::new();
    let mut constants = Vec::new();
    let mut pos = 0usize;
    while pos < toks.len() {
        let (tok, line, column) = toks[pos].clone();
        let kind = match tok {
            Tok::Keyword(k @ ("fun" | "rel" | "const")) => k,
            other => {
                return Err(ParseError {
                    line,
                    column,
                    message: format!("expected 'fun', 'rel', or 'const', found {other}"),
                })
            }
        };
        pos += 1;
        let name = match toks.get(pos) {
            Some((Tok::Ident(name), _, _)) => name.clone(),
            Some((t, l, c)) => {
                return Err(ParseError {
                    line: *l,
                    column: *c,
                    message: format!("expected a symbol name after '{kind}', found {t}"),
                })
            }
            None => {
                return Err(ParseError {
                    line,
                    column,
                    message: format!("expected a symbol name after '{kind}'"),
                })
            }
        };
        pos += 1;
        if kind == "const" {
            constants.push(name);
            continue;
        }
        match toks.get(pos) {
            Some((Tok::Slash, _, _)) => pos += 1,
            _ => {
                let (l, c) = toks.get(pos).map(|(_, l, c)| (*l, *c)).unwrap_or((line, column));
                return Err(ParseError {
                    line: l,
                    column: c,
                    message: format!("expected '/<arity>' after '{name}'"),
                });
            }
        }
        let arity = match toks.get(pos) {
            Some((Tok::Number(n), l, c)) => {
                if *n == 0 {
                    return Err(ParseError {
                        line: *l,
                        column: *c,
                        message: format!("'{name}' must have arity at least 1"),
                    });
                }
                *n
            }
            _ => {
                let (l, c) = toks.get(pos).map(|(_, l, c)| (*l, *c)).unwrap_or((line, column));
                return Err(ParseError {
                    line: l,
                    column: c,
                    message: format!("expected an arity after '{name}/'"),
                });
            }
        };
        pos += 1;
        if kind == "fun" {
            functions.push((name, arity));
        } else {
            relations.push((name, arity));
        }
    }
    Signature::new(functions, relations, constants).map_err(|e| match e {
        SignatureError::DuplicateName(n) => ParseError {
            line: 1,
            column: 1,
            message: format!("duplicate symbol name '{n}'"),
        },
        other => ParseError { line: 1, column: 1, message: other.to_string() },
    })
}

/// Parse a formula against `sig`. The whole input must be consumed.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut parser = Parser { toks, pos: 0, sig };
    let phi = parser.formula()?;
    if let Some((t, l, c)) = parser.toks.get(parser.pos) {
        return Err(ParseError {
            line: *l,
            column: *c,
            message: format!("unexpected {t} after the formula"),
        });
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn sig() -> Signature {
        parse_signature("rel R/1 rel S/2 fun f/1 const c").unwrap()
    }

    #[test]
    fn parses_declarations_in_any_order() {
        let s = parse_signature("const c\nfun f/2 rel R/1").unwrap();
        assert_eq!(s.function_arity("f"), Some(2));
        assert_eq!(s.relation_arity("R"), Some(1));
        assert!(s.has_constant("c"));
    }

    #[test]
    fn signature_errors_have_positions() {
        let e = parse_signature("rel R/0").unwrap_err();
        assert_eq!((e.line, e.column), (1, 7));
        let e = parse_signature("rel R/1\nrel R/2").unwrap_err();
        assert!(e.message.contains("duplicate"));
        let e = parse_signature("fun v7/1").unwrap_err();
        assert!(e.message.contains("symbol name"));
    }

    #[test]
    fn parses_connectives_with_expected_precedence() {
        let s = sig();
        let phi = parse_formula("R(v0) & R(v1) | R(v2) -> R(v3)", &s).unwrap();
        assert_eq!(phi.to_string(), "R(v0) & R(v1) | R(v2) -> R(v3)");
        match phi {
            Formula::Implies(lhs, _) => match *lhs {
                Formula::Or(a, _) => assert!(matches!(*a, Formula::And(..))),
                other => panic!("expected disjunction, got {other}"),
            },
            other => panic!("expected implication, got {other}"),
        }
    }

    #[test]
    fn quantifier_scopes_maximally() {
        let s = sig();
        let phi = parse_formula("forall v0 R(v0) & R(v1)", &s).unwrap();
        match phi {
            Formula::Forall(0, body) => assert!(matches!(*body, Formula::And(..))),
            other => panic!("expected forall, got {other}"),
        }
        let phi = parse_formula("(forall v0 R(v0)) & R(v1)", &s).unwrap();
        assert!(matches!(phi, Formula::And(..)));
    }

    #[test]
    fn accepts_unicode_aliases() {
        let s = sig();
        let a = parse_formula("∀v0 (R(v0) → ¬S(v0, c) ∨ R(v0) ∧ R(v0))", &s).unwrap();
        let b = parse_formula("forall v0 (R(v0) -> !S(v0, c) | R(v0) & R(v0))", &s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parses_terms_and_equalities() {
        let s = sig();
        let phi = parse_formula("f(f(c)) = v0", &s).unwrap();
        assert_eq!(
            phi,
            Formula::Eq(
                Term::App(
                    "f".to_string(),
                    vec![Term::App("f".to_string(), vec![Term::Const("c".to_string())])]
                ),
                Term::Var(0)
            )
        );
        let phi = parse_formula("!v0 = v1", &s).unwrap();
        assert!(matches!(phi, Formula::Not(_)));
    }

    #[test]
    fn rejects_arity_and_symbol_errors_with_position() {
        let s = sig();
        let e = parse_formula("S(v0)", &s).unwrap_err();
        assert!(e.message.contains("2 argument"));
        let e = parse_formula("T(v0)", &s).unwrap_err();
        assert!(e.message.contains("unknown symbol 'T'"));
        assert_eq!((e.line, e.column), (1, 1));
        let e = parse_formula("R(v0) &", &s).unwrap_err();
        assert!(e.message.contains("end of input"));
        let e = parse_formula("R(v0) R(v1)", &s).unwrap_err();
        assert!(e.message.contains("after the formula"));
        let e = parse_formula("R(R(v0))", &s).unwrap_err();
        assert!(e.message.contains("where a term is expected"));
    }

    #[test]
    fn multiline_positions() {
        let s = sig();
        let e = parse_formula("R(v0) &\n  ?", &s).unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
    }
}
