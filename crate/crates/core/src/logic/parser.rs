//! Hand-written lexer and recursive-descent parser for the rule syntax.

use std::sync::Arc;

use super::{Atom, Literal, Rule, Term};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Token {
    Ident(Arc<str>),
    Var(Arc<str>),
    Anon,
    Int(i64),
    Str(Arc<str>),
    Directive(String),
    LParen,
    RParen,
    Comma,
    Dot,
    If,
    Plus,
    Dollar,
    Minus,
    Eq,
}

#[derive(Clone, Debug)]
struct Spanned {
    token: Token,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, message: String| Error::Syntax {
        line,
        column,
        message,
    };

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut push = |token: Token| {
            out.push(Spanned {
                token,
                line: start_line,
                column: start_col,
            })
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => push(Token::LParen),
            ')' => push(Token::RParen),
            ',' => push(Token::Comma),
            '.' => push(Token::Dot),
            '+' => push(Token::Plus),
            '$' => push(Token::Dollar),
            '=' => push(Token::Eq),
            ':' => {
                if chars.get(i + 1) == Some(&'-') {
                    push(Token::If);
                    i += 2;
                    col += 2;
                    continue;
                }
                return Err(err(line, col, "expected `:-`".into()));
            }
            '-' if chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                let v = s
                    .parse()
                    .map_err(|_| err(line, col, format!("integer out of range: {s}")))?;
                push(Token::Int(v));
                col += j - i;
                i = j;
                continue;
            }
            '-' => push(Token::Minus),
            '"' => {
                let mut j = i + 1;
                let mut s = String::new();
                loop {
                    match chars.get(j) {
                        None | Some('\n') => {
                            return Err(err(line, col, "unterminated string".into()))
                        }
                        Some('"') => break,
                        Some('\\') => {
                            match chars.get(j + 1) {
                                Some('n') => s.push('\n'),
                                Some(&e @ ('"' | '\\')) => s.push(e),
                                _ => {
                                    return Err(err(line, col + j - i, "bad escape".into()))
                                }
                            }
                            j += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                        }
                    }
                }
                push(Token::Str(Arc::from(s.as_str())));
                col += j + 1 - i;
                i = j + 1;
                continue;
            }
            '#' => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(err(line, col, "expected directive name after `#`".into()));
                }
                push(Token::Directive(chars[i + 1..j].iter().collect()));
                col += j - i;
                i = j;
                continue;
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                let v = s
                    .parse()
                    .map_err(|_| err(line, col, format!("integer out of range: {s}")))?;
                push(Token::Int(v));
                col += j - i;
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let token = if word == "_" {
                    Token::Anon
                } else if c == '_' {
                    return Err(err(
                        line,
                        col,
                        format!("identifier `{word}` must start with a letter"),
                    ));
                } else if c.is_ascii_uppercase() {
                    Token::Var(Arc::from(word.as_str()))
                } else {
                    Token::Ident(Arc::from(word.as_str()))
                };
                push(token);
                col += j - i;
                i = j;
                continue;
            }
            other => return Err(err(line, col, format!("unexpected character `{other}`"))),
        }
        i += 1;
        col += 1;
    }
    Ok(out)
}

/// Token cursor shared by the program parser and the mode-file parser.
pub struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    eof: (usize, usize),
}

impl Parser {
    pub fn new(text: &str) -> Result<Self> {
        let tokens = lex(text)?;
        let lines = text.split('\n').count();
        let last_col = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Ok(Parser {
            tokens,
            pos: 0,
            eof: (lines, last_col),
        })
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub(crate) fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|s| &s.token)
    }

    pub(crate) fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|s| s.token.clone());
        self.pos += 1;
        t
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = self
            .tokens
            .get(self.pos)
            .map_or(self.eof, |s| (s.line, s.column));
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn expect(&mut self, want: Token, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    pub(crate) fn eat(&mut self, want: &Token) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn parse_term(&mut self) -> Result<Term> {
        let term = match self.peek() {
            Some(Token::Ident(s)) => Term::Const(s.clone()),
            Some(Token::Var(s)) => Term::Var(s.clone()),
            Some(Token::Anon) => Term::Anon,
            Some(Token::Int(i)) => Term::Int(*i),
            Some(Token::Str(s)) => Term::Str(s.clone()),
            _ => return Err(self.error("expected a term")),
        };
        self.pos += 1;
        Ok(term)
    }

    pub(crate) fn parse_predicate(&mut self) -> Result<Arc<str>> {
        match self.peek() {
            Some(Token::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected a predicate name")),
        }
    }

    pub(crate) fn parse_atom(&mut self) -> Result<Atom> {
        let predicate = self.parse_predicate()?;
        let mut args = Vec::new();
        if self.eat(&Token::LParen) {
            loop {
                args.push(self.parse_term()?);
                if self.eat(&Token::Comma) {
                    continue;
                }
                self.expect(Token::RParen, "`,` or `)`")?;
                break;
            }
        }
        Ok(Atom { predicate, args })
    }

    /// True when the cursor sits on `not` used as the NAF keyword.
    pub(crate) fn at_naf(&self) -> bool {
        matches!(self.peek(), Some(Token::Ident(s)) if &**s == "not")
            && matches!(
                self.tokens.get(self.pos + 1).map(|s| &s.token),
                Some(Token::Ident(_))
            )
    }

    pub(crate) fn parse_literal(&mut self) -> Result<Literal> {
        let negated = self.at_naf();
        if negated {
            self.pos += 1;
        }
        Ok(Literal {
            atom: self.parse_atom()?,
            negated,
        })
    }

    fn parse_body(&mut self) -> Result<Vec<Literal>> {
        let mut body = vec![self.parse_literal()?];
        while self.eat(&Token::Comma) {
            body.push(self.parse_literal()?);
        }
        Ok(body)
    }

    /// Parses one `.`-terminated rule and checks its safety.
    pub fn parse_rule(&mut self) -> Result<Rule> {
        let head = if self.peek() == Some(&Token::If) {
            None
        } else {
            if self.at_naf() {
                return Err(self.error("negated literal in rule head"));
            }
            Some(self.parse_atom()?)
        };
        let body = if self.eat(&Token::If) {
            self.parse_body()?
        } else if head.is_none() {
            return Err(self.error("expected a rule"));
        } else {
            Vec::new()
        };
        self.expect(Token::Dot, "`.` at end of rule")?;
        let rule = Rule { head, body };
        rule.check_safety()?;
        Ok(rule)
    }
}

/// Parses a sequence of `.`-terminated rules, preserving source order.
pub fn parse_program(text: &str) -> Result<Vec<Rule>> {
    let mut p = Parser::new(text)?;
    let mut rules = Vec::new();
    while !p.at_end() {
        if let Some(Token::Directive(d)) = p.peek() {
            return Err(p.error(format!("unexpected directive `#{d}`")));
        }
        rules.push(p.parse_rule()?);
    }
    Ok(rules)
}
