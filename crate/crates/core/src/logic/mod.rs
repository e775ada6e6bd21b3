//! Syntax of the rule language: terms, atoms, NAF literals and rules.
//!
//! The fragment is Datalog with negation as failure plus integer and quoted
//! string constants. Nothing here evaluates anything; see [`crate::eval`].

mod factbase;
pub(crate) mod parser;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use factbase::FactBase;
pub use parser::{parse_program, Parser};

use crate::error::{Error, Result};

/// A program is an ordered list of rules; facts are body-less rules.
pub type Program = Vec<Rule>;

/// `(predicate, arity)`, the identity of a relation.
pub type PredKey = (Arc<str>, usize);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Int(i64),
    /// Quoted string constant, stored unescaped.
    Str(Arc<str>),
    /// Symbolic constant, `[a-z][A-Za-z0-9_]*`.
    Const(Arc<str>),
    Var(Arc<str>),
    /// The `_` placeholder. Matches anything, binds nothing.
    Anon,
}

impl Term {
    pub fn constant(name: &str) -> Self {
        Term::Const(Arc::from(name))
    }

    pub fn var(name: &str) -> Self {
        Term::Var(Arc::from(name))
    }

    pub fn string(text: &str) -> Self {
        Term::Str(Arc::from(text))
    }

    pub fn is_ground(&self) -> bool {
        !matches!(self, Term::Var(_) | Term::Anon)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn var_name(&self) -> Option<&Arc<str>> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }
}

impl From<i64> for Term {
    fn from(value: i64) -> Self {
        Term::Int(value)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(i) => write!(f, "{i}"),
            Term::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            Term::Const(c) => f.write_str(c),
            Term::Var(v) => f.write_str(v),
            Term::Anon => f.write_str("_"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: Arc<str>,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        Atom {
            predicate: Arc::from(predicate),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn key(&self) -> PredKey {
        (self.predicate.clone(), self.args.len())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn variables(&self) -> impl Iterator<Item = &Arc<str>> {
        self.args.iter().filter_map(Term::var_name)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, arg) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{arg}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    /// `true` for `not atom` (negation as failure).
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal {
            atom,
            negated: false,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal {
            atom,
            negated: true,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        write!(f, "{}", self.atom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    /// `None` for a constraint `:- body.`
    pub head: Option<Atom>,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn new(head: Atom, body: Vec<Literal>) -> Self {
        Rule {
            head: Some(head),
            body,
        }
    }

    pub fn fact(head: Atom) -> Self {
        Rule {
            head: Some(head),
            body: Vec::new(),
        }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty() && self.head.as_ref().is_some_and(Atom::is_ground)
    }

    pub fn positive_body(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter(|l| !l.negated).map(|l| &l.atom)
    }

    pub fn negative_body(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter(|l| l.negated).map(|l| &l.atom)
    }

    /// Number of rule-size units: one for the rule plus one per body literal.
    pub fn size(&self) -> usize {
        1 + self.body.len()
    }

    /// Checks range restriction: every variable of the head or of a negated
    /// literal must occur in some positive body literal, and `_` may not
    /// occur in the head.
    pub fn check_safety(&self) -> Result<()> {
        let bound: BTreeSet<&Arc<str>> = self.positive_body().flat_map(Atom::variables).collect();
        if let Some(head) = &self.head {
            if head.args.iter().any(|t| matches!(t, Term::Anon)) {
                return Err(Error::Unsafe {
                    rule: self.to_string(),
                    variable: "_".into(),
                });
            }
            if let Some(v) = head.variables().find(|v| !bound.contains(v)) {
                return Err(Error::Unsafe {
                    rule: self.to_string(),
                    variable: v.to_string(),
                });
            }
        }
        if let Some(v) = self
            .negative_body()
            .flat_map(Atom::variables)
            .find(|v| !bound.contains(v))
        {
            return Err(Error::Unsafe {
                rule: self.to_string(),
                variable: v.to_string(),
            });
        }
        Ok(())
    }

    pub fn is_safe(&self) -> bool {
        self.check_safety().is_ok()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(head) = &self.head {
            write!(f, "{head}")?;
            if !self.body.is_empty() {
                f.write_str(" ")?;
            }
        }
        if !self.body.is_empty() {
            f.write_str(":- ")?;
            for (i, lit) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{lit}")?;
            }
        }
        f.write_str(".")
    }
}

/// Renders a rule in the textual syntax accepted by [`parse_program`].
pub fn print_rule(rule: &Rule) -> String {
    rule.to_string()
}

/// Renders a program, one rule per line.
pub fn print_program(rules: &[Rule]) -> String {
    let mut out = String::new();
    for r in rules {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}
