//! The first-order language of set theory.
//!
//! Formulas have two binary predicates (`=` and `in`), the subset sugar
//! `sub`, the usual connectives, and unbounded as well as bounded
//! quantifiers. Terms are variables or constants; constants are bare
//! identifiers that name sets in whatever universe a formula is evaluated
//! against.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub mod corpus;
mod parser;

pub use parser::{parse, parse_open, parse_with_constants};
pub(crate) use parser::is_keyword as parser_is_keyword;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unbound variable {0:?}")]
    UnboundVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(s) | Term::Const(s) => s,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Eq(Term, Term),
    Mem(Term, Term),
    /// `t sub u`, sugar for `forall w . (w in t -> w in u)`.
    Sub(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    BoundedExists(String, Term, Box<Formula>),
    BoundedForall(String, Term, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    pub fn forall(v: &str, body: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(body))
    }

    /// Height of the syntax tree; atoms have depth 1.
    pub fn depth(&self) -> usize {
        use Formula::*;
        match self {
            Eq(..) | Mem(..) | Sub(..) => 1,
            Not(f) | Exists(_, f) | Forall(_, f) | BoundedExists(_, _, f) | BoundedForall(_, _, f) => 1 + f.depth(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Variables occurring free.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        use Formula::*;
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Eq(a, b) | Mem(a, b) | Sub(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Not(f) => f.collect_free(bound, out),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Exists(v, f) | Forall(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
            BoundedExists(v, t, f) | BoundedForall(v, t, f) => {
                term(t, bound);
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Constant symbols occurring anywhere.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        });
        out
    }

    /// Every identifier used: variables (bound or free) and constants.
    fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| {
            out.insert(t.name().to_string());
        });
        self.visit_binders(&mut |v| {
            out.insert(v.to_string());
        });
        out
    }

    fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        use Formula::*;
        match self {
            Eq(a, b) | Mem(a, b) | Sub(a, b) => {
                f(a);
                f(b);
            }
            Not(g) | Exists(_, g) | Forall(_, g) => g.visit_terms(f),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
            BoundedExists(_, t, g) | BoundedForall(_, t, g) => {
                f(t);
                g.visit_terms(f);
            }
        }
    }

    fn visit_binders(&self, f: &mut impl FnMut(&str)) {
        use Formula::*;
        match self {
            Eq(..) | Mem(..) | Sub(..) => {}
            Not(g) => g.visit_binders(f),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.visit_binders(f);
                b.visit_binders(f);
            }
            Exists(v, g) | Forall(v, g) | BoundedExists(v, _, g) | BoundedForall(v, _, g) => {
                f(v);
                g.visit_binders(f);
            }
        }
    }

    /// Fails on the first variable not bound by an enclosing quantifier.
    pub fn validate(&self) -> Result<(), LangError> {
        match self.free_vars().into_iter().next() {
            Some(v) => Err(LangError::UnboundVariable(v)),
            None => Ok(()),
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Removes `->`, `<->` and `sub`, leaving only atoms `=`/`in`, `~`, `&`,
    /// `|` and quantifiers.
    pub fn desugar(&self) -> Formula {
        use Formula::*;
        match self {
            Eq(..) | Mem(..) => self.clone(),
            Sub(t, u) => {
                let mut avoid = BTreeSet::new();
                avoid.insert(t.name().to_string());
                avoid.insert(u.name().to_string());
                let w = fresh_name("w", &avoid);
                let wt = Term::Var(w.clone());
                Formula::forall(
                    &w,
                    Formula::or(Formula::not(Mem(wt.clone(), t.clone())), Mem(wt, u.clone())),
                )
            }
            Not(f) => Formula::not(f.desugar()),
            And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Or(a, b) => Formula::or(a.desugar(), b.desugar()),
            Implies(a, b) => Formula::or(Formula::not(a.desugar()), b.desugar()),
            Iff(a, b) => {
                let (a, b) = (a.desugar(), b.desugar());
                Formula::and(
                    Formula::or(Formula::not(a.clone()), b.clone()),
                    Formula::or(Formula::not(b), a),
                )
            }
            Exists(v, f) => Exists(v.clone(), Box::new(f.desugar())),
            Forall(v, f) => Forall(v.clone(), Box::new(f.desugar())),
            BoundedExists(v, t, f) => BoundedExists(v.clone(), t.clone(), Box::new(f.desugar())),
            BoundedForall(v, t, f) => BoundedForall(v.clone(), t.clone(), Box::new(f.desugar())),
        }
    }

    pub fn is_desugared(&self) -> bool {
        use Formula::*;
        match self {
            Eq(..) | Mem(..) => true,
            Sub(..) | Implies(..) | Iff(..) => false,
            Not(f) | Exists(_, f) | Forall(_, f) | BoundedExists(_, _, f) | BoundedForall(_, _, f) => f.is_desugared(),
            And(a, b) | Or(a, b) => a.is_desugared() && b.is_desugared(),
        }
    }

    /// Replaces free occurrences of `var` by `term`, renaming bound
    /// variables that would capture a variable of `term`.
    pub fn substitute(&self, var: &str, term: &Term) -> Formula {
        use Formula::*;
        let st = |t: &Term| match t {
            Term::Var(v) if v == var => term.clone(),
            _ => t.clone(),
        };
        match self {
            Eq(a, b) => Eq(st(a), st(b)),
            Mem(a, b) => Mem(st(a), st(b)),
            Sub(a, b) => Sub(st(a), st(b)),
            Not(f) => Formula::not(f.substitute(var, term)),
            And(a, b) => Formula::and(a.substitute(var, term), b.substitute(var, term)),
            Or(a, b) => Formula::or(a.substitute(var, term), b.substitute(var, term)),
            Implies(a, b) => Formula::implies(a.substitute(var, term), b.substitute(var, term)),
            Iff(a, b) => Formula::iff(a.substitute(var, term), b.substitute(var, term)),
            Exists(v, f) | Forall(v, f) => {
                let (v, f) = self.substitute_under(v, f, var, term);
                match self {
                    Exists(..) => Exists(v, Box::new(f)),
                    _ => Forall(v, Box::new(f)),
                }
            }
            BoundedExists(v, t, f) | BoundedForall(v, t, f) => {
                let t = st(t);
                let (v, f) = self.substitute_under(v, f, var, term);
                match self {
                    BoundedExists(..) => BoundedExists(v, t, Box::new(f)),
                    _ => BoundedForall(v, t, Box::new(f)),
                }
            }
        }
    }

    fn substitute_under(&self, bound: &str, body: &Formula, var: &str, term: &Term) -> (String, Formula) {
        if bound == var || !body.free_vars().contains(var) {
            return (bound.to_string(), body.clone());
        }
        match term {
            Term::Var(tv) if tv == bound => {
                let mut avoid = body.all_names();
                avoid.insert(tv.clone());
                avoid.insert(var.to_string());
                let renamed = fresh_name(bound, &avoid);
                let body = body.substitute(bound, &Term::Var(renamed.clone()));
                (renamed, body.substitute(var, term))
            }
            _ => (bound.to_string(), body.substitute(var, term)),
        }
    }
}

/// `base`, or `base` with primes appended, avoiding `taken`.
fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

fn write_operand(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    use Formula::*;
    match f {
        Exists(..) | Forall(..) | BoundedExists(..) | BoundedForall(..) => write!(out, "({f})"),
        _ => write!(out, "{f}"),
    }
}

/// Canonical form: binary connectives fully parenthesized, quantifiers
/// parenthesized when they appear as an operand.
impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        let bin = |out: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula| -> fmt::Result {
            out.write_str("(")?;
            write_operand(a, out)?;
            write!(out, " {op} ")?;
            write_operand(b, out)?;
            out.write_str(")")
        };
        match self {
            Eq(a, b) => write!(out, "{a} = {b}"),
            Mem(a, b) => write!(out, "{a} in {b}"),
            Sub(a, b) => write!(out, "{a} sub {b}"),
            Not(f) => {
                out.write_str("~")?;
                write_operand(f, out)
            }
            And(a, b) => bin(out, a, "&", b),
            Or(a, b) => bin(out, a, "|", b),
            Implies(a, b) => bin(out, a, "->", b),
            Iff(a, b) => bin(out, a, "<->", b),
            Exists(v, f) => write!(out, "exists {v} . {f}"),
            Forall(v, f) => write!(out, "forall {v} . {f}"),
            BoundedExists(v, t, f) => write!(out, "exists {v} in {t} . {f}"),
            BoundedForall(v, t, f) => write!(out, "forall {v} in {t} . {f}"),
        }
    }
}

/// S-expression rendering that shows the variable/constant distinction.
pub fn ast_string(f: &Formula) -> String {
    use Formula::*;
    let t = |t: &Term| match t {
        Term::Var(v) => format!("(var {v})"),
        Term::Const(c) => format!("(const {c})"),
    };
    match f {
        Eq(a, b) => format!("(eq {} {})", t(a), t(b)),
        Mem(a, b) => format!("(mem {} {})", t(a), t(b)),
        Sub(a, b) => format!("(sub {} {})", t(a), t(b)),
        Not(g) => format!("(not {})", ast_string(g)),
        And(a, b) => format!("(and {} {})", ast_string(a), ast_string(b)),
        Or(a, b) => format!("(or {} {})", ast_string(a), ast_string(b)),
        Implies(a, b) => format!("(implies {} {})", ast_string(a), ast_string(b)),
        Iff(a, b) => format!("(iff {} {})", ast_string(a), ast_string(b)),
        Exists(v, g) => format!("(exists {v} {})", ast_string(g)),
        Forall(v, g) => format!("(forall {v} {})", ast_string(g)),
        BoundedExists(v, b, g) => format!("(exists-in {v} {} {})", t(b), ast_string(g)),
        BoundedForall(v, b, g) => format!("(forall-in {v} {} {})", t(b), ast_string(g)),
    }
}
