//! Recursive-descent parser for formulas.
//!
//! ```text
//! formula := iff | quant
//! quant   := ("forall" | "exists") var ["in" term] "." formula
//! iff     := imp {"<->" imp}
//! imp     := or ["->" imp]
//! or      := and {"|" and}
//! and     := unary {"&" unary}
//! unary   := "~" unary | quant | atom | "(" formula ")"
//! atom    := term ("=" | "in" | "sub") term
//! ```
//!
//! A quantifier body extends as far to the right as possible.

use std::collections::BTreeSet;

use super::{Formula, LangError, Term};

const KEYWORDS: [&str; 4] = ["forall", "exists", "in", "sub"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Forall,
    Exists,
    In,
    Sub,
    Dot,
    Eq,
    Not,
    And,
    Or,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::End => "end of input".to_string(),
            other => format!("{other:?}"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, LangError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let start_col = column;
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, width) = if rest.starts_with("<->") {
            (Tok::DoubleArrow, 3)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else {
            match c {
                '.' => (Tok::Dot, 1),
                '=' => (Tok::Eq, 1),
                '~' => (Tok::Not, 1),
                '&' => (Tok::And, 1),
                '|' => (Tok::Or, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                c if is_ident_start(c) => {
                    let mut j = i;
                    while j < chars.len() && is_ident_char(chars[j]) {
                        j += 1;
                    }
                    let word: String = chars[i..j].iter().collect();
                    let tok = match word.as_str() {
                        "forall" => Tok::Forall,
                        "exists" => Tok::Exists,
                        "in" => Tok::In,
                        "sub" => Tok::Sub,
                        _ => Tok::Ident(word),
                    };
                    (tok, j - i)
                }
                other => {
                    return Err(LangError::Syntax {
                        line,
                        column,
                        message: format!("unexpected character {other:?}"),
                    })
                }
            }
        };
        out.push(Spanned { tok, line, column: start_col });
        i += width;
        column += width;
    }
    out.push(Spanned { tok: Tok::End, line, column });
    Ok(out)
}

enum FreeIdents<'a> {
    /// Unbound identifiers are constants.
    Constants,
    /// These unbound identifiers are free variables; the rest are constants.
    Open(&'a BTreeSet<String>),
    /// Unbound identifiers must be among these constants.
    Strict(&'a BTreeSet<String>),
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    bound: Vec<String>,
    free: FreeIdents<'a>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: String) -> LangError {
        let s = &self.toks[self.pos];
        LangError::Syntax { line: s.line, column: s.column, message }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), LangError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {}", self.peek().describe())))
        }
    }

    fn formula(&mut self) -> Result<Formula, LangError> {
        match self.peek() {
            Tok::Forall | Tok::Exists => self.quantifier(),
            _ => self.iff(),
        }
    }

    fn quantifier(&mut self) -> Result<Formula, LangError> {
        let universal = self.next() == Tok::Forall;
        let var = match self.next() {
            Tok::Ident(v) => v,
            other => {
                self.pos -= usize::from(other != Tok::End);
                return Err(self.error(format!("expected a variable, found {}", other.describe())));
            }
        };
        let bound_term = if *self.peek() == Tok::In {
            self.next();
            Some(self.term()?)
        } else {
            None
        };
        self.expect(Tok::Dot, "'.'")?;
        self.bound.push(var.clone());
        let body = self.formula();
        self.bound.pop();
        let body = Box::new(body?);
        Ok(match (universal, bound_term) {
            (true, None) => Formula::Forall(var, body),
            (false, None) => Formula::Exists(var, body),
            (true, Some(t)) => Formula::BoundedForall(var, t, body),
            (false, Some(t)) => Formula::BoundedExists(var, t, body),
        })
    }

    fn iff(&mut self) -> Result<Formula, LangError> {
        let mut acc = self.imp()?;
        while *self.peek() == Tok::DoubleArrow {
            self.next();
            acc = Formula::iff(acc, self.imp()?);
        }
        Ok(acc)
    }

    fn imp(&mut self) -> Result<Formula, LangError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.next();
            return Ok(Formula::implies(lhs, self.imp()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, LangError> {
        let mut acc = self.and()?;
        while *self.peek() == Tok::Or {
            self.next();
            acc = Formula::or(acc, self.and()?);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, LangError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.next();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, LangError> {
        match self.peek() {
            Tok::Not => {
                self.next();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Forall | Tok::Exists => self.quantifier(),
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, LangError> {
        let lhs = self.term()?;
        let op = self.peek().clone();
        match op {
            Tok::Eq | Tok::In | Tok::Sub => {
                self.next();
            }
            other => return Err(self.error(format!("expected '=', 'in' or 'sub', found {}", other.describe()))),
        }
        let rhs = self.term()?;
        Ok(match op {
            Tok::Eq => Formula::Eq(lhs, rhs),
            Tok::In => Formula::Mem(lhs, rhs),
            _ => Formula::Sub(lhs, rhs),
        })
    }

    fn term(&mut self) -> Result<Term, LangError> {
        let name = match self.peek() {
            Tok::Ident(name) => name.clone(),
            other => return Err(self.error(format!("expected a term, found {}", other.describe()))),
        };
        if self.bound.contains(&name) {
            self.next();
            return Ok(Term::Var(name));
        }
        let term = match &self.free {
            FreeIdents::Constants => Term::Const(name),
            FreeIdents::Open(vars) if vars.contains(&name) => Term::Var(name),
            FreeIdents::Open(_) => Term::Const(name),
            FreeIdents::Strict(consts) if consts.contains(&name) => Term::Const(name),
            FreeIdents::Strict(_) => return Err(LangError::UnboundVariable(name)),
        };
        self.next();
        Ok(term)
    }
}

fn run(text: &str, free: FreeIdents<'_>) -> Result<Formula, LangError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, bound: Vec::new(), free };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.error(format!("unexpected {}", p.peek().describe())));
    }
    Ok(f)
}

/// Parses a sentence; identifiers not bound by a quantifier are constants.
pub fn parse(text: &str) -> Result<Formula, LangError> {
    run(text, FreeIdents::Constants)
}

/// Parses an open formula in which the listed identifiers are free
/// variables and any other unbound identifier is a constant.
pub fn parse_open(text: &str, free_vars: &BTreeSet<String>) -> Result<Formula, LangError> {
    run(text, FreeIdents::Open(free_vars))
}

/// Parses a sentence over a known constant vocabulary; any other unbound
/// identifier is reported as an unbound variable.
pub fn parse_with_constants(text: &str, constants: &BTreeSet<String>) -> Result<Formula, LangError> {
    run(text, FreeIdents::Strict(constants))
}

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::Formula::*;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn bounded_membership_example() {
        let f = parse_open("forall x . (x in y -> x = z)", &set(&[])).unwrap();
        assert_eq!(
            f,
            Formula::forall(
                "x",
                Formula::implies(
                    Mem(Term::var("x"), Term::constant("y")),
                    Eq(Term::var("x"), Term::constant("z"))
                )
            )
        );
    }

    #[test]
    fn powerset_axiom() {
        let f = parse("forall x . exists y . forall z . (z sub x <-> z in y)").unwrap();
        let (x, y, z) = (Term::var("x"), Term::var("y"), Term::var("z"));
        let expected = Formula::forall(
            "x",
            Formula::exists("y", Formula::forall("z", Formula::iff(Sub(z.clone(), x), Mem(z, y)))),
        );
        assert_eq!(f, expected);
        assert!(f.is_sentence());
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse("x in") {
            Err(LangError::Syntax { line: 1, column: 5, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse("a = b &\n  c $ d") {
            Err(LangError::Syntax { line: 2, column: 5, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("forall . x = x").is_err());
        assert!(parse("(a = b").is_err());
        assert!(parse("a = b)").is_err());
    }

    #[test]
    fn precedence_and_associativity() {
        let a = || Eq(Term::constant("a"), Term::constant("a"));
        let b = || Eq(Term::constant("b"), Term::constant("b"));
        let c = || Eq(Term::constant("c"), Term::constant("c"));
        assert_eq!(parse("a = a | b = b & c = c").unwrap(), Formula::or(a(), Formula::and(b(), c())));
        assert_eq!(
            parse("a = a -> b = b -> c = c").unwrap(),
            Formula::implies(a(), Formula::implies(b(), c()))
        );
        assert_eq!(parse("a = a <-> b = b <-> c = c").unwrap(), Formula::iff(Formula::iff(a(), b()), c()));
        assert_eq!(parse("~a = a & b = b").unwrap(), Formula::and(Formula::not(a()), b()));
        assert_eq!(parse("a = a | b = b -> c = c").unwrap(), Formula::implies(Formula::or(a(), b()), c()));
    }

    #[test]
    fn bounded_quantifiers() {
        let f = parse("forall x in u . exists y in x . y = y").unwrap();
        let expected = BoundedForall(
            "x".into(),
            Term::constant("u"),
            Box::new(BoundedExists("y".into(), Term::var("x"), Box::new(Eq(Term::var("y"), Term::var("y"))))),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn strict_mode_rejects_unknown_identifiers() {
        assert_eq!(
            parse_with_constants("exists x . x in q", &set(&["u"])),
            Err(LangError::UnboundVariable("q".into()))
        );
        assert!(parse_with_constants("exists x . x in u", &set(&["u"])).is_ok());
    }

    #[test]
    fn quantifier_body_extends_right() {
        let f = parse("exists x . x in u & u = u").unwrap();
        assert!(matches!(f, Exists(_, ref body) if matches!(**body, And(..))));
        let g = parse("u = u & exists x . x in u").unwrap();
        assert!(matches!(g, And(..)));
    }

    #[test]
    fn keywords() {
        assert!(is_keyword("sub"));
        assert!(parse("in = in").is_err());
    }
}
