//! The Boolean value `[[phi]]` of formulas over a finite name universe.
//!
//! Connectives map to the algebra operations, quantifiers to joins and
//! meets over the universe, and the atoms `x = y`, `x in y` are computed by
//! a joint recursion on the name DAG:
//!
//! ```text
//! [[x in y]] = join over w in dom(y) of  y(w) & [[x = w]]
//! [[x = y]]  = meet over w in dom(x) of (x(w) => [[w in y]])
//!            & meet over w in dom(y) of (y(w) => [[w in x]])
//! ```
//!
//! Unbounded quantifiers range over the supplied universe only; the value is
//! relative to that universe.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::Element;
use crate::lang::{Formula, Term};
use crate::names::{NameId, NameUniverse};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValuationError {
    #[error("constant {0:?} does not name anything in the universe")]
    UnresolvedConstant(String),
    #[error("free variable {0:?} has no binding")]
    UnboundVariable(String),
    #[error("name #{0} is not in the universe")]
    UnknownName(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomOp {
    Eq,
    Mem,
}

/// One computed step of the `=` / `in` recursion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub op: AtomOp,
    pub left: NameId,
    pub right: NameId,
    pub value: Element,
}

/// Evaluation state over one universe: the memo table for the atomic
/// recursion and an optional trace.
pub struct ValuationContext<'u> {
    universe: &'u NameUniverse,
    memo: HashMap<(AtomOp, NameId, NameId), Element>,
    memo_enabled: bool,
    trace: Option<Vec<TraceEntry>>,
}

impl fmt::Debug for ValuationContext<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ValuationContext")
            .field("names", &self.universe.len())
            .field("memo_entries", &self.memo.len())
            .finish()
    }
}

/// Variable bindings, innermost last.
pub type Environment = Vec<(String, NameId)>;

impl<'u> ValuationContext<'u> {
    pub fn new(universe: &'u NameUniverse) -> Self {
        ValuationContext { universe, memo: HashMap::new(), memo_enabled: true, trace: None }
    }

    /// A context that recomputes every atomic value from scratch.
    pub fn without_memo(universe: &'u NameUniverse) -> Self {
        ValuationContext { memo_enabled: false, ..Self::new(universe) }
    }

    pub fn universe(&self) -> &'u NameUniverse {
        self.universe
    }

    pub fn enable_trace(&mut self) {
        self.trace = Some(Vec::new());
    }

    pub fn trace(&self) -> &[TraceEntry] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn format_trace_entry(&self, e: &TraceEntry) -> String {
        let op = match e.op {
            AtomOp::Eq => "eq",
            AtomOp::Mem => "mem",
        };
        format!(
            "{op} {} {} -> {}",
            self.universe.label(e.left),
            self.universe.label(e.right),
            self.universe.algebra().format(e.value)
        )
    }

    fn check(&self, x: NameId) -> Result<(), ValuationError> {
        if x.0 < self.universe.len() {
            Ok(())
        } else {
            Err(ValuationError::UnknownName(x.0))
        }
    }

    /// `[[x = y]]`.
    pub fn val_eq(&mut self, x: NameId, y: NameId) -> Result<Element, ValuationError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.eq(x, y))
    }

    /// `[[x in y]]`.
    pub fn val_mem(&mut self, x: NameId, y: NameId) -> Result<Element, ValuationError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mem(x, y))
    }

    /// `[[x sub y]]` via the domain of `x`.
    pub fn val_subset(&mut self, x: NameId, y: NameId) -> Result<Element, ValuationError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.half_eq(x, y))
    }

    fn cached(&mut self, key: (AtomOp, NameId, NameId), compute: impl FnOnce(&mut Self) -> Element) -> Element {
        if self.memo_enabled {
            if let Some(&v) = self.memo.get(&key) {
                return v;
            }
        }
        let value = compute(self);
        if self.memo_enabled {
            self.memo.insert(key, value);
        }
        if let Some(trace) = &mut self.trace {
            trace.push(TraceEntry { op: key.0, left: key.1, right: key.2, value });
        }
        value
    }

    fn mem(&mut self, x: NameId, y: NameId) -> Element {
        self.cached((AtomOp::Mem, x, y), |ctx| {
            let universe = ctx.universe;
            let mut acc = universe.algebra().zero();
            for &(w, yw) in universe.name(y).entries() {
                if yw.is_zero() {
                    continue;
                }
                acc = acc | (yw & ctx.eq(x, w));
                if acc.is_one() {
                    break;
                }
            }
            acc
        })
    }

    /// `meet over w in dom(x) of (x(w) => [[w in y]])`
    fn half_eq(&mut self, x: NameId, y: NameId) -> Element {
        let universe = self.universe;
        let mut acc = universe.algebra().one();
        for &(w, xw) in universe.name(x).entries() {
            if xw.is_zero() {
                continue;
            }
            acc = acc & xw.implies(self.mem(w, y));
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    fn eq(&mut self, x: NameId, y: NameId) -> Element {
        self.cached((AtomOp::Eq, x, y), |ctx| {
            let forward = ctx.half_eq(x, y);
            if forward.is_zero() {
                return forward;
            }
            forward & ctx.half_eq(y, x)
        })
    }

    fn resolve(&self, t: &Term, env: &Environment) -> Result<NameId, ValuationError> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|&(_, id)| id)
                .ok_or_else(|| ValuationError::UnboundVariable(v.clone())),
            Term::Const(c) => self.universe.lookup(c).map_err(|_| ValuationError::UnresolvedConstant(c.clone())),
        }
    }

    /// `[[f]]` with free variables bound by `env`. Sugar is removed first.
    pub fn val_formula(&mut self, f: &Formula, env: &Environment) -> Result<Element, ValuationError> {
        let mut env = env.clone();
        if f.is_desugared() {
            self.eval(f, &mut env)
        } else {
            self.eval(&f.desugar(), &mut env)
        }
    }

    /// `[[f]]` for a sentence.
    pub fn val_sentence(&mut self, f: &Formula) -> Result<Element, ValuationError> {
        self.val_formula(f, &Vec::new())
    }

    fn eval(&mut self, f: &Formula, env: &mut Environment) -> Result<Element, ValuationError> {
        use Formula::*;
        let universe = self.universe;
        let alg = universe.algebra();
        Ok(match f {
            Eq(a, b) => {
                let (a, b) = (self.resolve(a, env)?, self.resolve(b, env)?);
                self.eq(a, b)
            }
            Mem(a, b) => {
                let (a, b) = (self.resolve(a, env)?, self.resolve(b, env)?);
                self.mem(a, b)
            }
            Sub(a, b) => {
                let (a, b) = (self.resolve(a, env)?, self.resolve(b, env)?);
                self.half_eq(a, b)
            }
            Not(g) => !self.eval(g, env)?,
            And(a, b) => self.eval(a, env)? & self.eval(b, env)?,
            Or(a, b) => self.eval(a, env)? | self.eval(b, env)?,
            Implies(a, b) => self.eval(a, env)?.implies(self.eval(b, env)?),
            Iff(a, b) => {
                let (a, b) = (self.eval(a, env)?, self.eval(b, env)?);
                a.implies(b) & b.implies(a)
            }
            Exists(v, body) => {
                let mut acc = alg.zero();
                for a in universe.ids() {
                    env.push((v.clone(), a));
                    let r = self.eval(body, env);
                    env.pop();
                    acc = acc | r?;
                    if acc.is_one() {
                        break;
                    }
                }
                acc
            }
            Forall(v, body) => {
                let mut acc = alg.one();
                for a in universe.ids() {
                    env.push((v.clone(), a));
                    let r = self.eval(body, env);
                    env.pop();
                    acc = acc & r?;
                    if acc.is_zero() {
                        break;
                    }
                }
                acc
            }
            BoundedExists(v, t, body) => {
                let y = self.resolve(t, env)?;
                let mut acc = alg.zero();
                for &(w, yw) in universe.name(y).entries() {
                    env.push((v.clone(), w));
                    let r = self.eval(body, env);
                    env.pop();
                    acc = acc | (yw & r?);
                }
                acc
            }
            BoundedForall(v, t, body) => {
                let y = self.resolve(t, env)?;
                let mut acc = alg.one();
                for &(w, yw) in universe.name(y).entries() {
                    env.push((v.clone(), w));
                    let r = self.eval(body, env);
                    env.pop();
                    acc = acc & yw.implies(r?);
                }
                acc
            }
        })
    }
}
