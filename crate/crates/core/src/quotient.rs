//! Quotients of a name universe by an ultrafilter.
//!
//! Names are identified when `[[x = y]]` lies in the ultrafilter and classes
//! are related by `in_U` when `[[x in y]]` does. The result is an ordinary
//! two-valued structure; being well-founded and extensional it collapses to
//! hereditarily finite sets.

use std::collections::HashMap;

use thiserror::Error;

use crate::algebra::Ultrafilter;
use crate::lang::{Formula, Term};
use crate::names::{HfSet, NameId, NameUniverse};
use crate::valuation::{ValuationContext, ValuationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("ultrafilter is over {uf} atoms, universe algebra has {universe}")]
    MismatchedAlgebra { uf: usize, universe: usize },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("not a sentence: free variable {0:?}")]
    NotASentence(String),
    #[error("constant {0:?} does not name anything in the universe")]
    UnresolvedConstant(String),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CollapseError {
    #[error("membership relation has a cycle through node {0}")]
    Cycle(usize),
    #[error("nodes {0} and {1} have the same members")]
    NotExtensional(usize, usize),
}

/// `M^B / U` restricted to a finite universe.
#[derive(Debug, Clone)]
pub struct QuotientModel {
    ultrafilter: Ultrafilter,
    labels: Vec<String>,
    index: HashMap<String, NameId>,
    class_of: Vec<usize>,
    classes: Vec<Vec<NameId>>,
    /// `member[d][c]` iff class `d` is in class `c`.
    member: Vec<Vec<bool>>,
}

/// Builds the quotient, checking that `~_U` is an equivalence and that
/// `in_U` does not depend on the chosen representatives.
pub fn build_quotient(universe: &NameUniverse, uf: &Ultrafilter) -> Result<QuotientModel, QuotientError> {
    let atoms = universe.algebra().atom_count();
    if uf.atom_count() != atoms {
        return Err(QuotientError::MismatchedAlgebra { uf: uf.atom_count(), universe: atoms });
    }
    let n = universe.len();
    let mut ctx = ValuationContext::new(universe);
    let mut same = vec![vec![false; n]; n];
    for x in 0..n {
        for y in 0..n {
            same[x][y] = uf.contains(ctx.val_eq(NameId(x), NameId(y))?);
        }
    }
    let label = |i: usize| universe.label(NameId(i)).to_string();
    for x in 0..n {
        if !same[x][x] {
            return Err(QuotientError::Inconsistent(format!("{} ~ {} fails", label(x), label(x))));
        }
        for y in 0..n {
            if same[x][y] != same[y][x] {
                return Err(QuotientError::Inconsistent(format!("~ not symmetric on {}, {}", label(x), label(y))));
            }
            if same[x][y] {
                for z in 0..n {
                    if same[y][z] && !same[x][z] {
                        return Err(QuotientError::Inconsistent(format!(
                            "~ not transitive on {}, {}, {}",
                            label(x),
                            label(y),
                            label(z)
                        )));
                    }
                }
            }
        }
    }
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<NameId>> = Vec::new();
    for x in 0..n {
        if class_of[x] != usize::MAX {
            continue;
        }
        let c = classes.len();
        let members: Vec<NameId> = (x..n).filter(|&y| same[x][y]).map(NameId).collect();
        for m in &members {
            class_of[m.0] = c;
        }
        classes.push(members);
    }
    let k = classes.len();
    let mut member = vec![vec![false; k]; k];
    for c in 0..k {
        for d in 0..k {
            member[d][c] = uf.contains(ctx.val_mem(classes[d][0], classes[c][0])?);
        }
    }
    for x in 0..n {
        for y in 0..n {
            let m = uf.contains(ctx.val_mem(NameId(x), NameId(y))?);
            if m != member[class_of[x]][class_of[y]] {
                return Err(QuotientError::Inconsistent(format!(
                    "in_U depends on representatives at ({}, {})",
                    label(x),
                    label(y)
                )));
            }
        }
    }
    let labels: Vec<String> = (0..n).map(label).collect();
    let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), NameId(i))).collect();
    Ok(QuotientModel { ultrafilter: *uf, labels, index, class_of, classes, member })
}

impl QuotientModel {
    pub fn ultrafilter(&self) -> &Ultrafilter {
        &self.ultrafilter
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Names in class `c`, in universe order; the first is the representative.
    pub fn class_members(&self, c: usize) -> &[NameId] {
        &self.classes[c]
    }

    pub fn representative(&self, c: usize) -> NameId {
        self.classes[c][0]
    }

    pub fn class_of(&self, x: NameId) -> usize {
        self.class_of[x.0]
    }

    pub fn label(&self, x: NameId) -> &str {
        &self.labels[x.0]
    }

    /// Whether class `d` is a member of class `c`.
    pub fn is_member(&self, d: usize, c: usize) -> bool {
        self.member[d][c]
    }

    /// Members of class `c`.
    pub fn members_of(&self, c: usize) -> Vec<usize> {
        (0..self.class_count()).filter(|&d| self.member[d][c]).collect()
    }

    /// Membership edges `(d, c)` meaning `d in_U c`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let k = self.class_count();
        (0..k).flat_map(|d| (0..k).map(move |c| (d, c))).filter(|&(d, c)| self.member[d][c]).collect()
    }

    pub fn class_of_label(&self, id: &str) -> Option<usize> {
        self.index.get(id).map(|&x| self.class_of(x))
    }

    /// Classical truth of a sentence in the quotient, quantifiers ranging
    /// over classes.
    pub fn truth(&self, f: &Formula) -> Result<bool, QuotientError> {
        if let Some(v) = f.free_vars().into_iter().next() {
            return Err(QuotientError::NotASentence(v));
        }
        self.eval(f, &mut Vec::new())
    }

    fn term(&self, t: &Term, env: &[(String, usize)]) -> Result<usize, QuotientError> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|&(_, c)| c)
                .ok_or_else(|| QuotientError::NotASentence(v.clone())),
            Term::Const(c) => self.class_of_label(c).ok_or_else(|| QuotientError::UnresolvedConstant(c.clone())),
        }
    }

    fn eval(&self, f: &Formula, env: &mut Vec<(String, usize)>) -> Result<bool, QuotientError> {
        use Formula::*;
        let k = self.class_count();
        Ok(match f {
            Eq(a, b) => self.term(a, env)? == self.term(b, env)?,
            Mem(a, b) => self.member[self.term(a, env)?][self.term(b, env)?],
            Sub(a, b) => {
                let (a, b) = (self.term(a, env)?, self.term(b, env)?);
                (0..k).all(|c| !self.member[c][a] || self.member[c][b])
            }
            Not(g) => !self.eval(g, env)?,
            And(a, b) => self.eval(a, env)? && self.eval(b, env)?,
            Or(a, b) => self.eval(a, env)? || self.eval(b, env)?,
            Implies(a, b) => !self.eval(a, env)? || self.eval(b, env)?,
            Iff(a, b) => self.eval(a, env)? == self.eval(b, env)?,
            Exists(v, body) => self.quant(v, 0..k, body, false, env)?,
            Forall(v, body) => self.quant(v, 0..k, body, true, env)?,
            BoundedExists(v, t, body) => {
                let y = self.term(t, env)?;
                self.quant(v, self.members_of(y), body, false, env)?
            }
            BoundedForall(v, t, body) => {
                let y = self.term(t, env)?;
                self.quant(v, self.members_of(y), body, true, env)?
            }
        })
    }

    fn quant(
        &self,
        v: &str,
        range: impl IntoIterator<Item = usize>,
        body: &Formula,
        universal: bool,
        env: &mut Vec<(String, usize)>,
    ) -> Result<bool, QuotientError> {
        for c in range {
            env.push((v.to_string(), c));
            let r = self.eval(body, env);
            env.pop();
            if r? != universal {
                return Ok(!universal);
            }
        }
        Ok(universal)
    }

    /// Collapse of the quotient's membership relation, indexed by class.
    pub fn mostowski_collapse(&self) -> Result<Vec<HfSet>, CollapseError> {
        let members: Vec<Vec<usize>> = (0..self.class_count()).map(|c| self.members_of(c)).collect();
        collapse(&members)
    }
}

/// Mostowski collapse of a finite relation given as member lists:
/// `collapse(c) = { collapse(d) : d in members[c] }`.
///
/// Fails if the relation is not well-founded or not extensional (in which
/// case the collapse would not be injective).
pub fn collapse(members: &[Vec<usize>]) -> Result<Vec<HfSet>, CollapseError> {
    let n = members.len();
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut mark = vec![Mark::New; n];
    let mut out: Vec<Option<HfSet>> = vec![None; n];
    for root in 0..n {
        if mark[root] == Mark::Done {
            continue;
        }
        // iterative DFS: (node, next child index)
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Active;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if let Some(&child) = members[node].get(*next) {
                *next += 1;
                match mark[child] {
                    Mark::Active => return Err(CollapseError::Cycle(child)),
                    Mark::New => {
                        mark[child] = Mark::Active;
                        stack.push((child, 0));
                    }
                    Mark::Done => {}
                }
            } else {
                let set = HfSet::from_members(members[node].iter().map(|&d| out[d].clone().expect("child done")));
                out[node] = Some(set);
                mark[node] = Mark::Done;
                stack.pop();
            }
        }
    }
    let out: Vec<HfSet> = out.into_iter().map(|s| s.expect("all visited")).collect();
    let mut seen: HashMap<&HfSet, usize> = HashMap::new();
    for (i, s) in out.iter().enumerate() {
        if let Some(&j) = seen.get(s) {
            return Err(CollapseError::NotExtensional(j, i));
        }
        seen.insert(s, i);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BooleanAlgebra;
    use crate::lang::parse;
    use crate::names::load_names;

    fn running_example() -> NameUniverse {
        let b = BooleanAlgebra::new(2).unwrap();
        load_names("name z { }\nname u { z : a0 }", &b).unwrap()
    }

    #[test]
    fn quotient_by_a0() {
        let u = running_example();
        let uf = Ultrafilter::principal(u.algebra(), 0).unwrap();
        let q = build_quotient(&u, &uf).unwrap();
        assert_eq!(q.class_count(), 2);
        let (cz, cu) = (q.class_of_label("z").unwrap(), q.class_of_label("u").unwrap());
        assert_eq!(q.members_of(cu), vec![cz]);
        assert!(q.truth(&parse("exists x . x in u").unwrap()).unwrap());
        let hf = q.mostowski_collapse().unwrap();
        assert_eq!(hf[cz], HfSet::empty());
        assert_eq!(hf[cu], HfSet::ordinal(1));
    }

    #[test]
    fn quotient_by_a1() {
        let u = running_example();
        let uf = Ultrafilter::principal(u.algebra(), 1).unwrap();
        let q = build_quotient(&u, &uf).unwrap();
        assert_eq!(q.class_count(), 1);
        assert!(q.edges().is_empty());
        assert_eq!(q.class_members(0).len(), 2);
        assert_eq!(q.mostowski_collapse().unwrap(), vec![HfSet::empty()]);
        assert!(!q.truth(&parse("exists x . x in u").unwrap()).unwrap());
    }

    #[test]
    fn truth_errors_and_trivia() {
        let u = running_example();
        let q = build_quotient(&u, &Ultrafilter::principal(u.algebra(), 0).unwrap()).unwrap();
        assert!(q.truth(&parse("forall x . x = x").unwrap()).unwrap());
        assert!(matches!(
            q.truth(&Formula::Eq(Term::var("x"), Term::var("x"))),
            Err(QuotientError::NotASentence(_))
        ));
        assert!(matches!(q.truth(&parse("q = q").unwrap()), Err(QuotientError::UnresolvedConstant(_))));
        let other = BooleanAlgebra::new(3).unwrap();
        assert!(matches!(
            build_quotient(&u, &other.ultrafilters()[0]),
            Err(QuotientError::MismatchedAlgebra { .. })
        ));
    }

    #[test]
    fn collapse_rejects_bad_relations() {
        assert_eq!(collapse(&[vec![1], vec![0]]), Err(CollapseError::Cycle(0)));
        assert_eq!(collapse(&[vec![0]]), Err(CollapseError::Cycle(0)));
        assert_eq!(collapse(&[vec![], vec![]]), Err(CollapseError::NotExtensional(0, 1)));
        let ok = collapse(&[vec![], vec![0], vec![0, 1]]).unwrap();
        assert_eq!(ok[2], HfSet::ordinal(2));
    }
}
