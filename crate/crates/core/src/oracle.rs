//! Naive reference implementations.
//!
//! Nothing here reuses the evaluation, density or completion code of the
//! other modules: posets are read only through `Poset::le`, formulas only
//! through their syntax tree, algebras as raw bitmasks. Everything is
//! exhaustive and slow on purpose.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::lang::{Formula, Term};
use crate::names::HfSet;
use crate::order::Poset;

/// Largest poset handed to the subset enumerations.
pub const MAX_ENUMERATION: usize = 15;
/// Largest algebra (in atoms) for brute-force ultrafilter search.
pub const MAX_BRUTE_ATOMS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("unresolved identifier {0:?}")]
    UnresolvedIdentifier(String),
    #[error("{what} of size {size} exceeds the oracle cap {cap}")]
    TooLarge { what: &'static str, size: usize, cap: usize },
    #[error("relation mentions point {0} outside the carrier")]
    OutsideCarrier(usize),
}

/// A carrier with one binary relation `R`; equality is identity.
#[derive(Debug, Clone)]
pub struct FiniteStructure {
    carrier: Vec<String>,
    relation: BTreeSet<(usize, usize)>,
    constants: BTreeMap<String, usize>,
}

impl FiniteStructure {
    /// Points are labelled by `carrier`; each label is also a constant.
    pub fn new(carrier: Vec<String>, relation: BTreeSet<(usize, usize)>) -> Result<Self, OracleError> {
        let n = carrier.len();
        if let Some(&(a, b)) = relation.iter().find(|&&(a, b)| a >= n || b >= n) {
            return Err(OracleError::OutsideCarrier(if a >= n { a } else { b }));
        }
        let constants = carrier.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Ok(FiniteStructure { carrier, relation, constants })
    }

    /// The membership digraph on a list of labelled HF sets.
    pub fn from_hf_sets(sets: &[(String, HfSet)]) -> Self {
        let mut relation = BTreeSet::new();
        for (i, (_, a)) in sets.iter().enumerate() {
            for (j, (_, b)) in sets.iter().enumerate() {
                if b.elements().iter().any(|m| m == a) {
                    relation.insert((i, j));
                }
            }
        }
        let carrier = sets.iter().map(|(l, _)| l.clone()).collect();
        FiniteStructure::new(carrier, relation).expect("indices in range")
    }

    /// Adds (or rebinds) a constant naming point `point`.
    pub fn with_constant(mut self, name: &str, point: usize) -> Self {
        self.constants.insert(name.to_string(), point);
        self
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.relation.contains(&(a, b))
    }
}

fn point(s: &FiniteStructure, t: &Term, env: &[(String, usize)]) -> Result<usize, OracleError> {
    match t {
        Term::Var(v) => env
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|p| p.1)
            .ok_or_else(|| OracleError::UnresolvedIdentifier(v.clone())),
        Term::Const(c) => s.constants.get(c).copied().ok_or_else(|| OracleError::UnresolvedIdentifier(c.clone())),
    }
}

/// Classical satisfaction by structural recursion, quantifiers over the
/// whole carrier.
pub fn tarski_eval(s: &FiniteStructure, f: &Formula, env: &[(String, usize)]) -> Result<bool, OracleError> {
    let mut env = env.to_vec();
    eval(s, f, &mut env)
}

fn eval(s: &FiniteStructure, f: &Formula, env: &mut Vec<(String, usize)>) -> Result<bool, OracleError> {
    let n = s.carrier.len();
    match f {
        Formula::Eq(a, b) => Ok(point(s, a, env)? == point(s, b, env)?),
        Formula::Mem(a, b) => Ok(s.related(point(s, a, env)?, point(s, b, env)?)),
        Formula::Sub(a, b) => {
            let (a, b) = (point(s, a, env)?, point(s, b, env)?);
            for z in 0..n {
                if s.related(z, a) && !s.related(z, b) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Not(g) => Ok(!eval(s, g, env)?),
        Formula::And(a, b) => {
            let x = eval(s, a, env)?;
            let y = eval(s, b, env)?;
            Ok(x && y)
        }
        Formula::Or(a, b) => {
            let x = eval(s, a, env)?;
            let y = eval(s, b, env)?;
            Ok(x || y)
        }
        Formula::Implies(a, b) => {
            let x = eval(s, a, env)?;
            let y = eval(s, b, env)?;
            Ok(!x || y)
        }
        Formula::Iff(a, b) => {
            let x = eval(s, a, env)?;
            let y = eval(s, b, env)?;
            Ok(x == y)
        }
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let universal = matches!(f, Formula::Forall(..));
            let mut results = Vec::with_capacity(n);
            for z in 0..n {
                env.push((v.clone(), z));
                let r = eval(s, body, env);
                env.pop();
                results.push(r?);
            }
            Ok(if universal { results.iter().all(|&r| r) } else { results.iter().any(|&r| r) })
        }
        Formula::BoundedExists(v, t, body) | Formula::BoundedForall(v, t, body) => {
            let universal = matches!(f, Formula::BoundedForall(..));
            let y = point(s, t, env)?;
            let mut results = Vec::new();
            for z in 0..n {
                if !s.related(z, y) {
                    continue;
                }
                env.push((v.clone(), z));
                let r = eval(s, body, env);
                env.pop();
                results.push(r?);
            }
            Ok(if universal { results.iter().all(|&r| r) } else { results.iter().any(|&r| r) })
        }
    }
}

/// `le[q][p]` iff `q <= p`.
fn leq_matrix(poset: &Poset) -> Vec<Vec<bool>> {
    let n = poset.len();
    (0..n).map(|q| (0..n).map(|p| poset.le(q, p)).collect()).collect()
}

fn subsets(poset: &Poset) -> Result<impl Iterator<Item = Vec<usize>>, OracleError> {
    let n = poset.len();
    if n > MAX_ENUMERATION {
        return Err(OracleError::TooLarge { what: "poset", size: n, cap: MAX_ENUMERATION });
    }
    Ok((0u32..(1 << n)).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect()))
}

/// Whether every element has something below it in `members`, straight
/// from the definition.
pub fn is_dense_naive(poset: &Poset, members: &[usize]) -> bool {
    (0..poset.len()).all(|p| members.iter().any(|&q| poset.le(q, p)))
}

/// Every dense subset: each `p` has some `q <= p` inside.
pub fn enumerate_dense(poset: &Poset) -> Result<Vec<Vec<usize>>, OracleError> {
    let le = leq_matrix(poset);
    let n = poset.len();
    Ok(subsets(poset)?
        .filter(|d| (0..n).all(|p| d.iter().any(|&q| le[q][p])))
        .collect())
}

fn is_filter(le: &[Vec<bool>], f: &[usize]) -> bool {
    let n = le.len();
    if f.is_empty() {
        return false;
    }
    for &p in f {
        for q in 0..n {
            if le[p][q] && !f.contains(&q) {
                return false;
            }
        }
    }
    for &p in f {
        for &q in f {
            if !f.iter().any(|&r| le[r][p] && le[r][q]) {
                return false;
            }
        }
    }
    true
}

/// Every filter: nonempty, upward closed, and any two members have a common
/// lower bound inside.
pub fn enumerate_filters(poset: &Poset) -> Result<Vec<Vec<usize>>, OracleError> {
    let le = leq_matrix(poset);
    Ok(subsets(poset)?.filter(|f| is_filter(&le, f)).collect())
}

/// Every regular open set of the down-set topology, i.e. every `S` with
/// `S = int(cl(S))`.
pub fn enumerate_regular_opens(poset: &Poset) -> Result<Vec<Vec<usize>>, OracleError> {
    let le = leq_matrix(poset);
    let n = poset.len();
    let le = &le;
    let below = |p: usize| (0..n).filter(move |&q| le[q][p]);
    Ok(subsets(poset)?
        .filter(|s| {
            let cl: Vec<usize> = (0..n).filter(|&p| below(p).any(|q| s.contains(&q))).collect();
            let int_cl: Vec<usize> = (0..n).filter(|&p| below(p).all(|q| cl.contains(&q))).collect();
            &int_cl == s
        })
        .collect())
}

/// Every subset of the `atoms`-atom powerset algebra satisfying the five
/// ultrafilter properties. Elements are bitmasks over atoms; each result is
/// the sorted list of member elements.
pub fn enumerate_ultrafilters_bruteforce(atoms: usize) -> Result<Vec<Vec<u32>>, OracleError> {
    if atoms == 0 || atoms > MAX_BRUTE_ATOMS {
        return Err(OracleError::TooLarge { what: "algebra", size: atoms, cap: MAX_BRUTE_ATOMS });
    }
    let size = 1usize << atoms;
    let top = (size - 1) as u32;
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << size) {
        let has = |x: u32| mask >> x & 1 == 1;
        let ok = has(top)
            && !has(0)
            && (0..size as u32).all(|x| {
                (0..size as u32).all(|y| {
                    let meet_ok = !(has(x) && has(y)) || has(x & y);
                    let up_ok = !(has(x) && x & y == x) || has(y);
                    meet_ok && up_ok
                }) && (has(x) || has(top & !x))
            });
        if ok {
            out.push((0..size as u32).filter(|&x| has(x)).collect());
        }
    }
    Ok(out)
}

/// Whether `filter` meets every dense subset, checked against the full
/// enumeration.
pub fn meets_every_dense(poset: &Poset, filter: &[usize]) -> Result<bool, OracleError> {
    Ok(enumerate_dense(poset)?.iter().all(|d| d.iter().any(|p| filter.contains(p))))
}

/// One representative of every isomorphism class of posets with exactly
/// `n` elements.
///
/// Every finite poset has a linear extension, so it suffices to look at
/// strict orders contained in `i < j`; classes are merged by the minimal
/// relation code over all relabellings.
pub fn posets_of_size(n: usize) -> Vec<Poset> {
    assert!(n <= 7, "catalog is only practical for n <= 7");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut lt = vec![vec![false; n]; n];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                lt[i][j] = true;
            }
        }
        let transitive = (0..n).all(|a| (0..n).all(|b| !lt[a][b] || (0..n).all(|c| !lt[b][c] || lt[a][c])));
        if !transitive {
            continue;
        }
        let code = perms
            .iter()
            .map(|perm| {
                let mut c = 0u64;
                for a in 0..n {
                    for b in 0..n {
                        if lt[a][b] {
                            c |= 1 << (perm[a] * n + perm[b]);
                        }
                    }
                }
                c
            })
            .min()
            .unwrap_or(0);
        if seen.insert(code) {
            let ids = (0..n).map(|i| format!("p{i}")).collect();
            let strict: Vec<(usize, usize)> =
                pairs.iter().copied().filter(|&(i, j)| lt[i][j]).collect();
            out.push(Poset::from_pairs(ids, &strict).expect("strict order is acyclic"));
        }
    }
    out
}

/// Posets with 1 to `max_n` elements, one per isomorphism class.
pub fn poset_catalog(max_n: usize) -> Vec<Poset> {
    (1..=max_n).flat_map(posets_of_size).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn v2() -> FiniteStructure {
        let sets = HfSet::all_up_to_rank(2);
        let labelled: Vec<(String, HfSet)> = sets.into_iter().enumerate().map(|(i, s)| (format!("s{i}"), s)).collect();
        FiniteStructure::from_hf_sets(&labelled)
    }

    #[test]
    fn tarski_basics() {
        let s = v2();
        assert_eq!(s.carrier().len(), 4);
        let ext = parse("forall x . forall y . (forall z . (z in x <-> z in y)) -> x = y").unwrap();
        assert!(tarski_eval(&s, &ext, &[]).unwrap());
        assert!(!tarski_eval(&s, &parse("exists x . x in x").unwrap(), &[]).unwrap());
        assert!(tarski_eval(&s, &parse("exists x . forall y . ~y in x").unwrap(), &[]).unwrap());
        assert_eq!(
            tarski_eval(&s, &parse("zz in s0").unwrap(), &[]),
            Err(OracleError::UnresolvedIdentifier("zz".into()))
        );
    }

    #[test]
    fn dense_counts() {
        let anti = Poset::load("elem p\nelem q").unwrap();
        assert_eq!(enumerate_dense(&anti).unwrap(), vec![vec![0, 1]]);
        let chain = Poset::load("le q p").unwrap();
        assert_eq!(enumerate_dense(&chain).unwrap().len(), 2);
    }

    #[test]
    fn filters_and_regular_opens() {
        let chain = Poset::load("le q p").unwrap();
        // {p} and {q, p}
        assert_eq!(enumerate_filters(&chain).unwrap().len(), 2);
        let anti = Poset::load("elem p\nelem q").unwrap();
        assert_eq!(enumerate_regular_opens(&anti).unwrap().len(), 4);
        assert_eq!(enumerate_regular_opens(&chain).unwrap().len(), 2);
    }

    #[test]
    fn brute_ultrafilters() {
        assert_eq!(enumerate_ultrafilters_bruteforce(2).unwrap().len(), 2);
        assert_eq!(enumerate_ultrafilters_bruteforce(3).unwrap().len(), 3);
        assert!(enumerate_ultrafilters_bruteforce(5).is_err());
    }

    #[test]
    fn catalog_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| posets_of_size(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 16, 63]);
    }
}
