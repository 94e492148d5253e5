//! Finite posets of forcing conditions.
//!
//! `q <= p` means `q` is the stronger (more informative) condition. Dense
//! sets, filters and genericity follow that orientation, as does the
//! completion into a Boolean algebra of regular open sets.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{AlgebraError, BooleanAlgebra, Element};

/// Posets above this size are refused by the `ALL` genericity check.
pub const MAX_ALL_DENSE: usize = 15;

/// Default size cap for [`complete`].
pub const DEFAULT_COMPLETION_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("antisymmetry violated: {0} <= {1} and {1} <= {0}")]
    Cycle(String, String),
    #[error("unknown condition {0:?}")]
    UnknownElement(String),
    #[error("set is not dense: nothing in it lies below {witness}")]
    NotDense { witness: String },
    #[error("set is not a filter")]
    NotFilter,
    #[error("ALL dense subsets requested on a poset with {size} elements (limit {MAX_ALL_DENSE})")]
    TooLargeForAll { size: usize },
    #[error("poset has {size} elements, completion cap is {cap}")]
    CompletionCap { size: usize, cap: usize },
    #[error("empty poset")]
    Empty,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '(' | ')' | '>' | ',' | '-'))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Relation {
    /// `below[p][q]` iff `q <= p`.
    Matrix(Vec<Vec<bool>>),
    /// Partial 0/1 functions on a cell grid as `(defined, values)` masks,
    /// ordered by reverse inclusion.
    ReverseInclusion(Vec<(u32, u32)>),
}

/// A finite partial order with named elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    relation: Relation,
}

/// A subset of a poset's elements, stored as a membership vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(Vec<bool>);

impl Subset {
    pub fn empty(n: usize) -> Self {
        Subset(vec![false; n])
    }

    pub fn full(n: usize) -> Self {
        Subset(vec![true; n])
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, items: I) -> Self {
        let mut s = Subset::empty(n);
        for i in items {
            s.0[i] = true;
        }
        s
    }

    /// Subset whose membership is given by the low `n` bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Subset((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn universe_len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.get(i).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i] = true;
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn len(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.0.contains(&true)
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| !a || b)
    }

    pub fn intersects(&self, other: &Subset) -> bool {
        self.0.iter().zip(&other.0).any(|(&a, &b)| a && b)
    }

    pub fn union(&self, other: &Subset) -> Subset {
        Subset(self.0.iter().zip(&other.0).map(|(&a, &b)| a || b).collect())
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Poset {
    /// Builds a poset from generating pairs `(q, p)` meaning `q <= p`.
    /// Reflexive and transitive closure is applied, then antisymmetry is
    /// checked.
    pub fn from_pairs(ids: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self, OrderError> {
        let n = ids.len();
        let mut below = vec![vec![false; n]; n];
        for (p, row) in below.iter_mut().enumerate() {
            row[p] = true;
        }
        for &(q, p) in pairs {
            below[p][q] = true;
        }
        // Warshall: q <= k and k <= p gives q <= p.
        for k in 0..n {
            for p in 0..n {
                if below[p][k] {
                    for q in 0..n {
                        if below[k][q] {
                            below[p][q] = true;
                        }
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..p {
                if below[p][q] && below[q][p] {
                    return Err(OrderError::Cycle(ids[q].clone(), ids[p].clone()));
                }
            }
        }
        Ok(Self::assemble(ids, Relation::Matrix(below)))
    }

    /// Builds a poset from a relation predicate `le(q, p)`, which must
    /// already be a partial order; it is validated.
    pub fn from_fn(ids: Vec<String>, le: impl Fn(usize, usize) -> bool) -> Result<Self, OrderError> {
        let n = ids.len();
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|q| (0..n).map(move |p| (q, p))).filter(|&(q, p)| le(q, p)).collect();
        let poset = Self::from_pairs(ids, &pairs)?;
        for q in 0..n {
            for p in 0..n {
                if poset.le(q, p) != le(q, p) {
                    return Err(OrderError::Parse {
                        line: 0,
                        message: format!("relation is not transitive at ({q}, {p})"),
                    });
                }
            }
        }
        Ok(poset)
    }

    /// Partial 0/1 functions given as `(defined, values)` bitmasks, ordered
    /// by reverse inclusion. Masks must be distinct.
    pub fn reverse_inclusion(ids: Vec<String>, masks: Vec<(u32, u32)>) -> Self {
        assert_eq!(ids.len(), masks.len());
        Self::assemble(ids, Relation::ReverseInclusion(masks))
    }

    fn assemble(ids: Vec<String>, relation: Relation) -> Self {
        let index = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        Poset { ids, index, relation }
    }

    /// Parses the line-oriented poset format (`elem <id>`, `le <q> <p>`,
    /// `#` comments). Ids first seen in an `le` line are declared implicitly.
    pub fn load(text: &str) -> Result<Self, OrderError> {
        let mut ids: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut pairs = Vec::new();
        let mut declare = |id: &str, line: usize, ids: &mut Vec<String>| -> Result<usize, OrderError> {
            if !valid_id(id) {
                return Err(OrderError::Parse { line, message: format!("invalid id {id:?}") });
            }
            Ok(*index.entry(id.to_string()).or_insert_with(|| {
                ids.push(id.to_string());
                ids.len() - 1
            }))
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let words: Vec<&str> = content.split_whitespace().collect();
            match words.as_slice() {
                ["elem", id] => {
                    declare(id, line, &mut ids)?;
                }
                ["le", q, p] => {
                    let q = declare(q, line, &mut ids)?;
                    let p = declare(p, line, &mut ids)?;
                    pairs.push((q, p));
                }
                _ => {
                    return Err(OrderError::Parse {
                        line,
                        message: format!("expected `elem <id>` or `le <id> <id>`, got {content:?}"),
                    })
                }
            }
        }
        Self::from_pairs(ids, &pairs)
    }

    /// Emits the poset in the line format accepted by [`Poset::load`]
    /// (covering pairs only).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for id in &self.ids {
            out.push_str(&format!("elem {id}\n"));
        }
        for p in 0..self.len() {
            for q in 0..self.len() {
                if self.lt(q, p) && !(0..self.len()).any(|r| self.lt(q, r) && self.lt(r, p)) {
                    out.push_str(&format!("le {} {}\n", self.ids[q], self.ids[p]));
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize, OrderError> {
        self.index.get(id).copied().ok_or_else(|| OrderError::UnknownElement(id.to_string()))
    }

    /// `q <= p`: `q` is at least as strong as `p`.
    pub fn le(&self, q: usize, p: usize) -> bool {
        match &self.relation {
            Relation::Matrix(below) => below[p][q],
            Relation::ReverseInclusion(masks) => {
                let (qd, qv) = masks[q];
                let (pd, pv) = masks[p];
                pd & !qd == 0 && (qv ^ pv) & pd == 0
            }
        }
    }

    pub fn lt(&self, q: usize, p: usize) -> bool {
        q != p && self.le(q, p)
    }

    /// Indices `q` with `q <= p`.
    pub fn down_set(&self, p: usize) -> Subset {
        Subset((0..self.len()).map(|q| self.le(q, p)).collect())
    }

    /// Indices `q` with `p <= q`.
    pub fn up_set(&self, p: usize) -> Subset {
        Subset((0..self.len()).map(|q| self.le(p, q)).collect())
    }

    pub fn is_minimal(&self, p: usize) -> bool {
        (0..self.len()).all(|q| !self.lt(q, p))
    }

    pub fn minimal_elements(&self) -> Subset {
        Subset((0..self.len()).map(|p| self.is_minimal(p)).collect())
    }

    pub fn maximal_elements(&self) -> Subset {
        Subset((0..self.len()).map(|p| (0..self.len()).all(|q| !self.lt(p, q))).collect())
    }

    /// Whether `p` and `q` have a common lower bound.
    pub fn compatible(&self, p: usize, q: usize) -> bool {
        (0..self.len()).any(|r| self.le(r, p) && self.le(r, q))
    }

    /// Every element has something from `s` below it.
    pub fn is_dense(&self, s: &Subset) -> bool {
        self.density_witness(s).is_none()
    }

    /// An element with nothing from `s` below it, if any.
    pub fn density_witness(&self, s: &Subset) -> Option<usize> {
        (0..self.len()).find(|&p| !s.iter().any(|q| self.le(q, p)))
    }

    /// Nonempty, upward closed and downward directed.
    pub fn is_filter(&self, s: &Subset) -> bool {
        if s.is_empty() {
            return false;
        }
        let upward = s.iter().all(|p| (0..self.len()).all(|q| !self.le(p, q) || s.contains(q)));
        upward
            && s.iter()
                .all(|p| s.iter().all(|q| s.iter().any(|r| self.le(r, p) && self.le(r, q))))
    }

    /// Whether `filter` meets every set of the family, or every dense subset
    /// of the poset when `Genericity::All` is requested.
    pub fn is_generic(&self, filter: &Filter, family: Genericity<'_>) -> Result<bool, OrderError> {
        match family {
            Genericity::Family(sets) => Ok(sets.iter().all(|d| d.members.intersects(&filter.members))),
            Genericity::All => {
                let n = self.len();
                if n > MAX_ALL_DENSE {
                    return Err(OrderError::TooLargeForAll { size: n });
                }
                for mask in 0..(1u64 << n) {
                    let s = Subset::from_mask(n, mask);
                    if !s.intersects(&filter.members) && self.is_dense(&s) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// `cl(S)`: elements whose down-set meets `S` (the up-closure of `S`).
    pub fn closure(&self, s: &Subset) -> Subset {
        Subset((0..self.len()).map(|p| s.iter().any(|q| self.le(q, p))).collect())
    }

    /// `int(S)`: elements whose whole down-set lies in `S`.
    pub fn interior(&self, s: &Subset) -> Subset {
        Subset((0..self.len()).map(|p| (0..self.len()).all(|q| !self.le(q, p) || s.contains(q))).collect())
    }

    pub fn regular_open(&self, s: &Subset) -> Subset {
        self.interior(&self.closure(s))
    }

    pub fn is_regular_open(&self, s: &Subset) -> bool {
        self.regular_open(s) == *s
    }
}

/// Which dense sets a genericity check ranges over.
#[derive(Debug, Clone, Copy)]
pub enum Genericity<'a> {
    Family(&'a [DenseSet]),
    All,
}

/// A subset verified to be dense in its poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseSet {
    members: Subset,
}

impl DenseSet {
    pub fn new(poset: &Poset, members: Subset) -> Result<Self, OrderError> {
        match poset.density_witness(&members) {
            Some(w) => Err(OrderError::NotDense { witness: poset.id(w).to_string() }),
            None => Ok(DenseSet { members }),
        }
    }

    pub fn members(&self) -> &Subset {
        &self.members
    }
}

/// A subset verified to be a filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filter {
    members: Subset,
}

impl Filter {
    pub fn new(poset: &Poset, members: Subset) -> Result<Self, OrderError> {
        if poset.is_filter(&members) {
            Ok(Filter { members })
        } else {
            Err(OrderError::NotFilter)
        }
    }

    /// The up-set of `p`, which is always a filter.
    pub fn principal(poset: &Poset, p: usize) -> Self {
        Filter { members: poset.up_set(p) }
    }

    pub fn members(&self) -> &Subset {
        &self.members
    }

    pub fn contains(&self, p: usize) -> bool {
        self.members.contains(p)
    }
}

/// Parses a dense-family file (`dense <name> = <id> <id> ...`), checking
/// each set for density.
pub fn load_dense_family(poset: &Poset, text: &str) -> Result<Vec<(String, DenseSet)>, OrderError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| OrderError::Parse { line: lineno + 1, message };
        let rest = content.strip_prefix("dense").ok_or_else(|| err("expected `dense`".into()))?;
        let (name, members) = rest.split_once('=').ok_or_else(|| err("expected `=`".into()))?;
        let name = name.trim();
        if !valid_id(name) {
            return Err(err(format!("invalid name {name:?}")));
        }
        let mut s = Subset::empty(poset.len());
        for id in members.split_whitespace() {
            s.insert(poset.index_of(id)?);
        }
        out.push((name.to_string(), DenseSet::new(poset, s)?));
    }
    Ok(out)
}

/// The completion of a poset: a canonical atom-set algebra together with
/// the embedding of conditions as nonzero elements.
#[derive(Debug, Clone)]
pub struct Completion {
    source: Poset,
    target: BooleanAlgebra,
    embed: Vec<Element>,
    atom_opens: Vec<Subset>,
}

impl Completion {
    pub fn source(&self) -> &Poset {
        &self.source
    }

    pub fn target(&self) -> &BooleanAlgebra {
        &self.target
    }

    pub fn embed(&self, p: usize) -> Element {
        self.embed[p]
    }

    /// The regular open set corresponding to atom `i`.
    pub fn atom_open(&self, i: usize) -> &Subset {
        &self.atom_opens[i]
    }

    /// The regular open set an element stands for: `int(cl(union of its atoms))`.
    pub fn regular_open_of(&self, x: Element) -> Subset {
        let mut u = Subset::empty(self.source.len());
        for a in x.atoms() {
            u = u.union(&self.atom_opens[a]);
        }
        self.source.regular_open(&u)
    }

    /// Inverse of [`Completion::regular_open_of`] on regular open sets.
    pub fn element_of(&self, regular_open: &Subset) -> Element {
        let atoms = (0..self.atom_opens.len()).filter(|&i| self.atom_opens[i].is_subset(regular_open));
        self.target.element_from_atoms(atoms).expect("atom indices in range")
    }
}

/// Completes `poset` with the default size cap.
pub fn complete(poset: &Poset) -> Result<Completion, OrderError> {
    complete_with_cap(poset, DEFAULT_COMPLETION_CAP)
}

/// Regular open algebra of the down-set topology, canonicalized to atoms.
///
/// Each condition `p` gives the regular open `int(cl(down(p)))`; these are
/// dense among nonzero regular opens, so the inclusion-minimal ones are
/// exactly the atoms. Atoms are numbered by the first condition producing
/// them.
pub fn complete_with_cap(poset: &Poset, cap: usize) -> Result<Completion, OrderError> {
    let n = poset.len();
    if n == 0 {
        return Err(OrderError::Empty);
    }
    if n > cap {
        return Err(OrderError::CompletionCap { size: n, cap });
    }
    let opens: Vec<Subset> = (0..n).map(|p| poset.regular_open(&poset.down_set(p))).collect();
    let mut atom_opens: Vec<Subset> = Vec::new();
    for r in &opens {
        let minimal = opens.iter().all(|s| !(s.is_subset(r) && s != r));
        if minimal && !atom_opens.contains(r) {
            atom_opens.push(r.clone());
        }
    }
    let target = BooleanAlgebra::with_cap(atom_opens.len(), atom_opens.len().max(1))?;
    let mut completion = Completion { source: poset.clone(), target, embed: Vec::new(), atom_opens };
    completion.embed = opens.iter().map(|r| completion.element_of(r)).collect();
    Ok(completion)
}
