//! Cohen forcing at desk scale and the forcing relation `p ||- phi`.
//!
//! Conditions are finite partial functions from a grid of (row, column)
//! cells to {0, 1}, ordered by reverse inclusion. A finite truncation gives
//! an ordinary [`Poset`] that can be completed; the lazy variant has
//! unboundedly many columns and represents dense sets by their extension
//! procedures rather than by enumeration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lang::Formula;
use crate::order::{Completion, DenseSet, Filter, OrderError, Poset, Subset};
use crate::valuation::{ValuationContext, ValuationError};

/// Finite Cohen posets have `3^(rows*cols)` elements; this bounds `rows*cols`.
pub const MAX_FINITE_CELLS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForcingError {
    #[error("grid {rows}x{cols} has more than {MAX_FINITE_CELLS} cells")]
    GridTooLarge { rows: usize, cols: usize },
    #[error("cell (r{row},{col}) outside the {rows}x{cols} grid")]
    OutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("row r{0} does not exist")]
    UnknownRow(usize),
    #[error("distinctness needs two different rows, got r{0} twice")]
    SameRow(usize),
    #[error("conditions disagree at (r{row},{col}): not a function")]
    NotFunctional { row: usize, col: usize },
    #[error("condition syntax: {0}")]
    Syntax(String),
    #[error("completion algebra has {completion} atoms but the universe algebra has {universe}")]
    MismatchedAlgebra { completion: usize, universe: usize },
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

/// A finite partial function from cells `(row, col)` to bits.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Condition {
    cells: BTreeMap<(usize, usize), bool>,
}

impl Condition {
    pub fn empty() -> Self {
        Condition::default()
    }

    pub fn get(&self, row: usize, col: usize) -> Option<bool> {
        self.cells.get(&(row, col)).copied()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = ((usize, usize), bool)> + '_ {
        self.cells.iter().map(|(&k, &v)| (k, v))
    }

    /// `self` extended at a cell; fails if the cell already holds the other bit.
    pub fn with(&self, row: usize, col: usize, bit: bool) -> Result<Condition, ForcingError> {
        match self.get(row, col) {
            Some(b) if b != bit => Err(ForcingError::NotFunctional { row, col }),
            _ => {
                let mut c = self.clone();
                c.cells.insert((row, col), bit);
                Ok(c)
            }
        }
    }

    /// `self <= other` in reverse inclusion: `self` contains `other`.
    pub fn extends(&self, other: &Condition) -> bool {
        other.cells.iter().all(|(k, v)| self.cells.get(k) == Some(v))
    }

    pub fn compatible(&self, other: &Condition) -> bool {
        self.cells.iter().all(|(k, v)| other.cells.get(k).is_none_or(|w| w == v))
    }

    /// Largest column mentioned, if any.
    pub fn max_col(&self) -> Option<usize> {
        self.cells.keys().map(|&(_, c)| c).max()
    }

    pub fn is_total_on(&self, rows: usize, cols: usize) -> bool {
        (0..rows).all(|r| (0..cols).all(|c| self.cells.contains_key(&(r, c))))
    }

    /// A column where both rows are defined and differ.
    pub fn distinguishing_column(&self, r1: usize, r2: usize) -> Option<usize> {
        self.cells
            .iter()
            .filter(|(&(r, _), _)| r == r1)
            .find(|(&(_, c), &v)| self.get(r2, c).is_some_and(|w| w != v))
            .map(|(&(_, c), _)| c)
    }

    /// Id used for this condition as a poset element: the text form without
    /// braces, or `empty`.
    pub fn poset_id(&self) -> String {
        if self.is_empty() {
            "empty".to_string()
        } else {
            let s = self.to_string();
            s[1..s.len() - 1].to_string()
        }
    }

    /// Rows as bit strings over columns `0..cols`, `.` for undefined.
    pub fn table(&self, rows: usize, cols: usize) -> Vec<String> {
        (0..rows)
            .map(|r| {
                let bits: String = (0..cols)
                    .map(|c| match self.get(r, c) {
                        Some(true) => '1',
                        Some(false) => '0',
                        None => '.',
                    })
                    .collect();
                format!("r{r} {bits}")
            })
            .collect()
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.cells.iter().map(|(&(r, c), &b)| format!("(r{r},{c})->{}", u8::from(b))).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for Condition {
    type Err = ForcingError;

    /// Accepts `{(r0,0)->1,(r1,2)->0}`; braces optional, `empty` or `{}` for
    /// the empty condition.
    fn from_str(s: &str) -> Result<Self, ForcingError> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let t = t.strip_prefix('{').and_then(|x| x.strip_suffix('}')).unwrap_or(&t);
        let mut cond = Condition::empty();
        if t.is_empty() || t == "empty" {
            return Ok(cond);
        }
        let bad = || ForcingError::Syntax(format!("cannot parse condition {s:?}"));
        let mut rest = t;
        loop {
            let inner = rest.strip_prefix("(r").ok_or_else(bad)?;
            let (row, inner) = inner.split_once(',').ok_or_else(bad)?;
            let (col, inner) = inner.split_once(")->").ok_or_else(bad)?;
            let (bit, tail) = inner.split_at(inner.find(',').unwrap_or(inner.len()));
            let row: usize = row.parse().map_err(|_| bad())?;
            let col: usize = col.parse().map_err(|_| bad())?;
            let bit = match bit {
                "0" => false,
                "1" => true,
                _ => return Err(bad()),
            };
            cond = cond.with(row, col, bit)?;
            match tail.strip_prefix(',') {
                Some(more) => rest = more,
                None if tail.is_empty() => return Ok(cond),
                None => return Err(bad()),
            }
        }
    }
}

/// Union of pairwise compatible conditions.
pub fn union_of_conditions<'a, I: IntoIterator<Item = &'a Condition>>(conds: I) -> Result<Condition, ForcingError> {
    let mut out = Condition::empty();
    for c in conds {
        for ((row, col), bit) in c.cells() {
            out = out.with(row, col, bit)?;
        }
    }
    Ok(out)
}

/// All partial functions from an `rows x cols` grid to {0, 1}.
#[derive(Debug, Clone)]
pub struct FiniteCohen {
    rows: usize,
    cols: usize,
    conditions: Vec<Condition>,
    poset: Poset,
}

/// Builds the finite Cohen poset on an `rows x cols` grid.
///
/// Element `k` assigns cell `i = row * cols + col` the `i`-th base-3 digit of
/// `k`: 0 undefined, 1 maps to 0, 2 maps to 1. Element 0 is the empty condition.
pub fn cohen_poset_finite(rows: usize, cols: usize) -> Result<FiniteCohen, ForcingError> {
    let cells = rows * cols;
    if cells > MAX_FINITE_CELLS {
        return Err(ForcingError::GridTooLarge { rows, cols });
    }
    let count = 3usize.pow(cells as u32);
    let mut conditions = Vec::with_capacity(count);
    let mut masks = Vec::with_capacity(count);
    for k in 0..count {
        let (mut rest, mut defined, mut values) = (k, 0u32, 0u32);
        let mut cond = Condition::empty();
        for i in 0..cells {
            let digit = rest % 3;
            rest /= 3;
            if digit > 0 {
                defined |= 1 << i;
                if digit == 2 {
                    values |= 1 << i;
                }
                cond.cells.insert((i / cols, i % cols), digit == 2);
            }
        }
        conditions.push(cond);
        masks.push((defined, values));
    }
    let ids = conditions.iter().map(Condition::poset_id).collect();
    let poset = Poset::reverse_inclusion(ids, masks);
    Ok(FiniteCohen { rows, cols, conditions, poset })
}

/// Outcome of asking for a dense set that may fail to be dense.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Density {
    Dense(DenseSet),
    /// No member of the candidate set lies below `counterexample`.
    NotDense { counterexample: Condition },
}

impl FiniteCohen {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn condition(&self, i: usize) -> &Condition {
        &self.conditions[i]
    }

    pub fn index_of(&self, c: &Condition) -> Option<usize> {
        if c.cells.keys().any(|&(r, col)| r >= self.rows || col >= self.cols) {
            return None;
        }
        let mut index = 0usize;
        for (&(r, col), &b) in &c.cells {
            index += (1 + usize::from(b)) * 3usize.pow((r * self.cols + col) as u32);
        }
        Some(index)
    }

    fn check_cell(&self, row: usize, col: usize) -> Result<(), ForcingError> {
        if row < self.rows && col < self.cols {
            Ok(())
        } else {
            Err(ForcingError::OutOfRange { row, col, rows: self.rows, cols: self.cols })
        }
    }

    /// Conditions defined at `(row, col)`; always dense.
    pub fn dense_point(&self, row: usize, col: usize) -> Result<DenseSet, ForcingError> {
        self.check_cell(row, col)?;
        let members = Subset::from_indices(
            self.conditions.len(),
            (0..self.conditions.len()).filter(|&i| self.conditions[i].get(row, col).is_some()),
        );
        Ok(DenseSet::new(&self.poset, members)?)
    }

    /// Conditions on which rows `r1` and `r2` provably differ. In a finite
    /// grid this is not dense: two equal total rows cannot be separated.
    pub fn dense_distinct(&self, r1: usize, r2: usize) -> Result<Density, ForcingError> {
        for r in [r1, r2] {
            if r >= self.rows {
                return Err(ForcingError::UnknownRow(r));
            }
        }
        if r1 == r2 {
            return Err(ForcingError::SameRow(r1));
        }
        let members = Subset::from_indices(
            self.conditions.len(),
            (0..self.conditions.len()).filter(|&i| self.conditions[i].distinguishing_column(r1, r2).is_some()),
        );
        match self.poset.density_witness(&members) {
            Some(w) => Ok(Density::NotDense { counterexample: self.conditions[w].clone() }),
            None => Ok(Density::Dense(DenseSet::new(&self.poset, members)?)),
        }
    }

    /// Union of the conditions in a filter.
    pub fn union_of_filter(&self, filter: &Filter) -> Result<Condition, ForcingError> {
        union_of_conditions(filter.members().iter().map(|i| &self.conditions[i]))
    }
}

/// The result of hitting dense sets one after another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteChain {
    /// Descending conditions; entry `i + 1` lies in the `i`-th dense set.
    pub chain: Vec<usize>,
}

impl FiniteChain {
    pub fn strongest(&self) -> usize {
        *self.chain.last().expect("chain starts with a condition")
    }

    /// The filter generated by the chain: the up-set of its last condition.
    pub fn filter(&self, poset: &Poset) -> Filter {
        Filter::principal(poset, self.strongest())
    }
}

/// Descends through `family` starting from a maximal element chosen by the
/// seed. At each step the next condition is a weakest member of the dense
/// set below the current one, ties broken by the seed.
pub fn hit_dense_sets(poset: &Poset, family: &[DenseSet], seed: u64) -> Result<FiniteChain, ForcingError> {
    if poset.is_empty() {
        return Err(OrderError::Empty.into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tops: Vec<usize> = poset.maximal_elements().iter().collect();
    let mut p = *tops.choose(&mut rng).expect("finite nonempty posets have maximal elements");
    let mut chain = vec![p];
    for d in family {
        let below: Vec<usize> = d.members().iter().filter(|&q| poset.le(q, p)).collect();
        let weakest: Vec<usize> =
            below.iter().copied().filter(|&q| !below.iter().any(|&r| poset.lt(q, r))).collect();
        p = *weakest.choose(&mut rng).ok_or_else(|| OrderError::NotDense { witness: poset.id(p).to_string() })?;
        chain.push(p);
    }
    Ok(FiniteChain { chain })
}

/// Cohen conditions on finitely many rows and unboundedly many columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LazyCohenPoset {
    rows: usize,
}

/// A dense set of the lazy poset, given by membership and minimal extensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LazyDense {
    /// Conditions defined at a cell.
    Point { row: usize, col: usize },
    /// Conditions on which two rows differ somewhere.
    Distinct { r1: usize, r2: usize },
}

impl LazyCohenPoset {
    pub fn new(rows: usize) -> Self {
        LazyCohenPoset { rows }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dense_point(&self, row: usize, col: usize) -> Result<LazyDense, ForcingError> {
        if row >= self.rows {
            return Err(ForcingError::UnknownRow(row));
        }
        Ok(LazyDense::Point { row, col })
    }

    pub fn dense_distinct(&self, r1: usize, r2: usize) -> Result<LazyDense, ForcingError> {
        for r in [r1, r2] {
            if r >= self.rows {
                return Err(ForcingError::UnknownRow(r));
            }
        }
        if r1 == r2 {
            return Err(ForcingError::SameRow(r1));
        }
        Ok(LazyDense::Distinct { r1, r2 })
    }

    /// Point sets for every row and column below `cols`, then distinctness
    /// for every pair of rows.
    pub fn standard_family(&self, cols: usize) -> Vec<LazyDense> {
        let mut family: Vec<LazyDense> =
            (0..self.rows).flat_map(|row| (0..cols).map(move |col| LazyDense::Point { row, col })).collect();
        for r1 in 0..self.rows {
            for r2 in r1 + 1..self.rows {
                family.push(LazyDense::Distinct { r1, r2 });
            }
        }
        family
    }
}

impl LazyDense {
    pub fn contains(&self, p: &Condition) -> bool {
        match *self {
            LazyDense::Point { row, col } => p.get(row, col).is_some(),
            LazyDense::Distinct { r1, r2 } => p.distinguishing_column(r1, r2).is_some(),
        }
    }

    /// Members below `p` adding the fewest cells. Never empty, which is the
    /// density certificate. Distinctness only considers mentioned columns and
    /// one fresh column; every other fresh column behaves the same way.
    pub fn minimal_extensions(&self, p: &Condition) -> Vec<Condition> {
        if self.contains(p) {
            return vec![p.clone()];
        }
        match *self {
            LazyDense::Point { row, col } => {
                [false, true].iter().map(|&b| p.with(row, col, b).expect("cell undefined")).collect()
            }
            LazyDense::Distinct { r1, r2 } => {
                let fresh = p.max_col().map_or(0, |c| c + 1);
                let mut best: Vec<Condition> = Vec::new();
                let mut best_cost = usize::MAX;
                for c in 0..=fresh {
                    let options: Vec<Condition> = match (p.get(r1, c), p.get(r2, c)) {
                        (Some(_), Some(_)) => continue,
                        (Some(a), None) => vec![p.with(r2, c, !a).expect("undefined")],
                        (None, Some(b)) => vec![p.with(r1, c, !b).expect("undefined")],
                        (None, None) => [false, true]
                            .iter()
                            .map(|&a| p.with(r1, c, a).and_then(|q| q.with(r2, c, !a)).expect("undefined"))
                            .collect(),
                    };
                    for q in options {
                        let cost = q.len() - p.len();
                        if cost < best_cost {
                            best_cost = cost;
                            best.clear();
                        }
                        if cost == best_cost {
                            best.push(q);
                        }
                    }
                }
                best
            }
        }
    }
}

impl fmt::Display for LazyDense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LazyDense::Point { row, col } => write!(f, "point(r{row},{col})"),
            LazyDense::Distinct { r1, r2 } => write!(f, "distinct(r{r1},r{r2})"),
        }
    }
}

/// Descending chain of conditions in the lazy poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LazyChain {
    pub chain: Vec<Condition>,
}

impl LazyChain {
    pub fn strongest(&self) -> &Condition {
        self.chain.last().expect("chain starts with the empty condition")
    }

    /// The union of the generated filter, i.e. its strongest condition,
    /// recomputed from the whole chain so incompatibilities surface.
    pub fn union(&self) -> Result<Condition, ForcingError> {
        union_of_conditions(&self.chain)
    }
}

/// Starting from the empty condition, extends minimally into each dense set
/// in turn, choosing among minimal extensions by the seed.
pub fn hit_dense_sets_lazy(poset: &LazyCohenPoset, family: &[LazyDense], seed: u64) -> Result<LazyChain, ForcingError> {
    for d in family {
        match *d {
            LazyDense::Point { row, col } => {
                poset.dense_point(row, col)?;
            }
            LazyDense::Distinct { r1, r2 } => {
                poset.dense_distinct(r1, r2)?;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chain = vec![Condition::empty()];
    for d in family {
        let current = chain.last().expect("nonempty");
        let options = d.minimal_extensions(current);
        let next = options.choose(&mut rng).expect("dense sets always extend").clone();
        chain.push(next);
    }
    Ok(LazyChain { chain })
}

/// `p ||- f` iff `embed(p) <= [[f]]`, with `[[f]]` computed in `ctx`, whose
/// universe must live over the completion's algebra.
pub fn forces(completion: &Completion, p: usize, f: &Formula, ctx: &mut ValuationContext<'_>) -> Result<bool, ForcingError> {
    let universe = ctx.universe().algebra().atom_count();
    let target = completion.target().atom_count();
    if universe != target {
        return Err(ForcingError::MismatchedAlgebra { completion: target, universe });
    }
    if p >= completion.source().len() {
        return Err(OrderError::UnknownElement(format!("#{p}")).into());
    }
    let value = ctx.val_sentence(f)?;
    Ok(completion.embed(p).leq(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;
    use crate::names::load_names;
    use crate::order::{complete, Genericity};

    #[test]
    fn condition_text() {
        let c: Condition = "{(r0,0)->1,(r1,2)->0}".parse().unwrap();
        assert_eq!(c.get(0, 0), Some(true));
        assert_eq!(c.get(1, 2), Some(false));
        assert_eq!(c.to_string(), "{(r0,0)->1,(r1,2)->0}");
        assert_eq!(c.poset_id(), "(r0,0)->1,(r1,2)->0");
        assert_eq!(c.poset_id().parse::<Condition>().unwrap(), c);
        assert_eq!("{}".parse::<Condition>().unwrap(), Condition::empty());
        assert!("{(r0,0)->1,(r0,0)->0}".parse::<Condition>().is_err());
        assert!("{(x0,0)->1}".parse::<Condition>().is_err());
        assert!("{(r0,0)->2}".parse::<Condition>().is_err());
    }

    #[test]
    fn finite_sizes() {
        assert_eq!(cohen_poset_finite(1, 1).unwrap().poset().len(), 3);
        assert_eq!(cohen_poset_finite(2, 1).unwrap().poset().len(), 9);
        let p = cohen_poset_finite(2, 2).unwrap();
        assert_eq!(p.poset().len(), 81);
        assert_eq!(p.poset().minimal_elements().len(), 16);
        assert!(matches!(cohen_poset_finite(4, 4), Err(ForcingError::GridTooLarge { .. })));
    }

    #[test]
    fn finite_indexing_round_trip() {
        let p = cohen_poset_finite(2, 2).unwrap();
        for i in 0..p.poset().len() {
            assert_eq!(p.index_of(p.condition(i)), Some(i));
            assert_eq!(p.poset().index_of(&p.condition(i).poset_id()).unwrap(), i);
        }
        for i in 0..p.poset().len() {
            for j in 0..p.poset().len() {
                assert_eq!(p.poset().le(i, j), p.condition(i).extends(p.condition(j)));
            }
        }
    }

    #[test]
    fn finite_dense_sets() {
        let p = cohen_poset_finite(1, 1).unwrap();
        let d = p.dense_point(0, 0).unwrap();
        assert_eq!(d.members().len(), 2);
        assert!(p.dense_point(0, 1).is_err());

        let q = cohen_poset_finite(2, 1).unwrap();
        match q.dense_distinct(0, 1).unwrap() {
            Density::NotDense { counterexample } => {
                assert_eq!(counterexample, "{(r0,0)->0,(r1,0)->0}".parse().unwrap());
            }
            other => panic!("expected NOT-DENSE, got {other:?}"),
        }
        assert!(matches!(q.dense_distinct(0, 0), Err(ForcingError::SameRow(0))));
    }

    #[test]
    fn lazy_distinct_is_dense() {
        let lazy = LazyCohenPoset::new(2);
        let d = lazy.dense_distinct(0, 1).unwrap();
        let p: Condition = "{(r0,0)->0,(r1,0)->0}".parse().unwrap();
        let ext = d.minimal_extensions(&p);
        assert!(!ext.is_empty());
        for q in &ext {
            assert!(q.extends(&p) && d.contains(q));
            assert_eq!(q.len(), 4);
            assert_eq!(q.distinguishing_column(0, 1), Some(1));
        }
        let half: Condition = "{(r0,0)->1}".parse().unwrap();
        let ext = d.minimal_extensions(&half);
        assert_eq!(ext, vec!["{(r0,0)->1,(r1,0)->0}".parse().unwrap()]);
    }

    #[test]
    fn hitting_one_point() {
        let lazy = LazyCohenPoset::new(1);
        let chain = hit_dense_sets_lazy(&lazy, &[lazy.dense_point(0, 0).unwrap()], 0).unwrap();
        assert!(chain.strongest().get(0, 0).is_some());

        let fin = cohen_poset_finite(1, 1).unwrap();
        let chain = hit_dense_sets(fin.poset(), &[fin.dense_point(0, 0).unwrap()], 0).unwrap();
        assert_eq!(chain.chain[0], 0);
        let f = chain.filter(fin.poset());
        assert!(fin.union_of_filter(&f).unwrap().get(0, 0).is_some());
        assert!(fin.poset().is_generic(&f, Genericity::All).unwrap());
    }

    #[test]
    fn union_rejects_incompatible() {
        let a: Condition = "{(r0,0)->0}".parse().unwrap();
        let b: Condition = "{(r0,0)->1}".parse().unwrap();
        assert!(matches!(union_of_conditions([&a, &b]), Err(ForcingError::NotFunctional { row: 0, col: 0 })));
        let total: Condition = "{(r0,0)->1,(r0,1)->0}".parse().unwrap();
        let fin = cohen_poset_finite(1, 2).unwrap();
        let f = Filter::principal(fin.poset(), fin.index_of(&total).unwrap());
        assert_eq!(fin.union_of_filter(&f).unwrap(), total);
    }

    #[test]
    fn forcing_antichain_example() {
        let poset = Poset::load("elem p\nelem q").unwrap();
        let c = complete(&poset).unwrap();
        let names = load_names("name z { }\nname u { z : a0 }", c.target()).unwrap();
        assert_eq!(c.embed(0), c.target().atom(0).unwrap());
        let mut ctx = ValuationContext::new(&names);
        let zin = parse("z in u").unwrap();
        assert!(forces(&c, 0, &zin, &mut ctx).unwrap());
        assert!(!forces(&c, 1, &zin, &mut ctx).unwrap());
        assert!(forces(&c, 1, &parse("~z in u").unwrap(), &mut ctx).unwrap());
        assert!(forces(&c, 1, &parse("z = z").unwrap(), &mut ctx).unwrap());

        let other = crate::algebra::BooleanAlgebra::new(3).unwrap();
        let wrong = load_names("name z { }", &other).unwrap();
        let mut ctx = ValuationContext::new(&wrong);
        assert!(matches!(forces(&c, 0, &zin, &mut ctx), Err(ForcingError::MismatchedAlgebra { .. })));
    }
}
