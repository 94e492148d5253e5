//! B-valued sets ("names") and finite universes of them.
//!
//! A name maps finitely many earlier names to algebra elements. Names live
//! in a [`NameUniverse`], which is child-closed and topologically ordered,
//! so every name only refers to names declared before it. Equality of names
//! as objects is identity in the universe; equality of the sets they denote
//! is the Boolean value `[[x = y]]` computed by the valuation module.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{AlgebraError, BooleanAlgebra, Element};
use crate::valuation::{ValuationContext, ValuationError};

/// Default bound on the number of names [`universe_up_to_rank`] may create.
pub const DEFAULT_UNIVERSE_CAP: usize = 100_000;

/// Default bound on `|B|^|dom(x)|` for [`NameUniverse::powerset_name`].
pub const DEFAULT_POWERSET_CAP: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("duplicate name id {0:?}")]
    DuplicateId(String),
    #[error("invalid name id {0:?}")]
    InvalidId(String),
    #[error("name {name:?} lists child {child:?} twice")]
    DuplicateChild { name: String, child: String },
    #[error("{what} would need {needed} names, cap is {cap}")]
    CapExceeded { what: &'static str, needed: String, cap: u64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("invalid HF set syntax: {0}")]
    HfSyntax(String),
    #[error(transparent)]
    Valuation(Box<ValuationError>),
}

impl From<ValuationError> for NameError {
    fn from(e: ValuationError) -> Self {
        NameError::Valuation(Box::new(e))
    }
}

/// Index of a name within its universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NameId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Name {
    id: String,
    /// Sorted by child index, children distinct.
    entries: Vec<(NameId, Element)>,
    rank: usize,
}

impl Name {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn entries(&self) -> &[(NameId, Element)] {
        &self.entries
    }

    /// The children of this name (its domain).
    pub fn domain(&self) -> impl Iterator<Item = NameId> + '_ {
        self.entries.iter().map(|&(c, _)| c)
    }

    /// `x(w)`, or `None` if `w` is not in the domain.
    pub fn value(&self, child: NameId) -> Option<Element> {
        self.entries.binary_search_by(|(c, _)| c.cmp(&child)).ok().map(|i| self.entries[i].1)
    }

    /// Depth in the child DAG; the empty name has rank 0.
    pub fn rank(&self) -> usize {
        self.rank
    }
}

pub(crate) fn valid_name_id(id: &str) -> bool {
    let mut chars = id.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !crate::lang::parser_is_keyword(id)
}

/// A finite, child-closed fragment of the Boolean-valued universe.
#[derive(Debug, Clone)]
pub struct NameUniverse {
    algebra: BooleanAlgebra,
    names: Vec<Name>,
    index: HashMap<String, NameId>,
    structural: HashMap<Vec<(NameId, Element)>, NameId>,
}

impl NameUniverse {
    pub fn new(algebra: BooleanAlgebra) -> Self {
        NameUniverse { algebra, names: Vec::new(), index: HashMap::new(), structural: HashMap::new() }
    }

    pub fn algebra(&self) -> &BooleanAlgebra {
        &self.algebra
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: NameId) -> &Name {
        &self.names[id.0]
    }

    pub fn names(&self) -> &[Name] {
        &self.names
    }

    pub fn ids(&self) -> impl Iterator<Item = NameId> {
        (0..self.names.len()).map(NameId)
    }

    pub fn lookup(&self, id: &str) -> Result<NameId, NameError> {
        self.index.get(id).copied().ok_or_else(|| NameError::UnknownName(id.to_string()))
    }

    pub fn label(&self, id: NameId) -> &str {
        &self.names[id.0].id
    }

    /// Adds a name with explicit id. Children must already be present and
    /// values must belong to the universe's algebra.
    pub fn add_name(&mut self, id: &str, entries: Vec<(NameId, Element)>) -> Result<NameId, NameError> {
        if !valid_name_id(id) {
            return Err(NameError::InvalidId(id.to_string()));
        }
        if self.index.contains_key(id) {
            return Err(NameError::DuplicateId(id.to_string()));
        }
        let mut entries = entries;
        for &(child, value) in &entries {
            if child.0 >= self.names.len() {
                return Err(NameError::UnknownName(format!("#{}", child.0)));
            }
            if !self.algebra.contains(value) {
                return Err(AlgebraError::MixedParents {
                    left: self.algebra.atom_count(),
                    right: value.atom_count(),
                }
                .into());
            }
        }
        entries.sort_by_key(|&(c, _)| c);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(NameError::DuplicateChild {
                name: id.to_string(),
                child: self.label(w[0].0).to_string(),
            });
        }
        let rank = entries.iter().map(|&(c, _)| self.names[c.0].rank + 1).max().unwrap_or(0);
        let nid = NameId(self.names.len());
        self.structural.entry(entries.clone()).or_insert(nid);
        self.index.insert(id.to_string(), nid);
        self.names.push(Name { id: id.to_string(), entries, rank });
        Ok(nid)
    }

    /// The earliest name with exactly these entries, if any.
    pub fn find_structural(&self, entries: &[(NameId, Element)]) -> Option<NameId> {
        let mut sorted = entries.to_vec();
        sorted.sort_by_key(|&(c, _)| c);
        self.structural.get(&sorted).copied()
    }

    /// Returns the existing name with these entries, or adds one under a
    /// generated id (`prefix` followed by a number).
    pub fn intern(&mut self, entries: Vec<(NameId, Element)>, prefix: &str) -> Result<NameId, NameError> {
        if let Some(id) = self.find_structural(&entries) {
            return Ok(id);
        }
        let id = self.fresh_id(prefix);
        self.add_name(&id, entries)
    }

    fn fresh_id(&self, prefix: &str) -> String {
        let mut k = self.names.len();
        loop {
            let candidate = format!("{prefix}{k}");
            if !self.index.contains_key(&candidate) {
                return candidate;
            }
            k += 1;
        }
    }

    /// The check-name of an HF set: every member's check-name with value 1.
    /// Existing structurally equal names are reused.
    pub fn check_name(&mut self, set: &HfSet) -> Result<NameId, NameError> {
        let mut entries = Vec::with_capacity(set.len());
        for member in set.elements() {
            entries.push((self.check_name(member)?, self.algebra.one()));
        }
        if let Some(id) = self.find_structural(&entries) {
            return Ok(id);
        }
        let id = match set.ackermann_code() {
            Some(code) if !self.index.contains_key(&format!("h{code}")) => format!("h{code}"),
            _ => self.fresh_id("h_"),
        };
        self.add_name(&id, entries)
    }

    /// Universe of the check-names of the given HF sets (and their members).
    pub fn of_check_names<'a, I>(algebra: BooleanAlgebra, sets: I) -> Result<(Self, Vec<NameId>), NameError>
    where
        I: IntoIterator<Item = &'a HfSet>,
    {
        let mut u = NameUniverse::new(algebra);
        let ids = sets.into_iter().map(|s| u.check_name(s)).collect::<Result<Vec<_>, _>>()?;
        Ok((u, ids))
    }

    /// The powerset name of `x`: one fresh potential member per function
    /// `w : dom(x) -> B`, with value `[[w sub x]]`.
    pub fn powerset_name(&self, x: NameId) -> Result<(NameUniverse, NameId), NameError> {
        self.powerset_name_with_cap(x, DEFAULT_POWERSET_CAP)
    }

    pub fn powerset_name_with_cap(&self, x: NameId, cap: u64) -> Result<(NameUniverse, NameId), NameError> {
        let dom: Vec<NameId> = self.name(x).domain().collect();
        let size = self.algebra.size();
        let count = (0..dom.len()).try_fold(1u64, |acc, _| acc.checked_mul(size).filter(|&c| c <= cap));
        let count = count.ok_or_else(|| NameError::CapExceeded {
            what: "powerset name",
            needed: format!("{size}^{}", dom.len()),
            cap,
        })?;
        let mut out = self.clone();
        let base = out.label(x).to_string();
        let mut members = Vec::with_capacity(count as usize);
        for k in 0..count {
            // digit j of k in base |B| is the element assigned to dom[j]
            let mut rest = k;
            let entries: Vec<(NameId, Element)> = dom
                .iter()
                .map(|&child| {
                    let bits = (rest % size) as u32;
                    rest /= size;
                    (child, out.algebra.element_from_bits(bits).expect("bits below 2^atoms"))
                })
                .collect();
            let id = out.fresh_id(&format!("{base}_w"));
            members.push(out.add_name(&id, entries)?);
        }
        let mut ctx = ValuationContext::new(&out);
        let mut entries = Vec::with_capacity(members.len());
        for &w in &members {
            entries.push((w, ctx.val_subset(w, x)?));
        }
        drop(ctx);
        let id = out.fresh_id(&format!("{base}_pow"));
        let y = out.add_name(&id, entries)?;
        Ok((out, y))
    }

    /// Text in the names file format, one name per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.names {
            out.push_str(&self.format_name(n));
            out.push('\n');
        }
        out
    }

    pub fn format_name(&self, n: &Name) -> String {
        let body: Vec<String> = n
            .entries
            .iter()
            .map(|&(c, v)| format!("{} : {}", self.label(c), self.algebra.format(v)))
            .collect();
        if body.is_empty() {
            format!("name {} {{ }}", n.id)
        } else {
            format!("name {} {{ {} }}", n.id, body.join(", "))
        }
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// Parses a names file: `name <id> { <child> : <element-expr>, ... }` per
/// line, `#` comments, children declared earlier.
pub fn load_names(text: &str, algebra: &BooleanAlgebra) -> Result<NameUniverse, NameError> {
    let mut u = NameUniverse::new(algebra.clone());
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| NameError::Parse { line, message };
        let rest = content
            .strip_prefix("name")
            .filter(|r| r.starts_with(char::is_whitespace))
            .ok_or_else(|| err("expected `name <id> { ... }`".into()))?;
        let open = rest.find('{').ok_or_else(|| err("expected '{'".into()))?;
        let id = rest[..open].trim();
        let body = rest[open + 1..].trim_end();
        let body = body.strip_suffix('}').ok_or_else(|| err("expected '}' at end of line".into()))?;
        let mut entries = Vec::new();
        if !body.trim().is_empty() {
            for part in split_top_level(body) {
                let (child, expr) = part.split_once(':').ok_or_else(|| err(format!("expected `child : value` in {part:?}")))?;
                let child = u.lookup(child.trim())?;
                let value = algebra.parse_element(expr.trim()).map_err(|e| err(e.to_string()))?;
                entries.push((child, value));
            }
        }
        u.add_name(id, entries).map_err(|e| match e {
            NameError::UnknownName(_) | NameError::Algebra(_) => e,
            other => err(other.to_string()),
        })?;
    }
    Ok(u)
}

/// Every name of rank at most `k`: rank 0 is the empty name, and rank `j`
/// adds every name whose domain is a subset of the rank-`j-1` universe, with
/// arbitrary values (0 included).
pub fn universe_up_to_rank(algebra: &BooleanAlgebra, k: usize) -> Result<NameUniverse, NameError> {
    universe_up_to_rank_with_cap(algebra, k, DEFAULT_UNIVERSE_CAP)
}

pub fn universe_up_to_rank_with_cap(algebra: &BooleanAlgebra, k: usize, cap: usize) -> Result<NameUniverse, NameError> {
    let mut u = NameUniverse::new(algebra.clone());
    u.add_name("n0", Vec::new())?;
    let choices = algebra.size() + 1; // absent or one of the elements
    for _ in 0..k {
        let previous: Vec<NameId> = u.ids().collect();
        let count = (0..previous.len()).try_fold(1u64, |acc, _| acc.checked_mul(choices).filter(|&c| c <= cap as u64));
        let count = count.ok_or_else(|| NameError::CapExceeded {
            what: "rank universe",
            needed: format!("{choices}^{}", previous.len()),
            cap: cap as u64,
        })?;
        for code in 0..count {
            let mut rest = code;
            let mut entries = Vec::new();
            for &child in &previous {
                let digit = rest % choices;
                rest /= choices;
                if digit > 0 {
                    let bits = (digit - 1) as u32;
                    entries.push((child, algebra.element_from_bits(bits).expect("bits below 2^atoms")));
                }
            }
            u.intern(entries, "n")?;
        }
    }
    Ok(u)
}

/// The full rank-1 universe plus `extra` random names of rank at most
/// `max_rank`, built from names already present.
pub fn random_universe(algebra: &BooleanAlgebra, extra: usize, max_rank: usize, seed: u64) -> Result<NameUniverse, NameError> {
    let mut u = universe_up_to_rank(algebra, 1.min(max_rank))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    let target = u.len() + extra;
    while u.len() < target && attempts < 100 * (extra + 1) {
        attempts += 1;
        let pool: Vec<NameId> = u.ids().filter(|&i| u.name(i).rank() < max_rank).collect();
        let mut entries = Vec::new();
        for &child in &pool {
            if rng.random_bool(0.5) {
                let bits = rng.random_range(0..algebra.size()) as u32;
                entries.push((child, algebra.element_from_bits(bits).expect("in range")));
            }
        }
        u.intern(entries, "r")?;
    }
    Ok(u)
}

/// A hereditarily finite set in canonical form: members sorted and distinct.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct HfSet(Vec<HfSet>);

impl Ord for HfSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank()).then_with(|| self.0.len().cmp(&other.0.len())).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for HfSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl HfSet {
    pub fn empty() -> Self {
        HfSet(Vec::new())
    }

    /// The set of the given members, deduplicated.
    pub fn from_members<I: IntoIterator<Item = HfSet>>(members: I) -> Self {
        let mut v: Vec<HfSet> = members.into_iter().collect();
        v.sort();
        v.dedup();
        HfSet(v)
    }

    /// The von Neumann ordinal `n`.
    pub fn ordinal(n: usize) -> Self {
        let mut members = Vec::new();
        for _ in 0..n {
            let next = HfSet::from_members(members.clone());
            members.push(next);
        }
        HfSet::from_members(members)
    }

    pub fn elements(&self) -> &[HfSet] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: &HfSet) -> bool {
        self.0.binary_search(x).is_ok()
    }

    /// Von Neumann rank: `rank(x) = sup { rank(y) + 1 : y in x }`.
    pub fn rank(&self) -> usize {
        self.0.iter().map(|m| m.rank() + 1).max().unwrap_or(0)
    }

    /// Ackermann code `sum of 2^code(y)` for `y in x`, when it fits in a `u64`.
    pub fn ackermann_code(&self) -> Option<u64> {
        self.0.iter().try_fold(0u64, |acc, m| {
            let c = m.ackermann_code()?;
            (c < 64).then(|| acc | (1u64 << c))
        })
    }

    /// All HF sets of rank at most `k`, i.e. the members of `V_(k+1)`.
    /// Sizes grow as a tower of twos; `k <= 3` is practical.
    pub fn all_up_to_rank(k: usize) -> Vec<HfSet> {
        let mut level = vec![HfSet::empty()];
        for _ in 0..k {
            let n = level.len();
            assert!(n < 20, "rank too large to enumerate");
            level = (0..1u64 << n)
                .map(|mask| HfSet::from_members((0..n).filter(|i| mask >> i & 1 == 1).map(|i| level[i].clone())))
                .collect();
            level.sort();
        }
        level
    }
}

impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for HfSet {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, NameError> {
        fn parse(bytes: &[u8], pos: &mut usize) -> Result<HfSet, NameError> {
            let skip = |pos: &mut usize| {
                while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                    *pos += 1;
                }
            };
            skip(pos);
            if bytes.get(*pos) != Some(&b'{') {
                return Err(NameError::HfSyntax(format!("expected '{{' at offset {}", *pos)));
            }
            *pos += 1;
            let mut members = Vec::new();
            skip(pos);
            if bytes.get(*pos) == Some(&b'}') {
                *pos += 1;
                return Ok(HfSet::empty());
            }
            loop {
                members.push(parse(bytes, pos)?);
                skip(pos);
                match bytes.get(*pos) {
                    Some(b',') => *pos += 1,
                    Some(b'}') => {
                        *pos += 1;
                        return Ok(HfSet::from_members(members));
                    }
                    _ => return Err(NameError::HfSyntax(format!("expected ',' or '}}' at offset {}", *pos))),
                }
            }
        }
        let mut pos = 0;
        let set = parse(s.as_bytes(), &mut pos)?;
        if s[pos..].trim().is_empty() {
            Ok(set)
        } else {
            Err(NameError::HfSyntax(format!("trailing input at offset {pos}")))
        }
    }
}
