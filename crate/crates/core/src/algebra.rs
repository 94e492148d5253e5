//! Finite complete Boolean algebras.
//!
//! Every finite Boolean algebra is isomorphic to the powerset of its atoms, so
//! an algebra here is just an atom count and an element is a bitmask over the
//! atoms. Joins and meets over arbitrary (finite) families always exist.

use std::fmt;
use std::ops::{BitAnd, BitOr, Not};

use thiserror::Error;

/// Largest supported atom count when none is configured.
pub const DEFAULT_MAX_ATOMS: usize = 20;

/// Hard limit imposed by the `u32` element representation.
pub const MAX_ATOMS_LIMIT: usize = 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("atom count {count} out of range 1..={max}")]
    AtomCountOutOfRange { count: usize, max: usize },
    #[error("elements from different algebras ({left} atoms vs {right} atoms)")]
    MixedParents { left: usize, right: usize },
    #[error("atom label list has {got} entries, expected {expected}")]
    LabelCount { expected: usize, got: usize },
    #[error("invalid atom label {0:?}")]
    InvalidLabel(String),
    #[error("element syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown atom {0:?}")]
    UnknownAtom(String),
}

/// The powerset algebra of `atom_count` atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BooleanAlgebra {
    atom_count: usize,
    atom_labels: Vec<String>,
}

/// An element of a [`BooleanAlgebra`]: a set of atom indices.
///
/// The parent algebra is identified by its atom count; two canonical
/// algebras with the same number of atoms are the same algebra.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    bits: u32,
    atoms: u8,
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({:#b}/{})", self.bits, self.atoms)
    }
}

fn full_mask(atoms: usize) -> u32 {
    if atoms >= 32 {
        u32::MAX
    } else {
        (1u32 << atoms) - 1
    }
}

impl Element {
    /// Number of atoms of the parent algebra.
    pub fn atom_count(self) -> usize {
        self.atoms as usize
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    pub fn is_one(self) -> bool {
        self.bits == full_mask(self.atoms as usize)
    }

    pub fn contains_atom(self, atom: usize) -> bool {
        atom < self.atoms as usize && self.bits & (1 << atom) != 0
    }

    /// Atom indices in increasing order.
    pub fn atoms(self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..self.atoms as usize).filter(move |i| bits & (1 << i) != 0)
    }

    fn check_same(self, other: Element) -> Result<(), AlgebraError> {
        if self.atoms == other.atoms {
            Ok(())
        } else {
            Err(AlgebraError::MixedParents {
                left: self.atoms as usize,
                right: other.atoms as usize,
            })
        }
    }

    pub fn try_meet(self, other: Element) -> Result<Element, AlgebraError> {
        self.check_same(other)?;
        Ok(Element { bits: self.bits & other.bits, atoms: self.atoms })
    }

    pub fn try_join(self, other: Element) -> Result<Element, AlgebraError> {
        self.check_same(other)?;
        Ok(Element { bits: self.bits | other.bits, atoms: self.atoms })
    }

    pub fn complement(self) -> Element {
        Element { bits: !self.bits & full_mask(self.atoms as usize), atoms: self.atoms }
    }

    /// `x => y`, i.e. `x* | y`.
    pub fn try_implies(self, other: Element) -> Result<Element, AlgebraError> {
        self.complement().try_join(other)
    }

    /// `x <= y` iff `x & y = x`.
    pub fn try_leq(self, other: Element) -> Result<bool, AlgebraError> {
        Ok(self.try_meet(other)? == self)
    }

    /// Panicking variant of [`Element::try_implies`] for use where both
    /// operands are known to come from the same algebra.
    pub fn implies(self, other: Element) -> Element {
        self.try_implies(other).expect("implies: mixed algebras")
    }

    pub fn leq(self, other: Element) -> bool {
        self.try_leq(other).expect("leq: mixed algebras")
    }
}

impl BitAnd for Element {
    type Output = Element;
    fn bitand(self, rhs: Element) -> Element {
        self.try_meet(rhs).expect("meet: mixed algebras")
    }
}

impl BitOr for Element {
    type Output = Element;
    fn bitor(self, rhs: Element) -> Element {
        self.try_join(rhs).expect("join: mixed algebras")
    }
}

impl Not for Element {
    type Output = Element;
    fn not(self) -> Element {
        self.complement()
    }
}

impl BooleanAlgebra {
    /// The algebra with `atom_count` atoms, using the default cap.
    pub fn new(atom_count: usize) -> Result<Self, AlgebraError> {
        Self::with_cap(atom_count, DEFAULT_MAX_ATOMS)
    }

    pub fn with_cap(atom_count: usize, max_atoms: usize) -> Result<Self, AlgebraError> {
        let max = max_atoms.min(MAX_ATOMS_LIMIT);
        if atom_count == 0 || atom_count > max {
            return Err(AlgebraError::AtomCountOutOfRange { count: atom_count, max });
        }
        let atom_labels = (0..atom_count).map(|i| format!("a{i}")).collect();
        Ok(BooleanAlgebra { atom_count, atom_labels })
    }

    /// Same algebra with custom display labels for the atoms.
    ///
    /// Labels must be identifiers (letters, digits, `_`) starting with a
    /// letter, must be pairwise distinct and must not be `0` or `1`.
    pub fn with_labels(atom_labels: Vec<String>) -> Result<Self, AlgebraError> {
        let mut alg = Self::new(atom_labels.len())?;
        for (i, l) in atom_labels.iter().enumerate() {
            let ok = l.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && l.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok || atom_labels[..i].contains(l) {
                return Err(AlgebraError::InvalidLabel(l.clone()));
            }
        }
        alg.atom_labels = atom_labels;
        Ok(alg)
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn atom_labels(&self) -> &[String] {
        &self.atom_labels
    }

    /// Number of elements, `2^atom_count`.
    pub fn size(&self) -> u64 {
        1u64 << self.atom_count
    }

    pub fn zero(&self) -> Element {
        Element { bits: 0, atoms: self.atom_count as u8 }
    }

    pub fn one(&self) -> Element {
        Element { bits: full_mask(self.atom_count), atoms: self.atom_count as u8 }
    }

    pub fn atom(&self, index: usize) -> Option<Element> {
        (index < self.atom_count).then(|| Element { bits: 1 << index, atoms: self.atom_count as u8 })
    }

    /// Element with exactly the given atoms; out-of-range indices yield `None`.
    pub fn element_from_atoms<I: IntoIterator<Item = usize>>(&self, atoms: I) -> Option<Element> {
        let mut bits = 0u32;
        for a in atoms {
            if a >= self.atom_count {
                return None;
            }
            bits |= 1 << a;
        }
        Some(Element { bits, atoms: self.atom_count as u8 })
    }

    /// Element from a raw bitmask; bits above the atom count are rejected.
    pub fn element_from_bits(&self, bits: u32) -> Option<Element> {
        (bits & !full_mask(self.atom_count) == 0).then_some(Element { bits, atoms: self.atom_count as u8 })
    }

    pub fn contains(&self, x: Element) -> bool {
        x.atoms as usize == self.atom_count
    }

    fn own(&self, x: Element) -> Result<(), AlgebraError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(AlgebraError::MixedParents { left: self.atom_count, right: x.atom_count() })
        }
    }

    pub fn meet(&self, x: Element, y: Element) -> Result<Element, AlgebraError> {
        self.own(x)?;
        x.try_meet(y)
    }

    pub fn join(&self, x: Element, y: Element) -> Result<Element, AlgebraError> {
        self.own(x)?;
        x.try_join(y)
    }

    pub fn complement(&self, x: Element) -> Result<Element, AlgebraError> {
        self.own(x)?;
        Ok(x.complement())
    }

    pub fn implies(&self, x: Element, y: Element) -> Result<Element, AlgebraError> {
        self.own(x)?;
        x.try_implies(y)
    }

    pub fn leq(&self, x: Element, y: Element) -> Result<bool, AlgebraError> {
        self.own(x)?;
        x.try_leq(y)
    }

    /// Least upper bound of a finite family; the empty join is `0`.
    pub fn big_join<I: IntoIterator<Item = Element>>(&self, xs: I) -> Result<Element, AlgebraError> {
        xs.into_iter().try_fold(self.zero(), |acc, x| acc.try_join(x))
    }

    /// Greatest lower bound of a finite family; the empty meet is `1`.
    pub fn big_meet<I: IntoIterator<Item = Element>>(&self, xs: I) -> Result<Element, AlgebraError> {
        xs.into_iter().try_fold(self.one(), |acc, x| acc.try_meet(x))
    }

    /// All `2^atom_count` elements in bitmask order.
    pub fn elements(&self) -> impl Iterator<Item = Element> {
        let atoms = self.atom_count as u8;
        (0..=full_mask(self.atom_count)).map(move |bits| Element { bits, atoms })
    }

    /// The principal ultrafilters, one per atom. Finite algebras have no others.
    pub fn ultrafilters(&self) -> Vec<Ultrafilter> {
        (0..self.atom_count)
            .map(|generator_atom| Ultrafilter { atom_count: self.atom_count, generator_atom })
            .collect()
    }

    /// Canonical text: `1` for the top, otherwise the sorted atom set in braces.
    pub fn format(&self, x: Element) -> String {
        if x.is_one() {
            return "1".to_string();
        }
        let labels: Vec<&str> = x.atoms().map(|i| self.atom_labels[i].as_str()).collect();
        format!("{{{}}}", labels.join(","))
    }

    fn atom_index(&self, label: &str) -> Option<usize> {
        if let Some(i) = self.atom_labels.iter().position(|l| l == label) {
            return Some(i);
        }
        label
            .strip_prefix('a')
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&i| i < self.atom_count && !label[1..].starts_with('+'))
    }

    /// Parses an element expression: `0`, `1`, atom labels (or `aK`),
    /// brace sets `{a0,a2}`, `~`, `&`, `|`, `=>` and parentheses.
    /// Precedence is `~` > `&` > `|` > `=>`, with `=>` right-associative.
    pub fn parse_element(&self, text: &str) -> Result<Element, AlgebraError> {
        let mut p = ElementParser { alg: self, src: text.as_bytes(), pos: 0 };
        let x = p.implication()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(x)
    }
}

struct ElementParser<'a> {
    alg: &'a BooleanAlgebra,
    src: &'a [u8],
    pos: usize,
}

impl ElementParser<'_> {
    fn error(&self, message: &str) -> AlgebraError {
        AlgebraError::Syntax { column: self.pos + 1, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Result<Element, AlgebraError> {
        let lhs = self.join()?;
        if self.eat("=>") {
            let rhs = self.implication()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn join(&mut self) -> Result<Element, AlgebraError> {
        let mut acc = self.meet()?;
        while self.eat("|") {
            acc = acc | self.meet()?;
        }
        Ok(acc)
    }

    fn meet(&mut self) -> Result<Element, AlgebraError> {
        let mut acc = self.unary()?;
        while self.eat("&") {
            acc = acc & self.unary()?;
        }
        Ok(acc)
    }

    fn ident(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn unary(&mut self) -> Result<Element, AlgebraError> {
        if self.eat("~") {
            return Ok(!self.unary()?);
        }
        if self.eat("(") {
            let x = self.implication()?;
            if !self.eat(")") {
                return Err(self.error("expected ')'"));
            }
            return Ok(x);
        }
        if self.eat("{") {
            let mut x = self.alg.zero();
            if self.eat("}") {
                return Ok(x);
            }
            loop {
                self.skip_ws();
                let label = self.ident().to_string();
                let i = self.alg.atom_index(&label).ok_or(AlgebraError::UnknownAtom(label))?;
                x = x | self.alg.atom(i).expect("index checked");
                if self.eat("}") {
                    return Ok(x);
                }
                if !self.eat(",") {
                    return Err(self.error("expected ',' or '}'"));
                }
            }
        }
        self.skip_ws();
        let start = self.pos;
        let word = self.ident().to_string();
        match word.as_str() {
            "" => {
                self.pos = start;
                Err(self.error("expected an element"))
            }
            "0" => Ok(self.alg.zero()),
            "1" => Ok(self.alg.one()),
            w => {
                let i = self.alg.atom_index(w).ok_or_else(|| AlgebraError::UnknownAtom(w.to_string()))?;
                Ok(self.alg.atom(i).expect("index checked"))
            }
        }
    }
}

/// A principal ultrafilter: the elements containing `generator_atom`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ultrafilter {
    atom_count: usize,
    generator_atom: usize,
}

impl Ultrafilter {
    /// The ultrafilter generated by atom `generator_atom`, if that atom exists.
    pub fn principal(algebra: &BooleanAlgebra, generator_atom: usize) -> Option<Ultrafilter> {
        (generator_atom < algebra.atom_count()).then_some(Ultrafilter {
            atom_count: algebra.atom_count(),
            generator_atom,
        })
    }

    pub fn generator_atom(&self) -> usize {
        self.generator_atom
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn contains(&self, x: Element) -> bool {
        x.atom_count() == self.atom_count && x.contains_atom(self.generator_atom)
    }

    /// Checks the five ultrafilter properties directly against the
    /// membership predicate, over every element (or pair) of the algebra.
    /// Returns the first violated property number.
    pub fn check_properties(&self, algebra: &BooleanAlgebra) -> Result<(), usize> {
        if !self.contains(algebra.one()) {
            return Err(1);
        }
        if self.contains(algebra.zero()) {
            return Err(2);
        }
        for x in algebra.elements() {
            for y in algebra.elements() {
                if self.contains(x) && self.contains(y) && !self.contains(x & y) {
                    return Err(3);
                }
                if self.contains(x) && x.leq(y) && !self.contains(y) {
                    return Err(4);
                }
            }
            if !(self.contains(x) || self.contains(!x)) {
                return Err(5);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: usize) -> BooleanAlgebra {
        BooleanAlgebra::new(n).unwrap()
    }

    #[test]
    fn construction_bounds() {
        assert_eq!(b(1).elements().count(), 2);
        assert_eq!(b(2).size(), 4);
        assert!(BooleanAlgebra::new(20).is_ok());
        assert_eq!(
            BooleanAlgebra::new(21),
            Err(AlgebraError::AtomCountOutOfRange { count: 21, max: 20 })
        );
        assert!(BooleanAlgebra::new(0).is_err());
        assert!(BooleanAlgebra::with_cap(24, 24).is_ok());
    }

    #[test]
    fn two_atom_examples() {
        let alg = b(2);
        let e = |s: &str| alg.parse_element(s).unwrap();
        assert_eq!(alg.meet(e("{a0,a1}"), e("{a1}")).unwrap(), e("{a1}"));
        // a0 => 0 is a0* which is {a1}
        assert_eq!(alg.implies(e("a0"), e("0")).unwrap(), e("{a1}"));
        for x in alg.elements() {
            assert!(alg.join(x, !x).unwrap().is_one());
        }
    }

    #[test]
    fn big_operations() {
        let alg = b(2);
        assert!(alg.big_join(std::iter::empty()).unwrap().is_zero());
        assert!(alg.big_meet(std::iter::empty()).unwrap().is_one());
        let j = alg.big_join([alg.atom(0).unwrap(), alg.atom(1).unwrap()]).unwrap();
        assert!(j.is_one());
        assert_eq!(alg.format(j), "1");
    }

    #[test]
    fn mixed_parents_rejected() {
        let (a, c) = (b(2), b(3));
        assert!(matches!(a.meet(a.one(), c.one()), Err(AlgebraError::MixedParents { .. })));
        assert!(a.complement(c.one()).is_err());
        assert!(a.big_join([a.one(), c.zero()]).is_err());
    }

    #[test]
    fn printing_and_parsing() {
        let alg = b(3);
        let x = alg.element_from_atoms([0, 2]).unwrap();
        assert_eq!(alg.format(x), "{a0,a2}");
        assert_eq!(alg.format(alg.zero()), "{}");
        assert_eq!(alg.format(alg.one()), "1");
        assert_eq!(alg.parse_element("{a0,a2}").unwrap(), x);
        assert_eq!(alg.parse_element("~a1").unwrap(), x);
        assert_eq!(alg.parse_element("a0 | a2 & a1").unwrap(), alg.atom(0).unwrap());
        assert_eq!(alg.parse_element("(a0 | a2) & a1").unwrap(), alg.zero());
        // right associative: a0 => (a1 => a2)
        let r = alg.parse_element("a0 => a1 => a2").unwrap();
        let expect = alg.atom(0).unwrap().implies(alg.atom(1).unwrap().implies(alg.atom(2).unwrap()));
        assert_eq!(r, expect);
        assert!(alg.parse_element("a3").is_err());
        assert!(alg.parse_element("a0 &").is_err());
        assert!(alg.parse_element("(a0").is_err());
    }

    #[test]
    fn custom_labels() {
        let alg = BooleanAlgebra::with_labels(vec!["p".into(), "q".into()]).unwrap();
        assert_eq!(alg.format(alg.atom(1).unwrap()), "{q}");
        assert_eq!(alg.parse_element("~p").unwrap(), alg.atom(1).unwrap());
        assert_eq!(alg.parse_element("a0").unwrap(), alg.atom(0).unwrap());
        assert!(BooleanAlgebra::with_labels(vec!["p".into(), "p".into()]).is_err());
    }

    #[test]
    fn ultrafilter_counts_and_properties() {
        let one = b(1).ultrafilters();
        assert_eq!(one.len(), 1);
        assert!(one[0].contains(b(1).one()) && !one[0].contains(b(1).zero()));
        let alg = b(3);
        let ufs = alg.ultrafilters();
        assert_eq!(ufs.len(), 3);
        for u in &ufs {
            assert_eq!(u.check_properties(&alg), Ok(()));
            for x in alg.elements() {
                assert!(u.contains(x) ^ u.contains(!x));
            }
        }
    }

    #[test]
    fn lattice_laws_exhaustive() {
        for n in 1..=4 {
            let alg = b(n);
            for x in alg.elements() {
                assert_eq!(!!x, x);
                for y in alg.elements() {
                    assert_eq!(!(x & y), !x | !y);
                    assert_eq!(!(x | y), !x & !y);
                    assert_eq!(x & (x | y), x);
                    assert_eq!(x | (x & y), x);
                    assert_eq!(x.leq(y), (x | y) == y);
                    for z in alg.elements() {
                        assert_eq!(x | (y & z), (x | y) & (x | z));
                        assert_eq!(x & (y | z), (x & y) | (x & z));
                    }
                }
            }
        }
    }
}
