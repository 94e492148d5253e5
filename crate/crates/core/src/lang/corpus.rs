//! Seeded random formula generation for law checks and oracle comparison.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Formula, Term};

const VAR_POOL: [&str; 8] = ["x", "y", "w", "v", "s", "t", "x1", "y1"];

/// Generates sentences over a fixed set of constant names.
pub struct SentenceGenerator {
    constants: Vec<String>,
    vars: Vec<String>,
    rng: ChaCha8Rng,
}

impl SentenceGenerator {
    pub fn new(constants: &[String], seed: u64) -> Self {
        let vars = VAR_POOL
            .iter()
            .map(|s| s.to_string())
            .filter(|v| !constants.contains(v))
            .collect();
        SentenceGenerator { constants: constants.to_vec(), vars, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// A random sentence of depth at most `max_depth` (at least 1).
    pub fn sentence(&mut self, max_depth: usize) -> Formula {
        self.formula(max_depth.max(1), &mut Vec::new())
    }

    /// A random formula whose free variables are among `free`.
    pub fn open_formula(&mut self, max_depth: usize, free: &[String]) -> Formula {
        let mut scope = free.to_vec();
        self.formula(max_depth.max(1), &mut scope)
    }

    fn term(&mut self, scope: &[String]) -> Term {
        let n_const = self.constants.len();
        let total = n_const + scope.len();
        assert!(total > 0, "no constants and no variables in scope");
        let i = self.rng.random_range(0..total);
        if i < n_const {
            Term::Const(self.constants[i].clone())
        } else {
            Term::Var(scope[i - n_const].clone())
        }
    }

    fn atom(&mut self, scope: &[String]) -> Formula {
        let (a, b) = (self.term(scope), self.term(scope));
        match self.rng.random_range(0..5) {
            0 | 1 => Formula::Mem(a, b),
            2 | 3 => Formula::Eq(a, b),
            _ => Formula::Sub(a, b),
        }
    }

    fn fresh_var(&mut self, scope: &[String]) -> Option<String> {
        let free: Vec<&String> = self.vars.iter().filter(|v| !scope.contains(v)).collect();
        free.choose(&mut self.rng).map(|v| v.to_string())
    }

    fn formula(&mut self, depth: usize, scope: &mut Vec<String>) -> Formula {
        if depth == 1 || self.rng.random_bool(0.2) {
            if self.constants.is_empty() && scope.is_empty() {
                // only quantified atoms are possible
                let v = self.fresh_var(scope).expect("variable pool");
                let t = Term::Var(v.clone());
                return Formula::exists(&v, Formula::Eq(t.clone(), t));
            }
            return self.atom(scope);
        }
        let d = depth - 1;
        match self.rng.random_range(0..10) {
            0 | 1 => Formula::not(self.formula(d, scope)),
            2 => Formula::and(self.formula(d, scope), self.formula(d, scope)),
            3 => Formula::or(self.formula(d, scope), self.formula(d, scope)),
            4 => Formula::implies(self.formula(d, scope), self.formula(d, scope)),
            5 => Formula::iff(self.formula(d, scope), self.formula(d, scope)),
            k => {
                let Some(v) = self.fresh_var(scope) else {
                    return self.atom(scope);
                };
                let bound = (k >= 8 && (!self.constants.is_empty() || !scope.is_empty())).then(|| self.term(scope));
                scope.push(v.clone());
                let body = Box::new(self.formula(d, scope));
                scope.pop();
                match (k % 2 == 0, bound) {
                    (true, None) => Formula::Exists(v, body),
                    (false, None) => Formula::Forall(v, body),
                    (true, Some(t)) => Formula::BoundedExists(v, t, body),
                    (false, Some(t)) => Formula::BoundedForall(v, t, body),
                }
            }
        }
    }
}

/// `count` pairwise distinct sentences of depth at most `max_depth`.
///
/// Gives up (returning fewer) only when the space of sentences is too small
/// for the requested count.
pub fn sentence_corpus(constants: &[String], max_depth: usize, count: usize, seed: u64) -> Vec<Formula> {
    let mut generator = SentenceGenerator::new(constants, seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    let mut misses = 0usize;
    while out.len() < count && misses < 50 * count + 1000 {
        let f = generator.sentence(max_depth);
        if seen.insert(f.clone()) {
            out.push(f);
        } else {
            misses += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_distinct_closed_and_bounded() {
        let consts: Vec<String> = ["h0", "h1", "h2", "h3"].iter().map(|s| s.to_string()).collect();
        let corpus = sentence_corpus(&consts, 3, 2000, 7);
        assert_eq!(corpus.len(), 2000);
        let distinct: HashSet<_> = corpus.iter().collect();
        assert_eq!(distinct.len(), 2000);
        assert!(corpus.iter().all(|f| f.is_sentence() && f.depth() <= 3));
        assert!(corpus.iter().any(|f| matches!(f, Formula::Forall(..))));
        assert!(corpus.iter().any(|f| matches!(f, Formula::BoundedExists(..))));
    }

    #[test]
    fn deterministic_per_seed() {
        let consts = vec!["u".to_string()];
        assert_eq!(sentence_corpus(&consts, 3, 50, 1), sentence_corpus(&consts, 3, 50, 1));
        assert_ne!(sentence_corpus(&consts, 3, 50, 1), sentence_corpus(&consts, 3, 50, 2));
    }

    #[test]
    fn variables_avoid_constant_names() {
        let consts = vec!["x".to_string(), "y".to_string()];
        let mut g = SentenceGenerator::new(&consts, 3);
        for _ in 0..200 {
            let f = g.sentence(4);
            assert!(f.is_sentence());
        }
    }
}
