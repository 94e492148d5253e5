//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use forcing_lab::algebra::{BooleanAlgebra, Element};
use forcing_lab::forcing::{cohen_poset_finite, forces, hit_dense_sets_lazy, Condition, Density, LazyCohenPoset};
use forcing_lab::lang::corpus::sentence_corpus;
use forcing_lab::lang::{parse, Formula};
use forcing_lab::names::{random_universe, universe_up_to_rank, HfSet, NameId, NameUniverse};
use forcing_lab::oracle::{self, FiniteStructure};
use forcing_lab::order::{complete, Completion, Filter, Genericity, Poset, Subset};
use forcing_lab::quotient::build_quotient;
use forcing_lab::valuation::ValuationContext;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn labels(u: &NameUniverse) -> Vec<String> {
    u.ids().map(|x| u.label(x).to_string()).collect()
}

/// B = {0,1}, check-names of the four sets of rank at most 2.
fn classical_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let sets = HfSet::all_up_to_rank(2);
    let alg = BooleanAlgebra::new(1).map_err(err)?;
    let (universe, ids) = NameUniverse::of_check_names(alg, &sets).map_err(err)?;
    if universe.len() != 4 {
        return Err(format!("expected 4 check-names, got {}", universe.len()));
    }
    let labelled: Vec<(String, HfSet)> =
        ids.iter().zip(&sets).map(|(&x, s)| (universe.label(x).to_string(), s.clone())).collect();
    let structure = FiniteStructure::from_hf_sets(&labelled);
    let corpus = sentence_corpus(&labels(&universe), 3, 5000, 1);
    if corpus.len() < 5000 {
        return Err(format!("corpus has only {} sentences", corpus.len()));
    }
    let mut ctx = ValuationContext::new(&universe);
    let mut ones = 0;
    for f in &corpus {
        let value = ctx.val_sentence(f).map_err(err)?;
        let classical = oracle::tarski_eval(&structure, f, &[]).map_err(err)?;
        if value.is_one() != classical {
            return Err(format!("disagreement on {f}"));
        }
        ones += usize::from(classical);
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} sentences ({ones} true), {elapsed:.2?}", corpus.len()))
}

fn truth_lemma() -> Outcome {
    let mut checks = 0usize;
    for atoms in 1..=3 {
        let alg = BooleanAlgebra::new(atoms).map_err(err)?;
        let mut universes = vec![universe_up_to_rank(&alg, 1).map_err(err)?];
        for seed in 0..20 {
            universes.push(random_universe(&alg, 5, 2, 100 + seed).map_err(err)?);
        }
        for (k, universe) in universes.iter().enumerate() {
            let corpus = sentence_corpus(&labels(universe), 3, 1000, k as u64);
            if corpus.len() < 1000 {
                return Err(format!("corpus has only {} sentences", corpus.len()));
            }
            let mut ctx = ValuationContext::new(universe);
            let values: Vec<Element> = corpus.iter().map(|f| ctx.val_sentence(f)).collect::<Result<_, _>>().map_err(err)?;
            for uf in alg.ultrafilters() {
                let q = build_quotient(universe, &uf).map_err(err)?;
                for (f, v) in corpus.iter().zip(&values) {
                    if q.truth(f).map_err(err)? != uf.contains(*v) {
                        return Err(format!("{atoms} atoms, universe {k}, U(a{}): {f}", uf.generator_atom()));
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} (sentence, ultrafilter) pairs"))
}

fn equality_laws() -> Outcome {
    let mut triples = 0usize;
    for atoms in 1..=2 {
        let alg = BooleanAlgebra::new(atoms).map_err(err)?;
        let universe = universe_up_to_rank(&alg, 1).map_err(err)?;
        let n = universe.len();
        let mut ctx = ValuationContext::new(&universe);
        let mut eq = vec![vec![alg.zero(); n]; n];
        let mut mem = vec![vec![alg.zero(); n]; n];
        for x in 0..n {
            for y in 0..n {
                eq[x][y] = ctx.val_eq(NameId(x), NameId(y)).map_err(err)?;
                mem[x][y] = ctx.val_mem(NameId(x), NameId(y)).map_err(err)?;
            }
        }
        for x in 0..n {
            if !eq[x][x].is_one() {
                return Err(format!("reflexivity fails at {x}"));
            }
            for y in 0..n {
                if eq[x][y] != eq[y][x] {
                    return Err(format!("symmetry fails at {x},{y}"));
                }
                for z in 0..n {
                    let e = eq[x][y];
                    let ok = (e & eq[y][z]).leq(eq[x][z]) && (e & mem[x][z]).leq(mem[y][z]) && (e & mem[z][x]).leq(mem[z][y]);
                    if !ok {
                        return Err(format!("{atoms} atoms: law fails at ({x},{y},{z})"));
                    }
                    triples += 1;
                }
            }
        }
    }
    Ok(format!("{triples} triples, zero violations"))
}

fn ultrafilters() -> Outcome {
    for atoms in 1..=4 {
        let alg = BooleanAlgebra::new(atoms).map_err(err)?;
        let ufs = alg.ultrafilters();
        let mut ours: Vec<Vec<u32>> =
            ufs.iter().map(|u| alg.elements().filter(|&x| u.contains(x)).map(|x| x.bits()).collect()).collect();
        ours.sort();
        let mut brute = oracle::enumerate_ultrafilters_bruteforce(atoms).map_err(err)?;
        brute.sort();
        if ours != brute {
            return Err(format!("{atoms} atoms: {} enumerated vs {} brute force", ours.len(), brute.len()));
        }
        for u in &ufs {
            let has = |x: Element| u.contains(x);
            let mut ok = has(alg.one()) && !has(alg.zero());
            for x in alg.elements() {
                for y in alg.elements() {
                    ok &= !(has(x) && has(y)) || has(x & y);
                    ok &= !(has(x) && (x & y) == x) || has(y);
                }
                ok &= has(x) || has(!x);
            }
            if !ok || u.check_properties(&alg).is_err() {
                return Err(format!("U(a{}) over {atoms} atoms violates a property", u.generator_atom()));
            }
        }
    }
    Ok("1-4 atoms".into())
}

fn compatible(p: &Poset, a: usize, b: usize) -> bool {
    (0..p.len()).any(|r| p.le(r, a) && p.le(r, b))
}

fn completion_violation(c: &Completion) -> Option<String> {
    let poset = c.source();
    let n = poset.len();
    for p in 0..n {
        for q in 0..n {
            if poset.le(q, p) && !c.embed(q).leq(c.embed(p)) {
                return Some(format!("order at {q} <= {p}"));
            }
            if !compatible(poset, p, q) && !(c.embed(p) & c.embed(q)).is_zero() {
                return Some(format!("incompatibility at {p}, {q}"));
            }
        }
    }
    for x in c.target().elements().filter(|x| !x.is_zero()) {
        if !(0..n).any(|p| !c.embed(p).is_zero() && c.embed(p).leq(x)) {
            return Some(format!("image not dense below {}", c.target().format(x)));
        }
    }
    let opens = match oracle::enumerate_regular_opens(poset) {
        Ok(opens) => opens,
        Err(e) => return Some(e.to_string()),
    };
    if opens.len() != 1 << c.target().atom_count() {
        return Some(format!("{} regular opens vs {} atoms", opens.len(), c.target().atom_count()));
    }
    None
}

fn completion_contract() -> Outcome {
    let catalog = oracle::poset_catalog(6);
    if catalog.len() < 200 {
        return Err(format!("catalog has {} posets", catalog.len()));
    }
    for poset in &catalog {
        let c = complete(poset).map_err(err)?;
        if let Some(v) = completion_violation(&c) {
            return Err(format!("{}-element poset: {v}", poset.len()));
        }
    }
    for n in 1..=4 {
        let poset = Poset::from_pairs((0..n).map(|i| format!("p{i}")).collect(), &[]).map_err(err)?;
        let c = complete(&poset).map_err(err)?;
        let mut images: Vec<u32> = (0..n).map(|p| c.embed(p).bits()).collect();
        images.sort();
        images.dedup();
        let atoms_hit = (0..n).all(|p| c.embed(p).atoms().count() == 1);
        if c.target().atom_count() != n || images.len() != n || !atoms_hit {
            return Err(format!("{n}-antichain"));
        }
    }
    Ok(format!("{} posets with at most 6 elements; antichains 1-4", catalog.len()))
}

fn random_poset(rng: &mut ChaCha8Rng) -> Poset {
    let n = rng.random_range(2..=6);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.35) {
                pairs.push((i, j));
            }
        }
    }
    Poset::from_pairs((0..n).map(|i| format!("p{i}")).collect(), &pairs).expect("acyclic")
}

/// `z`, one name `{z -> embed(p)}` per condition, and a few random names.
fn forcing_universe(c: &Completion, rng: &mut ChaCha8Rng) -> NameUniverse {
    let alg = c.target();
    let mut u = NameUniverse::new(alg.clone());
    let z = u.add_name("z", Vec::new()).expect("fresh");
    for p in 0..c.source().len() {
        u.intern(vec![(z, c.embed(p))], "u").expect("valid");
    }
    for _ in 0..3 {
        let pool: Vec<NameId> = u.ids().filter(|&x| u.name(x).rank() < 2).collect();
        let mut entries = Vec::new();
        for x in pool {
            if rng.random_bool(0.5) {
                let bits = rng.random_range(0..alg.size()) as u32;
                entries.push((x, alg.element_from_bits(bits).expect("in range")));
            }
        }
        u.intern(entries, "r").expect("valid");
    }
    u
}

fn forcing_law_violation(c: &Completion, universe: &NameUniverse, corpus: &[Formula]) -> Result<Option<String>, String> {
    let poset = c.source();
    let n = poset.len();
    let mut ctx = ValuationContext::new(universe);
    let mut table = Vec::with_capacity(corpus.len());
    for f in corpus {
        let row: Vec<bool> = (0..n).map(|p| forces(c, p, f, &mut ctx)).collect::<Result<_, _>>().map_err(err)?;
        let neg: Vec<bool> =
            (0..n).map(|p| forces(c, p, &Formula::not(f.clone()), &mut ctx)).collect::<Result<_, _>>().map_err(err)?;
        for p in 0..n {
            for q in 0..n {
                if poset.le(q, p) && row[p] && !row[q] {
                    return Ok(Some(format!("monotonicity: {} forces {f} but {} does not", poset.id(p), poset.id(q))));
                }
            }
            if !c.embed(p).is_zero() && row[p] && neg[p] {
                return Ok(Some(format!("{} forces {f} and its negation", poset.id(p))));
            }
        }
        table.push(row);
    }
    for i in 0..corpus.len() {
        let j = (i + 1) % corpus.len();
        let both = Formula::and(corpus[i].clone(), corpus[j].clone());
        for p in 0..n {
            if forces(c, p, &both, &mut ctx).map_err(err)? != (table[i][p] && table[j][p]) {
                return Ok(Some(format!("AND law at {} for {both}", poset.id(p))));
            }
        }
    }
    Ok(None)
}

fn forcing_laws() -> Outcome {
    let anti = Poset::load("elem p\nelem q").map_err(err)?;
    let c = complete(&anti).map_err(err)?;
    let mut u = NameUniverse::new(c.target().clone());
    let z = u.add_name("z", Vec::new()).map_err(err)?;
    u.add_name("u", vec![(z, c.embed(0))]).map_err(err)?;
    let mut ctx = ValuationContext::new(&u);
    let zu = parse("z in u").map_err(err)?;
    let not_zu = parse("~(z in u)").map_err(err)?;
    let expected = [(0, &zu, true), (1, &zu, false), (1, &not_zu, true)];
    for (p, f, want) in expected {
        if forces(&c, p, f, &mut ctx).map_err(err)? != want {
            return Err(format!("antichain example: {} ||- {f} should be {want}", anti.id(p)));
        }
    }
    let corpus = sentence_corpus(&labels(&u), 3, 200, 5);
    if let Some(v) = forcing_law_violation(&c, &u, &corpus)? {
        return Err(format!("antichain example: {v}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..50 {
        let poset = random_poset(&mut rng);
        let c = complete(&poset).map_err(err)?;
        let universe = forcing_universe(&c, &mut rng);
        let corpus = sentence_corpus(&labels(&universe), 3, 100, k);
        if let Some(v) = forcing_law_violation(&c, &universe, &corpus)? {
            return Err(format!("random poset {k}: {v}"));
        }
    }
    Ok("antichain example reproduced; 50 random posets".into())
}

fn genericity() -> Outcome {
    let mut filters = 0usize;
    for poset in oracle::poset_catalog(5) {
        let n = poset.len();
        let minimal: Vec<usize> = (0..n).filter(|&p| (0..n).all(|q| !(q != p && poset.le(q, p)))).collect();
        for members in oracle::enumerate_filters(&poset).map_err(err)? {
            let meets = oracle::meets_every_dense(&poset, &members).map_err(err)?;
            let has_minimal = members.iter().any(|p| minimal.contains(p));
            let filter = Filter::new(&poset, Subset::from_indices(n, members.iter().copied())).map_err(err)?;
            let library = poset.is_generic(&filter, Genericity::All).map_err(err)?;
            if meets != has_minimal || library != meets {
                return Err(format!("filter {members:?} of {}", poset.to_text().replace('\n', "; ")));
            }
            filters += 1;
        }
    }
    Ok(format!("{filters} filters over all posets with at most 5 elements"))
}

fn cohen_demo() -> Outcome {
    let start = Instant::now();
    let poset = LazyCohenPoset::new(3);
    let family = poset.standard_family(4);
    for seed in 0..100 {
        let f = hit_dense_sets_lazy(&poset, &family, seed).and_then(|c| c.union()).map_err(err)?;
        if !f.is_total_on(3, 4) {
            return Err(format!("seed {seed}: not total: {f}"));
        }
        for a in 0..3 {
            for b in a + 1..3 {
                if f.distinguishing_column(a, b).is_none() {
                    return Err(format!("seed {seed}: rows {a} and {b} agree: {f}"));
                }
            }
        }
    }
    let finite = cohen_poset_finite(2, 1).map_err(err)?;
    let Density::NotDense { counterexample } = finite.dense_distinct(0, 1).map_err(err)? else {
        return Err("2x1 truncation reports distinctness as dense".into());
    };
    let both_zero = Condition::empty().with(0, 0, false).and_then(|c| c.with(1, 0, false)).map_err(err)?;
    if counterexample != both_zero {
        return Err(format!("unexpected counterexample {counterexample}"));
    }
    let p = finite.index_of(&counterexample).ok_or("counterexample not in poset")?;
    let separated = (0..finite.poset().len())
        .filter(|&q| finite.poset().le(q, p))
        .any(|q| finite.condition(q).distinguishing_column(0, 1).is_some());
    if separated {
        return Err("counterexample has a separating extension".into());
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(10) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("100 seeds total and distinct; 2x1 NOT-DENSE at {counterexample}; {elapsed:.2?}"))
}

fn collapse_round_trip() -> Outcome {
    let alg = BooleanAlgebra::new(1).map_err(err)?;
    let uf = alg.ultrafilters()[0];
    let v3 = HfSet::all_up_to_rank(2);
    let mut cases: Vec<Vec<HfSet>> = (1u32..(1 << v3.len()))
        .map(|mask| v3.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| s.clone()).collect())
        .collect();
    cases.push(HfSet::all_up_to_rank(3));
    for sets in &cases {
        let (universe, ids) = NameUniverse::of_check_names(alg.clone(), sets).map_err(err)?;
        let q = build_quotient(&universe, &uf).map_err(err)?;
        if q.class_count() != universe.len() {
            return Err(format!("check-names were identified in {sets:?}"));
        }
        let collapsed = q.mostowski_collapse().map_err(err)?;
        for (x, s) in ids.iter().zip(sets) {
            if &collapsed[q.class_of(*x)] != s {
                return Err(format!("{s} collapsed to {}", collapsed[q.class_of(*x)]));
            }
        }
    }
    Ok(format!("{} check-name universes", cases.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("classical oracle equivalence", classical_oracle_equivalence),
        ("truth lemma", truth_lemma),
        ("equality laws", equality_laws),
        ("ultrafilter axioms and count", ultrafilters),
        ("completion contract", completion_contract),
        ("forcing laws", forcing_laws),
        ("genericity characterization", genericity),
        ("cohen demo", cohen_demo),
        ("collapse round trip", collapse_round_trip),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
