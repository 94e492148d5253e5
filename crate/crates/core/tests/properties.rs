use forcing_lab::algebra::BooleanAlgebra;
use forcing_lab::lang::corpus::SentenceGenerator;
use forcing_lab::lang::{parse, parse_open, Formula};
use forcing_lab::names::{random_universe, NameId};
use forcing_lab::valuation::ValuationContext;
use proptest::prelude::*;

fn consts() -> Vec<String> {
    ["a", "b", "u"].iter().map(|s| s.to_string()).collect()
}

fn sentence(seed: u64, depth: usize) -> Formula {
    SentenceGenerator::new(&consts(), seed).sentence(depth)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let f = sentence(seed, 6);
        let text = f.to_string();
        prop_assert_eq!(parse(&text).unwrap(), f.clone());
        prop_assert_eq!(parse(&text).unwrap().to_string(), text);
    }

    #[test]
    fn open_round_trip(seed in any::<u64>()) {
        let free = vec!["x".to_string(), "y".to_string()];
        let f = SentenceGenerator::new(&consts(), seed).open_formula(5, &free);
        let vars = free.iter().cloned().collect();
        prop_assert_eq!(parse_open(&f.to_string(), &vars).unwrap(), f);
    }

    #[test]
    fn desugar_idempotent_and_keeps_free_vars(seed in any::<u64>()) {
        let free = vec!["x".to_string()];
        let f = SentenceGenerator::new(&consts(), seed).open_formula(5, &free);
        let d = f.desugar();
        prop_assert!(d.is_desugared());
        prop_assert_eq!(d.desugar(), d.clone());
        prop_assert_eq!(d.free_vars(), f.free_vars());
        prop_assert_eq!(d.constants(), f.constants());
    }

    #[test]
    fn lattice_laws(n in 1usize..5, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let alg = BooleanAlgebra::new(n).unwrap();
        let mask = (1u32 << n) - 1;
        let [x, y, z] = [a, b, c].map(|v| alg.element_from_bits(v & mask).unwrap());
        prop_assert_eq!(x & (y | z), (x & y) | (x & z));
        prop_assert_eq!(!(x & y), !x | !y);
        prop_assert_eq!(x.implies(y), !x | y);
        prop_assert_eq!(x & !x, alg.zero());
        prop_assert_eq!(x | (x & y), x);
        prop_assert_eq!(x.leq(y), (x & y) == x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn valuation_laws(atoms in 1usize..3, useed in any::<u64>(), fseed in any::<u64>()) {
        let alg = BooleanAlgebra::new(atoms).unwrap();
        let universe = random_universe(&alg, 4, 2, useed).unwrap();
        let labels: Vec<String> = universe.ids().map(|x| universe.label(x).to_string()).collect();
        let mut generator = SentenceGenerator::new(&labels, fseed);
        let mut memo = ValuationContext::new(&universe);
        let mut plain = ValuationContext::without_memo(&universe);
        for _ in 0..10 {
            let f = generator.sentence(3);
            let v = memo.val_sentence(&f).unwrap();
            prop_assert_eq!(plain.val_sentence(&f).unwrap(), v);
            prop_assert_eq!(memo.val_sentence(&Formula::not(Formula::not(f.clone()))).unwrap(), v);
            prop_assert_eq!(memo.val_sentence(&Formula::and(f.clone(), f.clone())).unwrap(), v);
        }
        for x in universe.ids() {
            for y in universe.ids() {
                let both = memo.val_subset(x, y).unwrap() & memo.val_subset(y, x).unwrap();
                prop_assert_eq!(both, memo.val_eq(x, y).unwrap());
                // bounded and unbounded existentials agree on a universe containing dom(y)
                let (lx, ly) = (universe.label(x), universe.label(y));
                let bounded = parse(&format!("exists w in {ly} . w = {lx}")).unwrap();
                let unbounded = parse(&format!("exists w . w in {ly} & w = {lx}")).unwrap();
                prop_assert_eq!(memo.val_sentence(&bounded).unwrap(), memo.val_sentence(&unbounded).unwrap());
            }
        }
        prop_assert!(memo.val_eq(NameId(0), NameId(0)).unwrap().is_one());
    }
}

#[test]
fn extensionality_instance_has_value_one() {
    let ext = parse("forall x . forall y . (x sub y & y sub x -> x = y)").unwrap();
    for atoms in 1..=2 {
        let alg = BooleanAlgebra::new(atoms).unwrap();
        for seed in 0..5 {
            let universe = random_universe(&alg, 3, 2, seed).unwrap();
            let mut ctx = ValuationContext::new(&universe);
            assert!(ctx.val_sentence(&ext).unwrap().is_one());
        }
    }
}
