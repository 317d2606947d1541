mod common;

use proptest::prelude::*;

use posetmono::enumerate::connected_posets;
use posetmono::measures::{
    df_stoch_leq, distribution_function, stoch_leq, system_is_stoch_monotone, violating_up_set, weak_combination,
};
use posetmono::poset::Poset;
use posetmono::rational::ratio;
use posetmono::sampling::{random_measure, random_ordered_pair, random_stoch_monotone_system, rng};
use posetmono::tree::RootedTree;

use common::*;

fn pick(seed: u64) -> Poset {
    let all: Vec<Poset> = (2..=5).flat_map(connected_posets).collect();
    all[(seed % all.len() as u64) as usize].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stochastic_order_matches_up_set_oracle(seed in any::<u64>()) {
        let p = pick(seed);
        let mut r = rng(seed);
        let a = random_measure(p.len(), 4, &mut r);
        let b = random_measure(p.len(), 4, &mut r);
        let leq = stoch_leq(&p, &a, &b).unwrap();
        prop_assert_eq!(leq, naive_stoch_leq(&p, &a, &b));
        prop_assert!(stoch_leq(&p, &a, &a).unwrap());
        match violating_up_set(&p, &a, &b).unwrap() {
            Some(u) => {
                prop_assert!(!leq);
                prop_assert!(naive_up_sets(&p).contains(&u));
                prop_assert!(mass_on(&a, u) > mass_on(&b, u));
            }
            None => prop_assert!(leq),
        }
        if leq && stoch_leq(&p, &b, &a).unwrap() {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn stochastic_order_is_transitive(seed in any::<u64>()) {
        let p = pick(seed);
        let chain = Poset::from_cover_edges(&["1", "2", "3"], &[("1", "2"), ("2", "3")]).unwrap();
        let sys = random_stoch_monotone_system(&chain, &p, &mut rng(seed));
        prop_assert!(stoch_leq(&p, sys.member(0), sys.member(1)).unwrap());
        prop_assert!(stoch_leq(&p, sys.member(1), sys.member(2)).unwrap());
        prop_assert!(stoch_leq(&p, sys.member(0), sys.member(2)).unwrap());
    }

    #[test]
    fn distribution_functions_order_like_measures_on_w_class(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = random_w_class(2, 7, &mut r);
        let (a, b) = if seed % 2 == 0 {
            random_ordered_pair(&w, &mut r)
        } else {
            (random_measure(w.len(), 4, &mut r), random_measure(w.len(), 4, &mut r))
        };
        for root in w.maximal_elements() {
            let tree = RootedTree::new(w.clone(), root).unwrap();
            let fa = distribution_function(&a, &tree).unwrap();
            let fb = distribution_function(&b, &tree).unwrap();
            for x in 0..w.len() {
                prop_assert_eq!(fa.at(x), &mass_on(&a, tree.closed_section(x)));
            }
            prop_assert_eq!(fa.masses(), a.clone());
            prop_assert_eq!(df_stoch_leq(&tree, &fa, &fb).unwrap(), naive_stoch_leq(&w, &a, &b));
        }
    }

    #[test]
    fn weak_combination_keeps_monotonicity(seed in any::<u64>(), k in 1i64..=8) {
        let p = pick(seed);
        let sys = random_stoch_monotone_system(&p, &p, &mut rng(seed));
        prop_assert!(system_is_stoch_monotone(&sys).unwrap());
        let mixed = weak_combination(&sys, &ratio(k, 8)).unwrap();
        prop_assert!(mixed.is_probability());
        prop_assert!(system_is_stoch_monotone(&mixed).unwrap());
        prop_assert!(naive_kernel_sm(&p, mixed.members()));
    }
}
