mod common;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

use posetmono::enumerate::connected_posets;
use posetmono::feasibility::{is_realizably_monotone, max_theta, realize_acyclic, strassen_lp};
use posetmono::lp::{lp_feasible, LinearProgram, Relation};
use posetmono::measures::{system_is_stoch_monotone, weak_combination, Measure};
use posetmono::poset::Poset;
use posetmono::rational::{int, ratio, Q};
use posetmono::sampling::{random_kernel, random_measure, random_ordered_pair, random_realizable_system, rng};

use common::*;

fn pick(seed: u64, max: usize) -> Poset {
    let all: Vec<Poset> = (2..=max).flat_map(connected_posets).collect();
    all[(seed % all.len() as u64) as usize].clone()
}

/// Northwest-corner filling of a transportation table.
fn northwest_corner(rows: &[i64], cols: &[i64]) -> Vec<Vec<i64>> {
    let (mut r, mut c) = (rows.to_vec(), cols.to_vec());
    let mut table = vec![vec![0; cols.len()]; rows.len()];
    let (mut i, mut j) = (0, 0);
    while i < rows.len() && j < cols.len() {
        let t = r[i].min(c[j]);
        table[i][j] = t;
        r[i] -= t;
        c[j] -= t;
        if r[i] == 0 {
            i += 1;
        } else {
            j += 1;
        }
    }
    table
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transportation_tables_are_feasible(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.random_range(1..=4usize);
        let n = r.random_range(1..=4usize);
        let mut rows: Vec<i64> = (0..m).map(|_| r.random_range(0..6)).collect();
        let cols: Vec<i64> = (0..n).map(|_| r.random_range(0..6)).collect();
        let diff = cols.iter().sum::<i64>() - rows.iter().sum::<i64>();
        if diff >= 0 { rows[0] += diff } else {
            rows.iter_mut().for_each(|x| *x = 0);
            rows[0] = cols.iter().sum();
        }
        let table = northwest_corner(&rows, &cols);
        let mut lp = LinearProgram::new();
        let first = lp.add_vars(m * n);
        for i in 0..m {
            lp.add_constraint((0..n).map(|j| (first + i * n + j, Q::one())).collect(), Relation::Eq, int(rows[i]));
        }
        for j in 0..n {
            lp.add_constraint((0..m).map(|i| (first + i * n + j, Q::one())).collect(), Relation::Eq, int(cols[j]));
        }
        let corner: Vec<Q> = table.iter().flatten().map(|&t| int(t)).collect();
        prop_assert!(lp.is_feasible_point(&corner));
        let found = lp_feasible(&lp);
        prop_assert!(found.is_some());
        prop_assert!(lp.is_feasible_point(&found.unwrap()));
        lp.add_constraint(vec![(first, Q::one())], Relation::Eq, int(rows[0] + 1));
        prop_assert!(lp_feasible(&lp).is_none());
    }

    #[test]
    fn couplings_exist_exactly_for_ordered_pairs(seed in any::<u64>()) {
        let p = pick(seed, 5);
        let mut r = rng(seed);
        let (a, b) = if seed % 2 == 0 {
            random_ordered_pair(&p, &mut r)
        } else {
            (random_measure(p.len(), 4, &mut r), random_measure(p.len(), 4, &mut r))
        };
        let coupling = strassen_lp(&p, &a, &b).unwrap();
        prop_assert_eq!(coupling.is_some(), naive_stoch_leq(&p, &a, &b));
        if let Some(c) = coupling {
            prop_assert_eq!(c.first_marginal(p.len()), a);
            prop_assert_eq!(c.second_marginal(p.len()), b);
            prop_assert!(c.weights.iter().all(|(&(x, y), w)| p.leq(x, y) && *w >= Q::zero()));
        }
    }

    #[test]
    fn max_theta_is_the_feasibility_threshold(seed in any::<u64>()) {
        let p = pick(seed, 5);
        let sys = random_kernel(&p, &mut rng(seed));
        let (theta, _) = max_theta(&sys, BOUND).unwrap();
        prop_assert!(theta >= Q::zero() && theta <= Q::one());
        if theta.is_zero() {
            let probe = weak_combination(&sys, &ratio(1, 100)).unwrap();
            prop_assert!(is_realizably_monotone(&probe, BOUND).unwrap().is_none());
        } else {
            for t in [theta.clone(), &theta / int(2)] {
                let probe = weak_combination(&sys, &t).unwrap();
                prop_assert!(is_realizably_monotone(&probe, BOUND).unwrap().is_some());
            }
        }
        if theta < Q::one() {
            let above = (&theta + Q::one()) / int(2);
            let probe = weak_combination(&sys, &above).unwrap();
            prop_assert!(is_realizably_monotone(&probe, BOUND).unwrap().is_none());
        }
    }

    #[test]
    fn realizable_systems_are_monotone(seed in any::<u64>()) {
        let p = pick(seed, 5);
        let index = pick(seed / 7, 4);
        let sys = random_realizable_system(&index, &p, 3, 6, &mut rng(seed));
        prop_assert!(system_is_stoch_monotone(&sys).unwrap());
        let kernel = random_kernel(&p, &mut rng(seed));
        if is_realizably_monotone(&kernel, BOUND).unwrap().is_some() {
            prop_assert!(system_is_stoch_monotone(&kernel).unwrap());
        }
    }

    #[test]
    fn acyclic_kernels_are_realized(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=7);
        let t = random_tree(n, &mut r);
        let sys = random_kernel(&t, &mut r);
        let law = realize_acyclic(&sys).unwrap();
        let mut marginals = vec![Measure::zeros(n); n];
        for (h, w) in law.weights() {
            prop_assert!(*w > Q::zero());
            prop_assert!((0..n).all(|x| (0..n).all(|y| !t.leq(x, y) || t.leq(h.0[x], h.0[y]))));
            for (x, m) in marginals.iter_mut().enumerate() {
                m.add_at(h.0[x], w);
            }
        }
        prop_assert_eq!(&marginals[..], sys.members());
        prop_assert_eq!(law.total(), Q::one());
    }
}
