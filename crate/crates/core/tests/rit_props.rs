mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;

use posetmono::catalog;
use posetmono::feasibility::certify_realization;
use posetmono::measures::distribution_function;
use posetmono::poset::Poset;
use posetmono::rit::{build_rit, mu_minus, tail_preimage, w_class_realize, PlaneTreeIndex};
use posetmono::sampling::{random_stoch_monotone_system, rng};
use posetmono::transform::family_to_distribution;
use posetmono::tree::RootedTree;

use common::*;

fn extremes(p: &Poset) -> Vec<usize> {
    let mut out: Vec<usize> = p.maximal_elements();
    out.extend(p.minimal_elements());
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn paths_partition_the_tree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=8);
        let p = random_tree(n, &mut r);
        let ends = extremes(&p);
        let root = ends[r.random_range(0..ends.len())];
        let tree = RootedTree::new(p.clone(), root).unwrap();
        let index = PlaneTreeIndex::build(&tree);
        let mut seen = BTreeSet::new();
        for (k, node) in index.nodes().iter().enumerate() {
            for w in node.path.windows(2) {
                prop_assert_eq!(tree.parent(w[1]), Some(w[0]));
                prop_assert_eq!(tree.children(w[0]).len(), 1);
            }
            for &x in &node.path {
                prop_assert!(seen.insert(x));
                prop_assert_eq!(index.node_of(x), k);
            }
            let heads: BTreeSet<usize> = node.children.iter().map(|&c| index.node(c).head()).collect();
            let below: BTreeSet<usize> = tree.children(node.tail()).iter().copied().collect();
            prop_assert_eq!(heads, below);
            for &c in &node.children {
                prop_assert_eq!(index.node(c).parent, Some(k));
                prop_assert_eq!(index.attachment(c), Some(node.tail()));
            }
        }
        prop_assert_eq!(seen.len(), n);
        prop_assert_eq!(index.node(0).head(), root);
    }

    #[test]
    fn recursive_transforms_realize_w_class_systems(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_w_class(2, 7, &mut r);
        let chain = Poset::from_cover_edges(&["a", "d"], &[("a", "d")]).unwrap();
        let index = if seed % 2 == 0 { chain } else { catalog::diamond() };
        let sys = random_stoch_monotone_system(&index, &s, &mut r);
        let ends = extremes(&s);
        let root = ends[r.random_range(0..ends.len())];
        let real = w_class_realize(&sys, Some(root)).unwrap();
        let n = s.len();
        prop_assert_eq!(&real.mu[0], &sys.member(0).total());
        for (alpha, t) in real.transforms.iter().enumerate() {
            prop_assert_eq!(&lengths(t, n), sys.member(alpha));
            let f = distribution_function(sys.member(alpha), &real.tree).unwrap();
            for k in 0..real.index.len() {
                let node = real.index.node(k);
                // Interlacing: mu(k-) <= F(u_*) <= F(u_1) <= mu(k).
                prop_assert!(mu_minus(&real.index, &real.mu, k) <= *f.at(node.tail()));
                prop_assert!(f.at(node.tail()) <= f.at(node.head()));
                prop_assert!(*f.at(node.head()) <= real.mu[k]);
                let sub = build_rit(&real.tree, &real.index, &real.mu, &f, k).unwrap();
                prop_assert_eq!(sub.length(), &real.mu[k]);
                prop_assert_eq!(sub.preimage(node.tail()), tail_preimage(&real.index, &real.mu, &f, k));
                let offset = real.index.offset(&real.mu, k);
                for seg in sub.segments() {
                    prop_assert_eq!(t.value_at(&(&offset + &seg.start)), seg.value);
                }
            }
        }
        prop_assert!(naive_pointwise_monotone(&index, &s, &real.transforms));
        let law = family_to_distribution(&index, &s, &real.transforms);
        prop_assert!(certify_realization(&sys, &law));
    }
}
