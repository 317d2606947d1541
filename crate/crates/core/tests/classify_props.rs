use posetmono::catalog;
use posetmono::classify::{has_acyclic_extension, is_acyclic, is_w_class, is_y_class, verdict, Kind};
use posetmono::enumerate::connected_posets;

#[test]
fn class_inclusions_hold() {
    for n in 1..=6 {
        for p in connected_posets(n) {
            if is_w_class(&p) {
                assert!(is_y_class(&p), "{p:?}");
            }
            if is_y_class(&p) {
                assert!(is_acyclic(&p), "{p:?}");
            }
            if is_acyclic(&p) {
                assert!(has_acyclic_extension(&p));
            }
            assert_eq!(is_w_class(&p), is_w_class(&p.dual()));
            assert_eq!(is_y_class(&p), is_y_class(&p.dual()));
        }
    }
}

#[test]
fn pattern_free_classes_by_definition() {
    for n in 1..=6 {
        for p in connected_posets(n) {
            let tree = p.covers().len() + 1 == p.len();
            assert_eq!(is_acyclic(&p), tree);
            let y = tree && !p.contains_induced(&catalog::bowtie());
            assert_eq!(is_y_class(&p), y, "{p:?}");
            let w = y && !p.contains_induced(&catalog::y_poset()) && !p.contains_induced(&catalog::y_poset().dual());
            assert_eq!(is_w_class(&p), w, "{p:?}");
        }
    }
}

#[test]
fn verdict_is_invariant_under_duality() {
    for n in 1..=6 {
        for p in connected_posets(n) {
            assert_eq!(verdict(&p).unwrap().kind, verdict(&p.dual()).unwrap().kind, "{p:?}");
        }
    }
}

#[test]
fn named_posets() {
    assert_eq!(verdict(&catalog::diamond()).unwrap().kind, Kind::WGluedDiamond);
    assert_eq!(verdict(&catalog::bowtie()).unwrap().kind, Kind::YGluedBipartite);
    assert_eq!(verdict(&catalog::y_poset()).unwrap().kind, Kind::Acyclic);
    assert_eq!(verdict(&catalog::crown(3)).unwrap().kind, Kind::Fails);
    assert!(!has_acyclic_extension(&catalog::crown(3)));
    assert!(has_acyclic_extension(&catalog::complete_bipartite(2, 3)));
}
