//! Named small posets.

use crate::poset::Poset;

fn build(elements: &[&str], covers: &[(&str, &str)]) -> Poset {
    Poset::from_cover_edges(elements, covers).expect("catalog entry is a valid Hasse diagram")
}

/// `a < b, c < d`
pub fn diamond() -> Poset {
    build(&["a", "b", "c", "d"], &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])
}

/// `e, f < g, h`
pub fn bowtie() -> Poset {
    build(&["e", "f", "g", "h"], &[("e", "g"), ("e", "h"), ("f", "g"), ("f", "h")])
}

/// `e < f < g, h`
pub fn y_poset() -> Poset {
    build(&["e", "f", "g", "h"], &[("e", "f"), ("f", "g"), ("f", "h")])
}

/// `e < f, g, h`
pub fn w_poset() -> Poset {
    build(&["e", "f", "g", "h"], &[("e", "f"), ("e", "g"), ("e", "h")])
}

/// The diamond with one extra element `x` below its bottom.
pub fn s1() -> Poset {
    build(
        &["a", "b", "c", "d", "x"],
        &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d"), ("x", "a")],
    )
}

/// The diamond with `x < c < y` attached at a side element.
pub fn s4_hat() -> Poset {
    build(
        &["a", "b", "c", "d", "x", "y"],
        &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d"), ("c", "y"), ("x", "c")],
    )
}

/// `a1..ak < b1..bk` with `ai < bi` and `ai < b(i+1)` cyclically.
pub fn crown(k: usize) -> Poset {
    assert!(k >= 2);
    let names: Vec<String> = (1..=k)
        .flat_map(|i| [format!("a{i}"), format!("b{i}")])
        .collect();
    let mut covers = Vec::new();
    for i in 1..=k {
        let j = i % k + 1;
        covers.push((format!("a{i}"), format!("b{i}")));
        covers.push((format!("a{i}"), format!("b{j}")));
    }
    Poset::from_cover_edges(&names, &covers).expect("crown is a valid Hasse diagram")
}

/// `a1..am < b1..bn` with every `bj` covering every `ai`.
pub fn complete_bipartite(m: usize, n: usize) -> Poset {
    let mut names = Vec::new();
    let mut covers = Vec::new();
    for i in 1..=m {
        names.push(format!("a{i}"));
        for j in 1..=n {
            covers.push((format!("a{i}"), format!("b{j}")));
        }
    }
    names.extend((1..=n).map(|j| format!("b{j}")));
    Poset::from_cover_edges(&names, &covers).expect("bipartite poset is a valid Hasse diagram")
}

pub fn chain(n: usize) -> Poset {
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let covers: Vec<(String, String)> =
        names.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    Poset::from_cover_edges(&names, &covers).expect("chain is a valid Hasse diagram")
}

/// Looks a catalog entry up by name: `diamond`, `bowtie`, `y`, `w`, `s1`,
/// `s4hat`, `crownK`, `chainN`.
pub fn by_name(name: &str) -> Option<Poset> {
    match name {
        "diamond" => Some(diamond()),
        "bowtie" => Some(bowtie()),
        "y" => Some(y_poset()),
        "w" => Some(w_poset()),
        "s1" => Some(s1()),
        "s4hat" => Some(s4_hat()),
        _ => {
            if let Some(k) = name.strip_prefix("crown").and_then(|k| k.parse().ok()) {
                (k >= 2).then(|| crown(k))
            } else if let Some(n) = name.strip_prefix("chain").and_then(|n| n.parse().ok()) {
                (n >= 1).then(|| chain(n))
            } else {
                None
            }
        }
    }
}
