#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;

use posetmono::classify::{is_w_class, is_w_glued_diamond};
use posetmono::markov::Generator;
use posetmono::measures::Measure;
use posetmono::poset::{ElementSet, MonotoneMap, Poset};
use posetmono::rational::{self, Q};
use posetmono::sampling::random_monotone_map;
use posetmono::transform::InverseTransform;

pub const BOUND: usize = 250_000;

/// A tree-shaped poset on `v0 .. v{n-1}`: each new vertex hangs above or
/// below a random earlier one.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> Poset {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut covers = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        if rng.random_bool(0.5) {
            covers.push((names[j].clone(), names[i].clone()));
        } else {
            covers.push((names[i].clone(), names[j].clone()));
        }
    }
    Poset::from_cover_edges(&names, &covers).unwrap()
}

pub fn random_w_class(min: usize, max: usize, rng: &mut impl Rng) -> Poset {
    loop {
        let n = rng.random_range(min..=max);
        let p = random_tree(n, rng);
        if is_w_class(&p) {
            return p;
        }
    }
}

/// The diamond `a < b, c < d` with tree-like tails hung on random vertices,
/// kept when the result is a W-glued diamond.
pub fn random_w_glued(max: usize, rng: &mut impl Rng) -> Poset {
    loop {
        let n = rng.random_range(4..=max);
        let mut names: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let mut covers: Vec<(String, String)> =
            [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")].iter().map(|&(x, y)| (x.into(), y.into())).collect();
        for i in 4..n {
            let name = format!("t{i}");
            let j = rng.random_range(0..names.len());
            if rng.random_bool(0.5) {
                covers.push((names[j].clone(), name.clone()));
            } else {
                covers.push((name.clone(), names[j].clone()));
            }
            names.push(name);
        }
        if let Ok(p) = Poset::from_cover_edges(&names, &covers) {
            if is_w_glued_diamond(&p).is_some() {
                return p;
            }
        }
    }
}

pub fn random_connected(max: usize, rng: &mut impl Rng, catalog: &[Vec<Poset>]) -> Poset {
    let n = rng.random_range(2..=max);
    let level = &catalog[n];
    level[rng.random_range(0..level.len())].clone()
}

/// Rates `L(x, y) = sum_h gamma(h) [h(x) = y]` for a few random monotone
/// maps, so the generator decomposes by construction.
pub fn decomposable_generator(p: &Poset, rng: &mut impl Rng) -> Option<Generator> {
    let n = p.len();
    let mut rates = vec![vec![Q::zero(); n]; n];
    for _ in 0..rng.random_range(1..=3) {
        let h = random_monotone_map(p, p, rng);
        let g = rational::int(rng.random_range(1..=4));
        for x in 0..n {
            if h.image(x) != x {
                rates[x][h.image(x)] += &g;
            }
        }
    }
    Generator::new(p.clone(), rates).ok()
}

/// Independent sparse rates with small integer values.
pub fn sparse_generator(p: &Poset, rng: &mut impl Rng) -> Option<Generator> {
    let n = p.len();
    let mut rates = vec![vec![Q::zero(); n]; n];
    for (x, row) in rates.iter_mut().enumerate() {
        for (y, r) in row.iter_mut().enumerate() {
            if x != y && rng.random_bool(0.3) {
                *r = rational::int(rng.random_range(1..=3));
            }
        }
    }
    Generator::new(p.clone(), rates).ok()
}

pub fn random_generator(p: &Poset, rng: &mut impl Rng) -> Generator {
    loop {
        let g = if rng.random_bool(0.5) { decomposable_generator(p, rng) } else { sparse_generator(p, rng) };
        if let Some(g) = g {
            return g;
        }
    }
}

/// Up-sets by definition, over all subsets.
pub fn naive_up_sets(p: &Poset) -> Vec<ElementSet> {
    let n = p.len();
    (0u64..1 << n)
        .map(ElementSet)
        .filter(|s| (0..n).all(|x| !s.contains(x) || (0..n).all(|y| !p.leq(x, y) || s.contains(y))))
        .collect()
}

pub fn mass_on(m: &Measure, set: ElementSet) -> Q {
    set.iter().fold(Q::zero(), |acc, x| acc + m.mass(x))
}

pub fn naive_stoch_leq(p: &Poset, a: &Measure, b: &Measure) -> bool {
    naive_up_sets(p).into_iter().all(|u| mass_on(a, u) <= mass_on(b, u))
}

/// Stochastic monotonicity of row-stochastic rows `rows[x]` along `p`.
pub fn naive_kernel_sm(p: &Poset, rows: &[Measure]) -> bool {
    (0..p.len()).all(|x| (0..p.len()).all(|y| !p.leq(x, y) || naive_stoch_leq(p, &rows[x], &rows[y])))
}

/// `I + L / lambda`, computed directly.
pub fn naive_uniformize(g: &Generator, lambda: &Q) -> Vec<Measure> {
    let n = g.states().len();
    (0..n)
        .map(|x| {
            Measure(
                (0..n)
                    .map(|y| {
                        let id = if x == y { Q::one() } else { Q::zero() };
                        id + g.rate(x, y) / lambda
                    })
                    .collect(),
            )
        })
        .collect()
}

/// The kernel identity: with `lambda = sum gamma`, the chance that the
/// drawn map sends `x` to `y` equals `I(x, y) + L(x, y) / lambda`.
pub fn decomposition_holds(g: &Generator, gamma: &BTreeMap<MonotoneMap, Q>) -> bool {
    let p = g.states();
    let n = p.len();
    if gamma.values().any(|w| *w <= Q::zero()) {
        return false;
    }
    let identity = MonotoneMap::identity(n);
    if gamma.keys().any(|h| *h == identity || !p.is_monotone(p, &h.0)) {
        return false;
    }
    let lambda: Q = gamma.values().fold(Q::zero(), |acc, w| acc + w);
    let expected = naive_uniformize(g, &lambda);
    (0..n).all(|x| {
        (0..n).all(|y| {
            let hit = gamma.iter().filter(|(h, _)| h.0[x] == y).fold(Q::zero(), |acc, (_, w)| acc + w);
            hit / &lambda == expected[x].0[y]
        })
    })
}

/// Every segment start of every transform.
pub fn breakpoints(ts: &[&InverseTransform]) -> Vec<Q> {
    let mut cuts: Vec<Q> = ts.iter().flat_map(|t| t.segments().iter().map(|s| s.start.clone())).collect();
    cuts.sort();
    cuts.dedup();
    cuts
}

/// `X_alpha <= X_beta` at every breakpoint, for every `alpha <= beta`.
pub fn naive_pointwise_monotone(index: &Poset, support: &Poset, ts: &[InverseTransform]) -> bool {
    let refs: Vec<&InverseTransform> = ts.iter().collect();
    breakpoints(&refs).iter().all(|w| {
        (0..index.len()).all(|a| {
            (0..index.len()).all(|b| !index.leq(a, b) || support.leq(ts[a].value_at(w), ts[b].value_at(w)))
        })
    })
}

/// Lebesgue measure of each value's preimage, summed from the segments.
pub fn lengths(t: &InverseTransform, n: usize) -> Measure {
    let mut out = vec![Q::zero(); n];
    for s in t.segments() {
        out[s.value] += &s.end - &s.start;
    }
    Measure(out)
}
