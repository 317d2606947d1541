//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Set `POSETMONO_FULL=1` to extend the
//! exhaustive sweeps to six elements.

mod common;

use std::collections::{BTreeSet, VecDeque};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use num_traits::{One, Zero};

use posetmono::catalog;
use posetmono::classify::{has_acyclic_extension, is_acyclic, is_w_glued_diamond, is_y_glued_bipartite, verdict, Kind};
use posetmono::enumerate::{canonical_code, connected_posets};
use posetmono::feasibility::{certify_realization, is_realizably_monotone, max_theta, strassen_lp, MapDistribution};
use posetmono::fixtures::{all_fixtures, check_fixture};
use posetmono::glued::{strassen_w_glued, w_glued_realize};
use posetmono::markov::{decompose_generator, massey_check, Generator};
use posetmono::measures::{distribution_function, violating_up_set, Measure, MeasureSystem};
use posetmono::poset::{ElementSet, Poset};
use posetmono::rational::{self, Q};
use posetmono::rit::{build_rit, tail_preimage, w_class_realize};
use posetmono::sampling::{random_kernel, random_measure, random_ordered_pair, random_stoch_monotone_system, rng};
use posetmono::transform::family_to_distribution;

use common::*;

type Outcome = Result<String, String>;

fn full_run() -> bool {
    std::env::var("POSETMONO_FULL").is_ok_and(|v| !v.is_empty() && v != "0")
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn criterion_1() -> Outcome {
    let max = if full_run() { 6 } else { 5 };
    let mut posets = 0;
    let mut kernels = 0;
    for n in 1..=max {
        for p in connected_posets(n) {
            posets += 1;
            let v = verdict(&p).map_err(|e| format!("{p:?}: {e}"))?;
            // A tree Hasse diagram has exactly n - 1 covers.
            let tree = p.covers().len() + 1 == p.len();
            let y = is_y_glued_bipartite(&p).is_some();
            let w = is_w_glued_diamond(&p).is_some();
            check([tree, y, w].iter().filter(|&&b| b).count() <= 1, || format!("{p:?}: overlapping classes"))?;
            let expected = if tree {
                Kind::Acyclic
            } else if y && has_acyclic_extension(&p) {
                Kind::YGluedBipartite
            } else if w && !has_acyclic_extension(&p) {
                Kind::WGluedDiamond
            } else {
                Kind::Fails
            };
            check(v.kind == expected, || format!("{p:?}: verdict {:?}, expected {expected:?}", v.kind))?;
            if v.kind == Kind::Fails {
                continue;
            }
            let mut r = rng(1000 + posets as u64);
            for k in 0..200 {
                let sys = random_kernel(&p, &mut r);
                let (theta, dist) = max_theta(&sys, BOUND).map_err(|e| format!("{p:?}: {e}"))?;
                check(theta > Q::zero(), || format!("{p:?}: kernel {k} has max_theta 0"))?;
                let target = posetmono::measures::weak_combination(&sys, &theta).map_err(|e| e.to_string())?;
                check(realizes(&target, &dist), || format!("{p:?}: kernel {k} law does not realize"))?;
                kernels += 1;
            }
        }
    }
    Ok(format!("{posets} connected posets up to {max} elements, {kernels} kernels with max_theta > 0"))
}

/// Marginals and monotonicity of a map law, checked directly.
fn realizes(system: &MeasureSystem, dist: &MapDistribution) -> bool {
    let n = system.support().len();
    let mut marginals = vec![Measure::zeros(n); system.index().len()];
    for (h, w) in dist.weights() {
        if *w < Q::zero() || !system.index().is_monotone(system.support(), &h.0) {
            return false;
        }
        for (alpha, m) in marginals.iter_mut().enumerate() {
            m.add_at(h.0[alpha], w);
        }
    }
    marginals.as_slice() == system.members()
}

fn criterion_2() -> Outcome {
    let fixtures = all_fixtures();
    for f in &fixtures {
        for sys in [&f.system, &f.full] {
            let index = sys.index();
            let support = sys.support();
            let sm = (0..index.len()).all(|a| {
                (0..index.len()).all(|b| !index.leq(a, b) || naive_stoch_leq(support, sys.member(a), sys.member(b)))
            });
            check(sm, || format!("{}: not stochastically monotone", f.name))?;
        }
        let (theta, _) = max_theta(&f.system, BOUND).map_err(|e| format!("{}: {e}", f.name))?;
        check(theta.is_zero(), || format!("{}: max_theta {}", f.name, rational::format(&theta)))?;
        // A small positive weight is already infeasible.
        let probe = posetmono::measures::weak_combination(&f.system, &rational::ratio(1, 1000)).unwrap();
        let rm = is_realizably_monotone(&probe, BOUND).map_err(|e| e.to_string())?;
        check(rm.is_none(), || format!("{}: realizable at theta 1/1000", f.name))?;
        let report = check_fixture(f, BOUND).map_err(|e| e.to_string())?;
        check(report.passed(f), || format!("{}: report {report:?}", f.name))?;
    }
    Ok(format!("{} fixtures stochastically monotone with max_theta 0", fixtures.len()))
}

fn generator_catalog() -> Vec<Vec<Poset>> {
    (0..=5).map(connected_posets).collect()
}

fn criterion_3() -> Outcome {
    let cat = generator_catalog();
    let mut r = rng(3);
    let mut agree = [0usize; 2];
    for k in 0..500 {
        let p = random_connected(5, &mut r, &cat);
        let g = random_generator(&p, &mut r);
        let lambda = g.default_rate();
        let sm = naive_kernel_sm(&p, &naive_uniformize(&g, &lambda));
        let massey = massey_check(&g);
        check(sm == massey, || format!("generator {k} on {p:?}: massey {massey}, uniformized SM {sm}"))?;
        agree[usize::from(sm)] += 1;
    }
    Ok(format!("500 generators agree ({} monotone, {} not)", agree[1], agree[0]))
}

fn criterion_4() -> Outcome {
    let cat = generator_catalog();
    let mut r = rng(4);
    let mut decomposed = 0;
    for k in 0..300 {
        let p = random_connected(5, &mut r, &cat);
        let g = random_generator(&p, &mut r);
        if let Some(gamma) = decompose_generator(&g, BOUND).map_err(|e| e.to_string())? {
            check(decomposition_holds(&g, &gamma), || format!("generator {k} on {p:?}: identity fails"))?;
            check(massey_check(&g), || format!("generator {k}: decomposes but fails Massey"))?;
            decomposed += 1;
        }
    }
    let fixtures = all_fixtures();
    for f in &fixtures {
        let g = Generator::from_kernel(&f.full).map_err(|e| e.to_string())?;
        let gamma = decompose_generator(&g, BOUND).map_err(|e| format!("{}: {e}", f.name))?;
        check(gamma.is_none(), || format!("{}: generator decomposes", f.name))?;
    }
    Ok(format!("{decomposed} of 300 generators decomposed exactly; {} fixture generators infeasible", fixtures.len()))
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let chain = Poset::from_cover_edges(&["a", "d"], &[("a", "d")]).unwrap();
    let diamond = catalog::diamond();
    let mut pieces = 0;
    for k in 0..200 {
        let s = random_w_class(2, 7, &mut r);
        let index = if k % 2 == 0 { &chain } else { &diamond };
        let sys = random_stoch_monotone_system(index, &s, &mut r);
        let extremes: Vec<usize> = s.maximal_elements().into_iter().chain(s.minimal_elements()).collect();
        let root = extremes[k % extremes.len()];
        let real = w_class_realize(&sys, Some(root)).map_err(|e| format!("system {k} on {s:?}: {e}"))?;
        for (alpha, t) in real.transforms.iter().enumerate() {
            let m = sys.member(alpha);
            check(lengths(t, s.len()) == *m, || format!("system {k}: member {alpha} not realized"))?;
            for x in 0..s.len() {
                let section = real.tree.closed_section(x);
                let f = mass_on(m, section);
                check(mass_on(&lengths(t, s.len()), section) == f, || format!("system {k}: F({x}) mismatch"))?;
            }
            let f = distribution_function(m, &real.tree).map_err(|e| e.to_string())?;
            for kappa in 0..real.index.len() {
                let sub = build_rit(&real.tree, &real.index, &real.mu, &f, kappa).map_err(|e| e.to_string())?;
                let tail = real.index.node(kappa).tail();
                let closed = tail_preimage(&real.index, &real.mu, &f, kappa);
                check(sub.preimage(tail).pieces() == closed.pieces(), || {
                    format!("system {k}: member {alpha}, node {kappa}: tail preimage differs")
                })?;
                pieces += closed.pieces().len();
            }
        }
        check(naive_pointwise_monotone(index, &s, &real.transforms), || format!("system {k}: not pointwise monotone"))?;
    }
    Ok(format!("200 systems realized exactly; {pieces} tail intervals matched"))
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    for k in 0..200 {
        let s = random_w_glued(9, &mut r);
        let sys = random_kernel(&s, &mut r);
        let real = w_glued_realize(&sys).map_err(|e| format!("kernel {k} on {s:?}: {e}"))?;
        let corners = ElementSet::from_indices(["a", "b", "c", "d"].map(|x| s.index_of(x).unwrap()));
        let diamond = sys.restrict_index(corners);
        let shifted = diamond.plus_identity(&real.theta_star).map_err(|e| e.to_string())?;
        for (alpha, t) in real.transforms.iter().enumerate() {
            check(lengths(t, s.len()) == *shifted.member(alpha), || format!("kernel {k}: corner {alpha} not realized"))?;
        }
        check(naive_pointwise_monotone(diamond.index(), &s, &real.transforms), || {
            format!("kernel {k}: family not pointwise monotone")
        })?;
        let law = family_to_distribution(diamond.index(), &s, &real.transforms);
        check(realizes(&shifted, &law), || format!("kernel {k}: extracted law fails"))?;
        check(certify_realization(&shifted, &law), || format!("kernel {k}: extracted law not certified"))?;
        let weight = Q::one() / (Q::one() + &real.theta_star);
        let probe = posetmono::measures::weak_combination(&diamond, &weight).map_err(|e| e.to_string())?;
        let lp = is_realizably_monotone(&probe, BOUND).map_err(|e| e.to_string())?;
        check(lp.is_some(), || format!("kernel {k}: LP finds no realization"))?;
        let full = real.full.as_ref().ok_or_else(|| format!("kernel {k}: no full law"))?;
        let target = posetmono::measures::weak_combination(&sys, &real.theta).map_err(|e| e.to_string())?;
        check(realizes(&target, full), || format!("kernel {k}: full law fails"))?;
    }
    Ok("200 W-glued kernels realized constructively and confirmed by LP".into())
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    for k in 0..500 {
        let s = random_w_glued(9, &mut r);
        let (p1, p2) = random_ordered_pair(&s, &mut r);
        let pair = strassen_w_glued(&s, &p1, &p2).map_err(|e| format!("pair {k} on {s:?}: {e}"))?;
        let n = s.len();
        check(lengths(&pair.lower, n) == p1 && lengths(&pair.upper, n) == p2, || format!("pair {k}: marginals"))?;
        let refs = [&pair.lower, &pair.upper];
        let ordered = breakpoints(&refs).iter().all(|w| s.leq(pair.lower.value_at(w), pair.upper.value_at(w)));
        check(ordered, || format!("pair {k}: transforms not ordered"))?;
        let c = &pair.coupling;
        check(c.first_marginal(n) == p1 && c.second_marginal(n) == p2, || format!("pair {k}: coupling marginals"))?;
        check(c.weights.keys().all(|&(x, y)| s.leq(x, y)), || format!("pair {k}: coupling off the order"))?;
    }
    let mut unordered = 0;
    while unordered < 500 {
        let s = random_w_glued(9, &mut r);
        let p1 = random_measure(s.len(), 6, &mut r);
        let p2 = random_measure(s.len(), 6, &mut r);
        if naive_stoch_leq(&s, &p1, &p2) {
            continue;
        }
        let lp = strassen_lp(&s, &p1, &p2).map_err(|e| e.to_string())?;
        let witness = violating_up_set(&s, &p1, &p2).map_err(|e| e.to_string())?;
        check(lp.is_none(), || format!("unordered pair {unordered}: LP coupling found"))?;
        let u = witness.ok_or_else(|| format!("unordered pair {unordered}: no witness"))?;
        check(naive_up_sets(&s).contains(&u) && mass_on(&p1, u) > mass_on(&p2, u), || {
            format!("unordered pair {unordered}: witness invalid")
        })?;
        unordered += 1;
    }
    Ok("500 ordered pairs coupled pointwise; 500 unordered pairs refuted with up-sets".into())
}

/// Whether some acyclic poset contains `p` as an induced subposet, found by
/// adding at most `budget` elements. Each added element sits above a
/// nonempty down-set and below a nonempty up-set lying entirely above it;
/// an added extremal element is never needed, since deleting it from an
/// acyclic extension leaves one.
fn brute_force_extension(p: &Poset, budget: usize) -> bool {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([(p.clone(), 0usize)]);
    seen.insert(canonical_code(p));
    while let Some((q, used)) = queue.pop_front() {
        if forest(&q) {
            return true;
        }
        if used == budget {
            continue;
        }
        let n = q.len();
        let ups = naive_up_sets(&q);
        for &u in &ups {
            if u.is_empty() {
                continue;
            }
            for &not_d in &ups {
                let d = ElementSet::full(n).difference(not_d);
                if d.is_empty() || !d.intersection(u).is_empty() {
                    continue;
                }
                if !d.iter().all(|x| u.iter().all(|y| q.leq(x, y))) {
                    continue;
                }
                let ext = add_between(&q, d, u);
                if seen.insert(canonical_code(&ext)) {
                    queue.push_back((ext, used + 1));
                }
            }
        }
    }
    false
}

fn forest(q: &Poset) -> bool {
    let n = q.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(x, y) in q.covers() {
        let (a, b) = (find(&mut parent, x), find(&mut parent, y));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

fn add_between(q: &Poset, d: ElementSet, u: ElementSet) -> Poset {
    let n = q.len();
    let mut names: Vec<String> = q.names().to_vec();
    names.push(format!("~{n}"));
    let mut edges: Vec<(String, String)> = Vec::new();
    let leq = |x: usize, y: usize| -> bool {
        match (x == n, y == n) {
            (true, true) => true,
            (true, false) => u.contains(y),
            (false, true) => d.contains(x),
            (false, false) => q.leq(x, y),
        }
    };
    for x in 0..=n {
        for y in 0..=n {
            if x != y && leq(x, y) && !(0..=n).any(|z| z != x && z != y && leq(x, z) && leq(z, y)) {
                edges.push((names[x].clone(), names[y].clone()));
            }
        }
    }
    Poset::from_cover_edges(&names, &edges).unwrap()
}

fn criterion_8() -> Outcome {
    let max = if full_run() { 6 } else { 5 };
    let mut counts = [0usize; 2];
    for n in 1..=max {
        for p in connected_posets(n) {
            let decided = has_acyclic_extension(&p);
            let brute = is_acyclic(&p) || brute_force_extension(&p, 3);
            check(decided == brute, || format!("{p:?}: decision {decided}, brute force {brute}"))?;
            counts[usize::from(decided)] += 1;
        }
    }
    Ok(format!(
        "connected posets up to {max} elements: {} extendable, {} not, all matching the brute force",
        counts[1], counts[0]
    ))
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn criterion_9() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_posetmono");
    let d = |f: &str| data_dir().join(f).to_string_lossy().into_owned();
    let runs: Vec<Vec<String>> = vec![
        vec!["classify".into(), d("diamond.poset")],
        vec!["classify".into(), d("bowtie.poset")],
        vec!["check-sm".into(), d("chain3.gen")],
        vec!["check-sm".into(), d("massey_fail.gen"), "--lambda".into(), "4".into()],
        vec!["check-rm".into(), d("chain3.gen")],
        vec!["decompose".into(), d("chain3.gen")],
        vec!["decompose".into(), d("massey_fail.gen")],
        vec!["simulate".into(), d("chain3.gen"), "--seed".into(), "7".into(), "--horizon".into(), "5".into()],
        vec!["realize".into(), d("diamond.poset"), d("diamond_kernel.txt")],
        vec!["realize".into(), d("bowtie.poset"), d("bowtie_kernel.txt")],
        vec!["realize-w".into(), d("wposet.poset"), d("w_chain_system.txt")],
        vec!["couple".into(), d("diamond.poset"), d("p1.measure"), d("p2.measure")],
        vec!["couple".into(), d("diamond.poset"), d("p2.measure"), d("p1.measure")],
        vec!["fixtures".into(), "list".into()],
        vec!["fixtures".into(), "check".into()],
        vec!["sweep".into(), "--max-elements".into(), "4".into(), "--kernels".into(), "2".into(), "--seed".into(), "9".into()],
    ];
    let mut total = 0;
    for args in &runs {
        for format in ["text", "json"] {
            let run = || {
                Command::new(bin)
                    .args(args)
                    .args(["--format", format])
                    .output()
                    .map_err(|e| e.to_string())
            };
            let (a, b) = (run()?, run()?);
            check(a.status.code() == b.status.code() && a.stdout == b.stdout && a.stderr == b.stderr, || {
                format!("`{}` ({format}) differs between runs", args.join(" "))
            })?;
            check(a.status.code() != Some(2), || {
                format!("`{}` ({format}) errored: {}", args.join(" "), String::from_utf8_lossy(&a.stderr))
            })?;
            total += 1;
        }
    }
    Ok(format!("{total} invocations byte-identical across two runs"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("trichotomy consistency", criterion_1),
        ("necessity fixtures", criterion_2),
        ("Massey equivalence", criterion_3),
        ("generator decomposition round trip", criterion_4),
        ("W-class transforms", criterion_5),
        ("W-glued constructions", criterion_6),
        ("Strassen couplings", criterion_7),
        ("acyclic extension decision", criterion_8),
        ("CLI determinism", criterion_9),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
