//! Seeded random systems for tests and sweeps.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::lp::{self, LinearProgram, LpOutcome, Relation};
use crate::measures::{Measure, MeasureSystem};
use crate::poset::{MonotoneMap, Poset};
use crate::rational::{self, Q};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// A probability measure whose masses are multiples of `1 / denom`.
pub fn random_measure(n: usize, denom: i64, rng: &mut impl Rng) -> Measure {
    let mut counts = vec![0i64; n];
    for _ in 0..denom {
        counts[rng.random_range(0..n)] += 1;
    }
    Measure(counts.into_iter().map(|k| rational::ratio(k, denom)).collect())
}

/// A monotone map, built along a linear extension of `index` by choosing
/// each value among the support elements above the values already fixed
/// below it. Falls back to a constant map when a choice runs out.
pub fn random_monotone_map(index: &Poset, support: &Poset, rng: &mut impl Rng) -> MonotoneMap {
    for _ in 0..16 {
        let mut image = vec![usize::MAX; index.len()];
        let mut ok = true;
        for alpha in index.linear_extension() {
            let choices: Vec<usize> = (0..support.len())
                .filter(|&x| (0..index.len()).all(|b| image[b] == usize::MAX || !index.lt(b, alpha) || support.leq(image[b], x)))
                .collect();
            match choices.choose(rng) {
                Some(&x) => image[alpha] = x,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return MonotoneMap(image);
        }
    }
    MonotoneMap(vec![rng.random_range(0..support.len()); index.len()])
}

/// The law of a mixture of `k` random monotone maps with weights that are
/// multiples of `1 / denom`; realizably monotone by construction.
pub fn random_realizable_system(
    index: &Poset,
    support: &Poset,
    k: usize,
    denom: i64,
    rng: &mut impl Rng,
) -> MeasureSystem {
    let weights = random_measure(k, denom, rng);
    let mut members = vec![Measure::zeros(support.len()); index.len()];
    for w in &weights.0 {
        let h = random_monotone_map(index, support, rng);
        for (alpha, m) in members.iter_mut().enumerate() {
            m.add_at(h.image(alpha), w);
        }
    }
    MeasureSystem::new(index.clone(), support.clone(), members).expect("mixture is a valid system")
}

/// An optimal point of the polytope of stochastically monotone probability
/// systems under a random integer objective. Each cover `alpha < beta` is
/// encoded by an ordered coupling of `P_alpha` and `P_beta`, which exists
/// exactly when the two are stochastically ordered.
pub fn random_monotone_vertex(index: &Poset, support: &Poset, rng: &mut impl Rng) -> MeasureSystem {
    let n = support.len();
    let mut lp = LinearProgram::new();
    let first = lp.add_vars(index.len() * n);
    let var = |alpha: usize, x: usize| first + alpha * n + x;
    for alpha in 0..index.len() {
        lp.add_constraint((0..n).map(|x| (var(alpha, x), rational::one())).collect(), Relation::Eq, rational::one());
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (0..n).filter(move |&y| support.leq(x, y)).map(move |y| (x, y)))
        .collect();
    for &(a, b) in index.covers() {
        let pi = lp.add_vars(pairs.len());
        for x in 0..n {
            let mut out: Vec<(usize, Q)> = pairs
                .iter()
                .enumerate()
                .filter(|(_, p)| p.0 == x)
                .map(|(k, _)| (pi + k, rational::one()))
                .collect();
            out.push((var(a, x), -rational::one()));
            lp.add_constraint(out, Relation::Eq, rational::zero());
            let mut into: Vec<(usize, Q)> = pairs
                .iter()
                .enumerate()
                .filter(|(_, p)| p.1 == x)
                .map(|(k, _)| (pi + k, rational::one()))
                .collect();
            into.push((var(b, x), -rational::one()));
            lp.add_constraint(into, Relation::Eq, rational::zero());
        }
    }
    lp.set_objective((0..index.len() * n).map(|j| (first + j, rational::int(rng.random_range(-6..=6)))).collect());
    match lp::solve(&lp) {
        LpOutcome::Optimal { values, .. } => {
            let members = (0..index.len())
                .map(|alpha| Measure((0..n).map(|x| values[var(alpha, x)].clone()).collect()))
                .collect();
            MeasureSystem::new(index.clone(), support.clone(), members).expect("vertex is a valid system")
        }
        other => unreachable!("the polytope is nonempty and bounded: {other:?}"),
    }
}

/// A stochastically monotone probability system: an even mixture of two
/// polytope vertices and one realizable system.
pub fn random_stoch_monotone_system(index: &Poset, support: &Poset, rng: &mut impl Rng) -> MeasureSystem {
    let parts = [
        random_monotone_vertex(index, support, rng),
        random_monotone_vertex(index, support, rng),
        random_realizable_system(index, support, 3, 6, rng),
    ];
    let third = rational::ratio(1, 3);
    let members = (0..index.len())
        .map(|alpha| {
            parts
                .iter()
                .fold(Measure::zeros(support.len()), |acc, p| acc.plus(&p.member(alpha).scaled(&third)))
        })
        .collect();
    MeasureSystem::new(index.clone(), support.clone(), members).expect("mixture is a valid system")
}

/// A stochastically monotone transition kernel on `support`.
pub fn random_kernel(support: &Poset, rng: &mut impl Rng) -> MeasureSystem {
    random_stoch_monotone_system(support, support, rng)
}

/// `p1 ⪯ p2`, drawn as a monotone system over a two-element chain.
pub fn random_ordered_pair(support: &Poset, rng: &mut impl Rng) -> (Measure, Measure) {
    let chain = Poset::from_cover_edges(&["1", "2"], &[("1", "2")]).expect("chain");
    let sys = random_stoch_monotone_system(&chain, support, rng);
    (sys.member(0).clone(), sys.member(1).clone())
}
