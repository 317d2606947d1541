//! Continuous-time Markov generators: uniformization, Massey's criterion,
//! decomposition into monotone-map jump rates, and path simulation.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::classify::{verdict, Kind};
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, Relation};
use crate::measures::{self, Measure, MeasureSystem};
use crate::poset::{monotone_maps_within, ElementSet, MonotoneMap, Poset};
use crate::rational::{self, Q};

/// A rate matrix on a poset. Off-diagonal rates are nonnegative, the
/// diagonal makes every row sum to zero, and some state has a positive
/// exit rate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    states: Poset,
    rates: Vec<Vec<Q>>,
}

/// Row-stochastic kernels are kept as systems indexed by their own states.
pub type TransitionKernel = MeasureSystem;

impl Generator {
    /// `off_diagonal[x][y]` for `x != y`; diagonal entries are ignored and
    /// recomputed.
    pub fn new(states: Poset, off_diagonal: Vec<Vec<Q>>) -> Result<Generator> {
        let n = states.len();
        if off_diagonal.len() != n || off_diagonal.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGenerator(format!("rate matrix must be {n} x {n}")));
        }
        let mut rates = off_diagonal;
        for x in 0..n {
            rates[x][x] = Q::zero();
            if let Some(y) = (0..n).find(|&y| rates[x][y].is_negative()) {
                return Err(Error::InvalidGenerator(format!(
                    "negative rate from `{}` to `{}`",
                    states.name(x),
                    states.name(y)
                )));
            }
            let exit = rational::sum(rates[x].iter());
            rates[x][x] = -exit;
        }
        let g = Generator { states, rates };
        if g.max_exit_rate().is_zero() {
            return Err(Error::InvalidGenerator("all exit rates are zero".into()));
        }
        Ok(g)
    }

    /// The generator `P - I` of a kernel, jumping at unit rate.
    pub fn from_kernel(kernel: &TransitionKernel) -> Result<Generator> {
        let n = kernel.support().len();
        let rates = (0..n).map(|x| kernel.member(x).0.clone()).collect();
        Generator::new(kernel.support().clone(), rates)
    }

    pub fn states(&self) -> &Poset {
        &self.states
    }

    pub fn rate(&self, x: usize, y: usize) -> &Q {
        &self.rates[x][y]
    }

    pub fn rates(&self) -> &[Vec<Q>] {
        &self.rates
    }

    /// `L(x, U)`
    pub fn rate_into(&self, x: usize, set: crate::poset::ElementSet) -> Q {
        rational::sum(set.iter().map(|y| &self.rates[x][y]))
    }

    /// `lambda* = max_x -L(x, x)`
    pub fn max_exit_rate(&self) -> Q {
        (0..self.states.len())
            .map(|x| -&self.rates[x][x])
            .max()
            .unwrap_or_else(Q::zero)
    }

    pub fn default_rate(&self) -> Q {
        self.max_exit_rate() * rational::int(2)
    }
}

/// `Q(x, y) = I(x, y) + L(x, y) / lambda`, for `lambda >= lambda*`.
pub fn uniformize(generator: &Generator, lambda: &Q) -> Result<TransitionKernel> {
    let exit = generator.max_exit_rate();
    if *lambda < exit {
        return Err(Error::LambdaTooSmall {
            lambda: rational::format(lambda),
            exit: rational::format(&exit),
        });
    }
    let n = generator.states.len();
    let rows = (0..n)
        .map(|x| {
            let mut row = Measure(generator.rates[x].iter().map(|r| r / lambda).collect());
            row.add_at(x, &Q::one());
            row
        })
        .collect();
    MeasureSystem::kernel(generator.states.clone(), rows)
}

/// Massey's conditions: for all `x <= y` and up-sets `U`,
/// `L(x, U) <= L(y, U)` when `y` is outside `U`, and
/// `L(x, U^c) >= L(y, U^c)` when `x` is inside `U`.
pub fn massey_check(generator: &Generator) -> bool {
    let p = &generator.states;
    let n = p.len();
    let ups = p.up_sets();
    (0..n).all(|x| {
        p.up_of(x).iter().filter(|&y| y != x).all(|y| {
            ups.iter().all(|&u| {
                let first = u.contains(y) || generator.rate_into(x, u) <= generator.rate_into(y, u);
                let second = !u.contains(x) || {
                    let c = u.complement(n);
                    generator.rate_into(x, c) >= generator.rate_into(y, c)
                };
                first && second
            })
        })
    })
}

/// Whether every row pair `x <= y` of the kernel is stochastically ordered.
pub fn kernel_is_stoch_monotone(kernel: &TransitionKernel) -> bool {
    let p = kernel.support();
    (0..p.len()).all(|x| {
        p.upper_covers(x).into_iter().all(|y| {
            measures::stoch_leq(p, kernel.member(x), kernel.member(y)).expect("kernel rows are probabilities")
        })
    })
}

/// Stochastic monotonicity of the process, read off the kernel uniformized
/// at `2 lambda*`.
pub fn sm_continuous(generator: &Generator) -> bool {
    let kernel = uniformize(generator, &generator.default_rate()).expect("2 lambda* >= lambda*");
    kernel_is_stoch_monotone(&kernel)
}

/// Nonnegative jump rates `gamma(h)` on non-identity monotone maps with
/// `L(x, y) = sum_h gamma(h) [h(x) = y]` for every `x != y`, if any exist.
pub fn decompose_generator(generator: &Generator, bound: usize) -> Result<Option<BTreeMap<MonotoneMap, Q>>> {
    let p = &generator.states;
    let n = p.len();
    let identity = MonotoneMap::identity(n);
    // A charged map moves each x only along a positive rate.
    let targets: Vec<ElementSet> = (0..n)
        .map(|x| {
            let mut t = ElementSet::singleton(x);
            for y in (0..n).filter(|&y| y != x && generator.rates[x][y].is_positive()) {
                t.insert(y);
            }
            t
        })
        .collect();
    let maps: Vec<MonotoneMap> = monotone_maps_within(p, p, &targets, bound)?
        .into_iter()
        .filter(|h| *h != identity)
        .collect();
    let mut lp = LinearProgram::new();
    let first = lp.add_vars(maps.len());
    for x in 0..n {
        for y in (0..n).filter(|&y| y != x) {
            let coeffs = maps
                .iter()
                .enumerate()
                .filter(|(_, h)| h.image(x) == y)
                .map(|(j, _)| (first + j, Q::one()))
                .collect();
            lp.add_constraint(coeffs, Relation::Eq, generator.rates[x][y].clone());
        }
    }
    Ok(lp::lp_feasible(&lp).map(|values| {
        maps.into_iter()
            .zip(values)
            .filter(|(_, w)| !w.is_zero())
            .collect()
    }))
}

/// The kernel of the random map drawn with probability `gamma(h) / lambda`,
/// `lambda = sum gamma`. Equals `uniformize(L, lambda)` when `gamma`
/// decomposes `L`.
pub fn kernel_of_rates(states: &Poset, gamma: &BTreeMap<MonotoneMap, Q>) -> (Q, TransitionKernel) {
    let n = states.len();
    let lambda: Q = rational::sum(gamma.values());
    let mut rows = vec![Measure::zeros(n); n];
    for (h, g) in gamma {
        let w = g / &lambda;
        for (x, row) in rows.iter_mut().enumerate() {
            row.add_at(h.image(x), &w);
        }
    }
    let kernel = MeasureSystem::kernel(states.clone(), rows).expect("rows are nonnegative");
    (lambda, kernel)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub time: f64,
    pub state: usize,
}

/// A sample path started at `x0` up to `horizon`: a rate-`lambda*` Poisson
/// clock, with jumps drawn from the kernel uniformized at `lambda*`. Only
/// state changes are recorded, after the initial event at time zero.
pub fn simulate_path(generator: &Generator, x0: usize, horizon: &Q, seed: u64) -> Vec<Event> {
    let lambda = generator.max_exit_rate();
    let kernel = uniformize(generator, &lambda).expect("lambda* is admissible");
    let cumulative: Vec<Vec<f64>> = kernel
        .members()
        .iter()
        .map(|row| {
            let mut acc = Q::zero();
            row.0.iter().map(|q| {
                acc += q;
                rational::to_f64(&acc)
            }).collect()
        })
        .collect();
    let horizon = rational::to_f64(horizon);
    let clock = Exp::new(rational::to_f64(&lambda)).expect("positive rate");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = vec![Event { time: 0.0, state: x0 }];
    let mut state = x0;
    let mut time = 0.0;
    loop {
        time += clock.sample(&mut rng);
        if time > horizon {
            break;
        }
        let u: f64 = rng.random();
        let row = &cumulative[state];
        let next = row.iter().position(|&c| u < c).unwrap_or(row.len() - 1);
        if next != state {
            state = next;
            events.push(Event { time, state });
        }
    }
    events
}

/// Whether monotonicity equivalence holds for continuous-time processes on
/// the poset, i.e. the verdict is not `Fails`.
pub fn ct_equivalence(p: &Poset) -> Result<bool> {
    Ok(verdict(p)?.kind != Kind::Fails)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::poset::DEFAULT_MAP_BOUND;
    use crate::rational::{int, ratio};

    fn chain_generator(up: i64, down: i64) -> Generator {
        Generator::new(catalog::chain(2), vec![vec![int(0), int(up)], vec![int(down), int(0)]]).unwrap()
    }

    #[test]
    fn uniformize_a_jump_up() {
        let g = chain_generator(1, 0);
        let k = uniformize(&g, &int(2)).unwrap();
        assert_eq!(k.member(0), &Measure(vec![ratio(1, 2), ratio(1, 2)]));
        assert_eq!(k.member(1), &Measure(vec![int(0), int(1)]));
        let tight = uniformize(&g, &int(1)).unwrap();
        assert_eq!(tight.member(0).mass(0), &int(0));
        assert!(matches!(uniformize(&g, &ratio(1, 2)), Err(Error::LambdaTooSmall { .. })));
    }

    #[test]
    fn massey_on_chains() {
        assert!(massey_check(&chain_generator(1, 0)));
        assert!(massey_check(&chain_generator(0, 5)));
        assert!(sm_continuous(&chain_generator(0, 5)));
    }

    #[test]
    fn zero_generator_is_rejected() {
        assert!(matches!(
            Generator::new(catalog::chain(2), vec![vec![int(0); 2]; 2]),
            Err(Error::InvalidGenerator(_))
        ));
    }

    #[test]
    fn decompose_a_jump_up() {
        let g = chain_generator(1, 0);
        let gamma = decompose_generator(&g, DEFAULT_MAP_BOUND).unwrap().unwrap();
        assert_eq!(gamma.into_iter().collect::<Vec<_>>(), vec![(MonotoneMap(vec![1, 1]), int(1))]);
    }

    #[test]
    fn simulation_is_deterministic() {
        let g = chain_generator(1, 1);
        let a = simulate_path(&g, 0, &int(10), 7);
        assert_eq!(a, simulate_path(&g, 0, &int(10), 7));
        assert_eq!(simulate_path(&g, 0, &int(0), 7), vec![Event { time: 0.0, state: 0 }]);
        let absorbing = chain_generator(1, 0);
        assert!(simulate_path(&absorbing, 1, &int(50), 3).iter().all(|e| e.state == 1));
    }
}
