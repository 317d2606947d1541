//! Realizability and coupling oracles built on the exact LP solver, plus
//! the constructive realization of systems indexed by acyclic posets.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::classify::is_acyclic;
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpOutcome, Relation};
use crate::measures::{self, Measure, MeasureSystem};
use crate::poset::{monotone_maps_within, ElementSet, MonotoneMap, Poset};
use crate::rational::{self, Q};

/// A finitely supported law of a random map from `index` to `support`.
/// Zero weights are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapDistribution {
    index: Poset,
    support: Poset,
    weights: BTreeMap<MonotoneMap, Q>,
}

impl MapDistribution {
    pub fn new(index: Poset, support: Poset) -> MapDistribution {
        MapDistribution { index, support, weights: BTreeMap::new() }
    }

    pub fn add(&mut self, map: MonotoneMap, weight: Q) {
        debug_assert_eq!(map.0.len(), self.index.len());
        if weight.is_zero() {
            return;
        }
        let slot = self.weights.entry(map).or_insert_with(Q::zero);
        *slot += weight;
    }

    pub fn index(&self) -> &Poset {
        &self.index
    }

    pub fn support(&self) -> &Poset {
        &self.support
    }

    pub fn weights(&self) -> impl Iterator<Item = (&MonotoneMap, &Q)> {
        self.weights.iter()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> Q {
        rational::sum(self.weights.values())
    }

    pub fn marginal(&self, alpha: usize) -> Measure {
        let mut m = Measure::zeros(self.support.len());
        for (h, w) in &self.weights {
            m.add_at(h.image(alpha), w);
        }
        m
    }

    pub fn marginals(&self) -> Vec<Measure> {
        (0..self.index.len()).map(|a| self.marginal(a)).collect()
    }

    pub fn all_monotone(&self) -> bool {
        self.weights.keys().all(|h| self.index.is_monotone(&self.support, &h.0))
    }

    pub fn all_nonnegative(&self) -> bool {
        self.weights.values().all(|w| !w.is_negative())
    }

    /// Nonnegative weights on monotone maps with exactly the system's
    /// members as marginals.
    pub fn realizes(&self, system: &MeasureSystem) -> bool {
        self.index == *system.index()
            && self.support == *system.support()
            && self.all_nonnegative()
            && self.all_monotone()
            && (0..self.index.len()).all(|a| self.marginal(a) == *system.member(a))
    }

    /// The same law with each map restricted to the support elements named
    /// in `onto`. Every image must lie in `onto`.
    pub fn map_support(&self, onto: &Poset) -> Result<MapDistribution> {
        let rename: Vec<Option<usize>> =
            self.support.names().iter().map(|s| onto.index_of(s)).collect();
        let mut out = MapDistribution::new(self.index.clone(), onto.clone());
        for (h, w) in &self.weights {
            let image = h
                .0
                .iter()
                .map(|&y| rename[y].ok_or_else(|| Error::UnknownElement(self.support.name(y).into())))
                .collect::<Result<Vec<_>>>()?;
            out.add(MonotoneMap(image), w.clone());
        }
        Ok(out)
    }

    /// The law of the restriction of the random map to a sub-index.
    pub fn restrict_index(&self, sub: &Poset) -> Result<MapDistribution> {
        let place: Vec<usize> =
            sub.names().iter().map(|s| self.index.require(s)).collect::<Result<_>>()?;
        let mut out = MapDistribution::new(sub.clone(), self.support.clone());
        for (h, w) in &self.weights {
            out.add(MonotoneMap(place.iter().map(|&a| h.image(a)).collect()), w.clone());
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: &Q) -> MapDistribution {
        let mut out = MapDistribution::new(self.index.clone(), self.support.clone());
        for (h, w) in &self.weights {
            out.add(h.clone(), w * factor);
        }
        out
    }
}

/// Weights on ordered pairs `(x, y)` with `x <= y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCoupling {
    pub weights: BTreeMap<(usize, usize), Q>,
}

impl PairCoupling {
    pub fn first_marginal(&self, n: usize) -> Measure {
        let mut m = Measure::zeros(n);
        for (&(x, _), w) in &self.weights {
            m.add_at(x, w);
        }
        m
    }

    pub fn second_marginal(&self, n: usize) -> Measure {
        let mut m = Measure::zeros(n);
        for (&(_, y), w) in &self.weights {
            m.add_at(y, w);
        }
        m
    }

    pub fn is_ordered(&self, support: &Poset) -> bool {
        self.weights.keys().all(|&(x, y)| support.leq(x, y))
    }
}

/// Realizability LP on a fixed family of maps: one weight per map, and the
/// marginal of every index at every support element prescribed. Redundant
/// rows (each index's marginal sums to the same total) are left out.
pub fn realization_lp(system: &MeasureSystem, maps: &[MonotoneMap]) -> LinearProgram {
    let n = system.support().len();
    let mut lp = LinearProgram::new();
    let first = lp.add_vars(maps.len());
    for alpha in 0..system.index().len() {
        let last = if alpha == 0 { n } else { n.saturating_sub(1) };
        for x in 0..last {
            let coeffs = maps
                .iter()
                .enumerate()
                .filter(|(_, h)| h.image(alpha) == x)
                .map(|(j, _)| (first + j, Q::one()))
                .collect();
            lp.add_constraint(coeffs, Relation::Eq, system.member(alpha).mass(x).clone());
        }
    }
    lp
}

fn distribution_from(system: &MeasureSystem, maps: &[MonotoneMap], values: &[Q]) -> MapDistribution {
    let mut out = MapDistribution::new(system.index().clone(), system.support().clone());
    for (h, w) in maps.iter().zip(values) {
        out.add(h.clone(), w.clone());
    }
    out
}

/// A law on monotone maps realizing the system, or `None` if none exists.
/// Members must share a common total mass.
pub fn is_realizably_monotone(system: &MeasureSystem, bound: usize) -> Result<Option<MapDistribution>> {
    system.common_total()?;
    let targets: Vec<ElementSet> = system.members().iter().map(Measure::support).collect();
    let maps = monotone_maps_within(system.index(), system.support(), &targets, bound)?;
    let lp = realization_lp(system, &maps);
    Ok(lp::lp_feasible(&lp).map(|values| distribution_from(system, &maps, &values[..maps.len()])))
}

/// Checks that `dist` is a feasible point of the realizability LP for
/// `system` over the maps it charges, independently of how it was built.
pub fn certify_realization(system: &MeasureSystem, dist: &MapDistribution) -> bool {
    if dist.index() != system.index() || dist.support() != system.support() || !dist.all_monotone() {
        return false;
    }
    let maps: Vec<MonotoneMap> = dist.weights().map(|(h, _)| h.clone()).collect();
    let values: Vec<Q> = dist.weights().map(|(_, w)| w.clone()).collect();
    let lp = realization_lp(system, &maps);
    lp.is_feasible_point(&values) && system.common_total().is_ok_and(|t| dist.total() == t)
}

/// The largest `theta` in `[0, 1]` such that `theta P + (1 - theta) I` is
/// realizably monotone, with a realizing law at that `theta`. One LP over
/// the joint variables `(w, theta)`; `theta = 0` is always feasible.
pub fn max_theta(system: &MeasureSystem, bound: usize) -> Result<(Q, MapDistribution)> {
    let total = system.common_total()?;
    let place = system.embedding()?;
    // A map charged by the optimum sends alpha into supp P_alpha or onto alpha itself.
    let targets: Vec<ElementSet> = system
        .members()
        .iter()
        .zip(&place)
        .map(|(m, &x)| m.support().union(ElementSet::singleton(x)))
        .collect();
    let maps = monotone_maps_within(system.index(), system.support(), &targets, bound)?;
    let n = system.support().len();
    let mut lp = LinearProgram::new();
    let first = lp.add_vars(maps.len());
    let theta = lp.add_var();
    for alpha in 0..system.index().len() {
        let last = if alpha == 0 { n } else { n - 1 };
        for x in 0..last {
            let unit = if place[alpha] == x { total.clone() } else { Q::zero() };
            let mut coeffs: Vec<(usize, Q)> = maps
                .iter()
                .enumerate()
                .filter(|(_, h)| h.image(alpha) == x)
                .map(|(j, _)| (first + j, Q::one()))
                .collect();
            let shift = system.member(alpha).mass(x) - &unit;
            if !shift.is_zero() {
                coeffs.push((theta, -shift));
            }
            lp.add_constraint(coeffs, Relation::Eq, unit);
        }
    }
    lp.add_constraint(vec![(theta, Q::one())], Relation::Le, Q::one());
    lp.set_objective(vec![(theta, Q::one())]);
    match lp::solve(&lp) {
        LpOutcome::Optimal { values, objective } => {
            let target = if objective.is_zero() {
                MeasureSystem::unit_system(system.index().clone(), system.support().clone())?
                    .with_members(
                        place.iter().map(|&x| Measure::unit(n, x).scaled(&total)).collect(),
                    )?
            } else {
                measures::weak_combination(system, &objective)?
            };
            Ok((objective, distribution_from(&target, &maps, &values[..maps.len()])))
        }
        other => unreachable!("theta = 0 is always feasible and theta <= 1: {other:?}"),
    }
}

/// An ordered coupling of `p1` and `p2`, or `None` when `p1` is not
/// stochastically below `p2`.
pub fn strassen_lp(support: &Poset, p1: &Measure, p2: &Measure) -> Result<Option<PairCoupling>> {
    if p1.len() != support.len() || p2.len() != support.len() {
        return Err(Error::SupportMismatch);
    }
    let (t1, t2) = (p1.total(), p2.total());
    if t1 != t2 {
        return Err(Error::MassMismatch(rational::format(&t1), rational::format(&t2)));
    }
    let n = support.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| support.up_of(x).iter().map(move |y| (x, y)))
        .collect();
    let mut lp = LinearProgram::new();
    let first = lp.add_vars(pairs.len());
    for x in 0..n {
        let coeffs = pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.0 == x)
            .map(|(j, _)| (first + j, Q::one()))
            .collect();
        lp.add_constraint(coeffs, Relation::Eq, p1.mass(x).clone());
    }
    for y in 0..n.saturating_sub(1) {
        let coeffs = pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.1 == y)
            .map(|(j, _)| (first + j, Q::one()))
            .collect();
        lp.add_constraint(coeffs, Relation::Eq, p2.mass(y).clone());
    }
    Ok(lp::lp_feasible(&lp).map(|values| PairCoupling {
        weights: pairs
            .into_iter()
            .zip(values)
            .filter(|(_, w)| !w.is_zero())
            .collect(),
    }))
}

/// Conditional-product gluing of two laws that share exactly one index
/// element and agree on its marginal.
pub fn glue_realizations(d1: &MapDistribution, d2: &MapDistribution, shared: &str) -> Result<MapDistribution> {
    if d1.support() != d2.support() {
        return Err(Error::SupportMismatch);
    }
    let index = d1.index().glue(d2.index(), shared)?;
    let a1 = d1.index().require(shared)?;
    let a2 = d2.index().require(shared)?;
    let m = d1.marginal(a1);
    if m != d2.marginal(a2) {
        return Err(Error::MarginalMismatch);
    }
    let from1: Vec<Option<usize>> = index.names().iter().map(|s| d1.index().index_of(s)).collect();
    let from2: Vec<Option<usize>> = index.names().iter().map(|s| d2.index().index_of(s)).collect();
    let mut by_value: BTreeMap<usize, Vec<(&MonotoneMap, &Q)>> = BTreeMap::new();
    for (h, w) in d2.weights() {
        by_value.entry(h.image(a2)).or_default().push((h, w));
    }
    let mut out = MapDistribution::new(index.clone(), d1.support().clone());
    for (h1, w1) in d1.weights() {
        let v = h1.image(a1);
        for (h2, w2) in by_value.get(&v).into_iter().flatten() {
            let image = (0..index.len())
                .map(|i| match from1[i] {
                    Some(j) => h1.image(j),
                    None => h2.image(from2[i].unwrap()),
                })
                .collect();
            out.add(MonotoneMap(image), w1 * *w2 / m.mass(v));
        }
    }
    Ok(out)
}

/// Produces an ordered coupling `(lower, upper)` of two measures.
pub type Coupler<'a> = dyn Fn(&Measure, &Measure) -> Result<PairCoupling> + 'a;

/// The LP coupler, failing with `NotOrdered` when no coupling exists.
pub fn lp_coupler(support: &Poset) -> impl Fn(&Measure, &Measure) -> Result<PairCoupling> + '_ {
    move |p1, p2| strassen_lp(support, p1, p2)?.ok_or(Error::NotOrdered)
}

/// Realizes a stochastically monotone system whose index poset is a tree,
/// by coupling the measures along each index edge and gluing the couplings
/// outward from the first index element.
pub fn realize_acyclic(system: &MeasureSystem) -> Result<MapDistribution> {
    realize_acyclic_with(system, &lp_coupler(system.support()))
}

pub fn realize_acyclic_with(system: &MeasureSystem, coupler: &Coupler) -> Result<MapDistribution> {
    let index = system.index();
    if !is_acyclic(index) {
        return Err(Error::NotAcyclic);
    }
    if !index.is_connected() || index.is_empty() {
        return Err(Error::NotConnected);
    }
    if !measures::system_is_stoch_monotone(system)? {
        return Err(Error::NotStochasticallyMonotone);
    }
    let support = system.support();
    let root = 0;
    let mut dist = MapDistribution::new(index.induced(crate::poset::ElementSet::singleton(root)), support.clone());
    for (x, w) in system.member(root).0.iter().enumerate() {
        dist.add(MonotoneMap(vec![x]), w.clone());
    }
    let mut visited = crate::poset::ElementSet::singleton(root);
    let mut queue = vec![root];
    let mut k = 0;
    while k < queue.len() {
        let parent = queue[k];
        k += 1;
        for child in index.neighbors(parent) {
            if visited.contains(child) {
                continue;
            }
            let (lo, hi) = if index.lt(parent, child) { (parent, child) } else { (child, parent) };
            let coupling = coupler(system.member(lo), system.member(hi))?;
            let edge = index.induced(crate::poset::ElementSet::from_indices([lo, hi]));
            let lo_first = edge.name(0) == index.name(lo);
            let mut edge_dist = MapDistribution::new(edge, support.clone());
            for (&(x, y), w) in &coupling.weights {
                let image = if lo_first { vec![x, y] } else { vec![y, x] };
                edge_dist.add(MonotoneMap(image), w.clone());
            }
            dist = glue_realizations(&dist, &edge_dist, index.name(parent))?;
            visited.insert(child);
            queue.push(child);
        }
    }
    debug_assert_eq!(dist.index(), index);
    Ok(dist)
}
