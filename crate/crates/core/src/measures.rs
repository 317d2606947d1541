//! Finitely supported rational measures, systems of measures indexed by a
//! poset, and distribution functions on rooted trees.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::poset::{ElementSet, Poset};
use crate::rational::{self, Q};
use crate::tree::RootedTree;

/// Nonnegative masses indexed by the elements of a support poset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Measure(pub Vec<Q>);

impl Measure {
    pub fn zeros(n: usize) -> Measure {
        Measure(vec![Q::zero(); n])
    }

    pub fn unit(n: usize, x: usize) -> Measure {
        let mut m = Measure::zeros(n);
        m.0[x] = rational::one();
        m
    }

    /// Equal mass `weight` on every element of `set`.
    pub fn uniform_on(n: usize, set: ElementSet, weight: &Q) -> Measure {
        let mut m = Measure::zeros(n);
        for x in set.iter() {
            m.0[x] = weight.clone();
        }
        m
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mass(&self, x: usize) -> &Q {
        &self.0[x]
    }

    pub fn total(&self) -> Q {
        rational::sum(self.0.iter())
    }

    pub fn on(&self, set: ElementSet) -> Q {
        rational::sum(set.iter().map(|x| &self.0[x]))
    }

    pub fn support(&self) -> ElementSet {
        ElementSet::from_indices((0..self.len()).filter(|&x| !self.0[x].is_zero()))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|q| !q.is_negative())
    }

    pub fn scaled(&self, factor: &Q) -> Measure {
        Measure(self.0.iter().map(|q| q * factor).collect())
    }

    pub fn plus(&self, other: &Measure) -> Measure {
        Measure(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn minus(&self, other: &Measure) -> Measure {
        Measure(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add_at(&mut self, x: usize, amount: &Q) {
        self.0[x] += amount;
    }
}

fn check_same_total(p: &Measure, q: &Measure) -> Result<()> {
    let (a, b) = (p.total(), q.total());
    if a != b {
        return Err(Error::MassMismatch(rational::format(&a), rational::format(&b)));
    }
    Ok(())
}

/// The first up-set `U` (in `up_sets` order) with `P(U) > Q(U)`.
pub fn violating_up_set(support: &Poset, p: &Measure, q: &Measure) -> Result<Option<ElementSet>> {
    if p.len() != support.len() || q.len() != support.len() {
        return Err(Error::SupportMismatch);
    }
    check_same_total(p, q)?;
    Ok(support.up_sets().iter().copied().find(|&u| p.on(u) > q.on(u)))
}

/// `P ⪯ Q`: `P(U) <= Q(U)` for every up-set `U`. Totals must agree.
pub fn stoch_leq(support: &Poset, p: &Measure, q: &Measure) -> Result<bool> {
    Ok(violating_up_set(support, p, q)?.is_none())
}

/// A family of measures on `support` indexed by the elements of `index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureSystem {
    index: Poset,
    support: Poset,
    members: Vec<Measure>,
}

impl MeasureSystem {
    pub fn new(index: Poset, support: Poset, members: Vec<Measure>) -> Result<MeasureSystem> {
        if members.len() != index.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} measures for {} indices",
                members.len(),
                index.len()
            )));
        }
        for (i, m) in members.iter().enumerate() {
            if m.len() != support.len() {
                return Err(Error::SupportMismatch);
            }
            if !m.is_nonnegative() {
                return Err(Error::InvalidMeasure(format!(
                    "negative mass in the measure for `{}`",
                    index.name(i)
                )));
            }
        }
        Ok(MeasureSystem { index, support, members })
    }

    /// A transition kernel: the system indexed by its own support.
    pub fn kernel(support: Poset, members: Vec<Measure>) -> Result<MeasureSystem> {
        MeasureSystem::new(support.clone(), support, members)
    }

    /// `I = (I_alpha)` for an index that is an induced subposet of `support`.
    pub fn unit_system(index: Poset, support: Poset) -> Result<MeasureSystem> {
        let place = embedding(&index, &support)?;
        let members = place.iter().map(|&x| Measure::unit(support.len(), x)).collect();
        MeasureSystem::new(index, support, members)
    }

    pub fn index(&self) -> &Poset {
        &self.index
    }

    pub fn support(&self) -> &Poset {
        &self.support
    }

    pub fn members(&self) -> &[Measure] {
        &self.members
    }

    pub fn member(&self, alpha: usize) -> &Measure {
        &self.members[alpha]
    }

    pub fn member_by_name(&self, alpha: &str) -> Result<&Measure> {
        Ok(&self.members[self.index.require(alpha)?])
    }

    /// The common total mass, or `MassMismatch`.
    pub fn common_total(&self) -> Result<Q> {
        let mut totals = self.members.iter().map(Measure::total);
        let first = totals.next().unwrap_or_else(Q::zero);
        for t in totals {
            if t != first {
                return Err(Error::MassMismatch(rational::format(&first), rational::format(&t)));
            }
        }
        Ok(first)
    }

    pub fn is_probability(&self) -> bool {
        self.members.iter().all(|m| m.total() == rational::one())
    }

    /// Position of each index element inside the support, by name.
    pub fn embedding(&self) -> Result<Vec<usize>> {
        embedding(&self.index, &self.support)
    }

    /// `P + theta I`, for an index induced in the support.
    pub fn plus_identity(&self, theta: &Q) -> Result<MeasureSystem> {
        let place = self.embedding()?;
        let members = self
            .members
            .iter()
            .zip(&place)
            .map(|(m, &x)| {
                let mut m = m.clone();
                m.add_at(x, theta);
                m
            })
            .collect();
        MeasureSystem::new(self.index.clone(), self.support.clone(), members)
    }

    pub fn restrict_index(&self, subset: ElementSet) -> MeasureSystem {
        let index = self.index.induced(subset);
        let members = subset.iter().map(|a| self.members[a].clone()).collect();
        MeasureSystem { index, support: self.support.clone(), members }
    }

    pub fn with_members(&self, members: Vec<Measure>) -> Result<MeasureSystem> {
        MeasureSystem::new(self.index.clone(), self.support.clone(), members)
    }
}

/// Places every element of `index` at the support element of the same name,
/// failing unless the index order is the restricted support order.
pub fn embedding(index: &Poset, support: &Poset) -> Result<Vec<usize>> {
    let place: Vec<usize> = index
        .names()
        .iter()
        .map(|s| support.require(s))
        .collect::<Result<_>>()?;
    for a in 0..index.len() {
        for b in 0..index.len() {
            if index.leq(a, b) != support.leq(place[a], place[b]) {
                return Err(Error::HypothesisViolated(
                    "index is not an induced subposet of the support".into(),
                ));
            }
        }
    }
    Ok(place)
}

/// The first comparable index pair `alpha < beta` (a cover of the index)
/// with `P_alpha` not below `P_beta`, plus the witnessing up-set.
pub fn monotonicity_violation(system: &MeasureSystem) -> Result<Option<(usize, usize, ElementSet)>> {
    system.common_total()?;
    for &(a, b) in system.index.covers() {
        if let Some(u) = violating_up_set(&system.support, &system.members[a], &system.members[b])? {
            return Ok(Some((a, b, u)));
        }
    }
    Ok(None)
}

/// `P_alpha ⪯ P_beta` whenever `alpha <= beta`. Covers suffice by
/// transitivity of the stochastic order.
pub fn system_is_stoch_monotone(system: &MeasureSystem) -> Result<bool> {
    Ok(monotonicity_violation(system)?.is_none())
}

/// `theta P + (1 - theta) I` for `theta` in `(0, 1]`.
pub fn weak_combination(system: &MeasureSystem, theta: &Q) -> Result<MeasureSystem> {
    if !theta.is_positive() || *theta > rational::one() {
        return Err(Error::ThetaOutOfRange(rational::format(theta)));
    }
    let place = system.embedding()?;
    let rest = rational::one() - theta;
    let members = system
        .members
        .iter()
        .zip(&place)
        .map(|(m, &x)| {
            let mut out = m.scaled(theta);
            out.add_at(x, &(&rest * m.total()));
            out
        })
        .collect();
    system.with_members(members)
}

/// `F(x) = P((<-, x])` and `F(x-) = P((<-, x))` on a rooted tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionFunction {
    pub f: Vec<Q>,
    pub f_minus: Vec<Q>,
}

impl DistributionFunction {
    pub fn at(&self, x: usize) -> &Q {
        &self.f[x]
    }

    pub fn total(&self, tree: &RootedTree) -> &Q {
        &self.f[tree.root()]
    }

    /// Recovers the point masses, `F(x) - F(x-)`.
    pub fn masses(&self) -> Measure {
        Measure(self.f.iter().zip(&self.f_minus).map(|(a, b)| a - b).collect())
    }
}

pub fn distribution_function(p: &Measure, tree: &RootedTree) -> Result<DistributionFunction> {
    if p.len() != tree.len() {
        return Err(Error::SupportMismatch);
    }
    let f: Vec<Q> = (0..tree.len()).map(|x| p.on(tree.closed_section(x))).collect();
    let f_minus = (0..tree.len()).map(|x| &f[x] - p.mass(x)).collect();
    Ok(DistributionFunction { f, f_minus })
}

/// `F ⪯ G`: `F(x) >= G(x)` where `(<-, x]` is a down-set and `F(x) <= G(x)`
/// where it is an up-set.
pub fn df_stoch_leq(tree: &RootedTree, f: &DistributionFunction, g: &DistributionFunction) -> Result<bool> {
    if f.f.len() != tree.len() || g.f.len() != tree.len() {
        return Err(Error::SupportMismatch);
    }
    let r = tree.root();
    if f.f[r] != g.f[r] {
        return Err(Error::MassMismatch(rational::format(&f.f[r]), rational::format(&g.f[r])));
    }
    Ok((0..tree.len()).all(|x| {
        (!tree.section_is_down_set(x) || f.f[x] >= g.f[x])
            && (!tree.section_is_up_set(x) || f.f[x] <= g.f[x])
    }))
}
