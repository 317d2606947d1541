//! Realizations on Y-glued bipartites and W-glued diamonds.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::measures::{distribution_function, system_is_stoch_monotone, Measure, MeasureSystem};
use crate::poset::{ElementSet, Poset};
use crate::rational::{self, Q};
use crate::rit::{floor, interlaced_mu, is_interlaced, mu_minus, PlaneTreeIndex};
use crate::transform::{pointwise_monotone, IntervalSet, InverseTransform};
use crate::tree::RootedTree;

pub use crate::feasibility::glue_realizations;

fn violated(msg: impl Into<String>) -> Error {
    Error::HypothesisViolated(msg.into())
}

/// Which replacement sets a modified family used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReplacementRule {
    /// The closed-form levels: the lower mover's levels first, the upper
    /// mover's scaled from them.
    Closed,
    /// Nested sets built from the top mover down, each taking the tail of
    /// its own preimage first and then child end-portions in proportion to
    /// what is still free.
    Nested,
}

impl ReplacementRule {
    pub fn as_str(self) -> &'static str {
        match self {
            ReplacementRule::Closed => "closed",
            ReplacementRule::Nested => "nested",
        }
    }
}

/// A recursive inverse transform with part of the preimage of the middle
/// vertex sent to the lower vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModifiedTransform {
    pub base: InverseTransform,
    /// Where the value was replaced, in the coordinates of `base`.
    pub replaced: IntervalSet,
    /// Length taken from the child segments.
    pub gamma: Q,
    /// End of the replaced tail piece, local to the middle vertex's segment.
    pub level_lo: Q,
    /// Start of the replaced end-portion in each child segment.
    pub child_levels: Vec<Q>,
    pub modified: InverseTransform,
}

/// A monotone family into a poset `lo < mid < hi` plus a W-class piece
/// attached at `mid`.
#[derive(Clone, Debug)]
pub struct YRealization {
    pub support: Poset,
    pub lo: usize,
    pub mid: usize,
    pub hi: usize,
    /// Built on the dual poset because `mid` is maximal in its piece.
    pub dual: bool,
    pub rule: ReplacementRule,
    pub transforms: Vec<ModifiedTransform>,
}

struct Levels {
    gamma: Vec<Q>,
    tail: Vec<Q>,
    child: Vec<Vec<Q>>,
}

struct YContext {
    mu_minus: Q,
    offset: Q,
    /// `(floor, mu(sigma), head)` per child of the middle vertex's node.
    children: Vec<(Q, Q, usize)>,
    f_mid: Vec<Q>,
    f_mid_minus: Vec<Q>,
    f_heads: Vec<Vec<Q>>,
    lo_mass: Vec<Q>,
    mid_mass: Vec<Q>,
}

/// Realizes `system` on `lo < mid < hi` plus a W-class piece at `mid` by
/// building the recursive transform of the system with the `lo` mass
/// merged into `mid`, then sending part of each `mid` preimage back to `lo`.
/// `partner` names the second index that may carry `lo` mass besides the
/// index minimum; it selects the closed-form levels.
pub fn modified_rit_y(
    system: &MeasureSystem,
    lo: &str,
    mid: &str,
    hi: &str,
    partner: Option<&str>,
) -> Result<YRealization> {
    let y = system.support();
    let (lo_i, mid_i, hi_i) = (y.require(lo)?, y.require(mid)?, y.require(hi)?);
    if !y.covers_edge(lo_i, mid_i) || !y.covers_edge(mid_i, hi_i) {
        return Err(violated(format!("{lo} < {mid} < {hi} is not a chain of covers")));
    }
    let piece = y.all().difference(ElementSet::from_indices([lo_i, hi_i]));
    let below_mid = y.down_of(mid_i).intersection(piece).len() > 1;
    if !below_mid {
        return y_oriented(system, lo_i, mid_i, hi_i, partner, false);
    }
    if y.up_of(mid_i).intersection(piece).len() > 1 {
        return Err(violated(format!("{mid} is not extreme in its piece")));
    }
    let dual_system = MeasureSystem::new(system.index().dual(), y.dual(), system.members().to_vec())?;
    let mut r = y_oriented(&dual_system, hi_i, mid_i, lo_i, partner, true)?;
    r.support = y.clone();
    std::mem::swap(&mut r.lo, &mut r.hi);
    Ok(r)
}

fn y_oriented(
    system: &MeasureSystem,
    lo: usize,
    mid: usize,
    hi: usize,
    partner: Option<&str>,
    dual: bool,
) -> Result<YRealization> {
    let y = system.support();
    let index = system.index();
    let total = system.common_total()?;
    if !system_is_stoch_monotone(system)? {
        return Err(violated("system on the Y piece is not stochastically monotone"));
    }
    let (Some(bottom), Some(top)) = (index.minimum(), index.maximum()) else {
        return Err(Error::NoExtremes);
    };
    let w_set = y.all().difference(ElementSet::singleton(lo));
    let w = y.induced(w_set);
    let to_w: Vec<Option<usize>> = (0..y.len()).map(|x| w.index_of(y.name(x))).collect();
    let to_y: Vec<usize> = (0..w.len()).map(|x| y.index_of(w.name(x)).unwrap()).collect();
    let merged: Vec<Measure> = system
        .members()
        .iter()
        .map(|m| {
            let mut out = Measure::zeros(w.len());
            for x in 0..y.len() {
                let target = if x == lo { to_w[mid].unwrap() } else { to_w[x].unwrap() };
                out.add_at(target, m.mass(x));
            }
            out
        })
        .collect();
    let reduced = MeasureSystem::new(index.clone(), w.clone(), merged)?;
    if !system_is_stoch_monotone(&reduced)? {
        return Err(violated("merged system is not stochastically monotone"));
    }
    let (mid_w, hi_w) = (to_w[mid].unwrap(), to_w[hi].unwrap());
    let tree = RootedTree::new(w.clone(), hi_w)?;
    let k = PlaneTreeIndex::build_with_breaks(&tree, ElementSet::singleton(mid_w));
    let fs = reduced
        .members()
        .iter()
        .map(|m| distribution_function(m, &tree))
        .collect::<Result<Vec<_>>>()?;
    let mu = interlaced_mu(&tree, &k, &fs[bottom], &fs[top])?;
    if !fs.iter().all(|f| is_interlaced(&tree, &k, &mu, f)) {
        return Err(Error::NotInterlaced);
    }
    let bases: Vec<InverseTransform> = fs
        .iter()
        .map(|f| crate::rit::build_rit(&tree, &k, &mu, f, 0).map(|t| t.map_values(|v| to_y[v])))
        .collect::<Result<Vec<_>>>()?;
    let eta = k.node_of(mid_w);
    let node = k.node(eta);
    let ctx = YContext {
        mu_minus: mu_minus(&k, &mu, eta),
        offset: k.offset(&mu, eta),
        children: node
            .children
            .iter()
            .enumerate()
            .map(|(j, &s)| (floor(&k, &mu, eta, j), mu[s].clone(), k.node(s).head()))
            .collect(),
        f_mid: fs.iter().map(|f| f.at(mid_w).clone()).collect(),
        f_mid_minus: fs.iter().map(|f| f.f_minus[mid_w].clone()).collect(),
        f_heads: fs
            .iter()
            .map(|f| node.children.iter().map(|&s| f.at(k.node(s).head()).clone()).collect())
            .collect(),
        lo_mass: system.members().iter().map(|m| m.mass(lo).clone()).collect(),
        mid_mass: reduced.members().iter().map(|m| m.mass(mid_w).clone()).collect(),
    };
    debug_assert_eq!(&mu[0], &total);

    let partner = match partner {
        Some(name) => Some(index.require(name)?),
        None => None,
    };
    let attempts = [
        closed_levels(&ctx, bottom, partner).map(|l| (ReplacementRule::Closed, l)),
        nested_levels(&ctx, index).map(|l| (ReplacementRule::Nested, l)),
    ];
    let mut last_err = violated("no replacement rule applies");
    for attempt in attempts {
        let (rule, levels) = match attempt {
            Ok(v) => v,
            Err(e) => {
                last_err = e;
                continue;
            }
        };
        match apply_levels(system, &ctx, &bases, &levels, lo, mid) {
            Ok(transforms) => {
                return Ok(YRealization { support: y.clone(), lo, mid, hi, dual, rule, transforms });
            }
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

fn proportional(ctx: &YContext, alpha: usize, gamma: &Q) -> Result<Vec<Q>> {
    let den = &ctx.mu_minus - &ctx.f_mid_minus[alpha];
    if gamma.is_zero() {
        return Ok(vec![Q::zero(); ctx.children.len()]);
    }
    if !den.is_positive() {
        return Err(violated("no child room for the replacement"));
    }
    Ok(ctx
        .children
        .iter()
        .zip(&ctx.f_heads[alpha])
        .map(|((_, m, _), fh)| gamma * (m - fh) / &den)
        .collect())
}

fn closed_levels(ctx: &YContext, lower: usize, upper: Option<usize>) -> Result<Levels> {
    let n = ctx.lo_mass.len();
    let zero = Q::zero();
    let mut gamma = vec![zero.clone(); n];
    let mut child = vec![vec![zero.clone(); ctx.children.len()]; n];
    let clip = |x: Q| if x.is_negative() { Q::zero() } else { x };
    match upper {
        Some(c) => {
            let tail_c = &ctx.mid_mass[c];
            gamma[lower] = if ctx.lo_mass[lower] <= *tail_c {
                clip(&ctx.lo_mass[lower] - &ctx.f_mid[c] + &ctx.mu_minus)
            } else {
                &ctx.mu_minus - &ctx.f_mid_minus[lower]
            };
            gamma[c] = clip(&ctx.lo_mass[c] - &ctx.f_mid[c] + &ctx.mu_minus);
            child[lower] = proportional(ctx, lower, &gamma[lower])?;
            child[c] = if gamma[lower].is_positive() {
                child[lower].iter().map(|s| &gamma[c] * s / &gamma[lower]).collect()
            } else {
                vec![zero.clone(); ctx.children.len()]
            };
        }
        None => {
            gamma[lower] = clip(&ctx.lo_mass[lower] - &ctx.f_mid[lower] + &ctx.mu_minus);
            child[lower] = proportional(ctx, lower, &gamma[lower])?;
        }
    }
    for alpha in 0..n {
        let sum: Q = child[alpha].iter().sum();
        if sum != gamma[alpha] || gamma[alpha] > ctx.lo_mass[alpha] {
            return Err(violated("closed-form levels do not add up"));
        }
    }
    let tail = (0..n).map(|a| &ctx.lo_mass[a] - &gamma[a]).collect();
    Ok(Levels { gamma, tail, child })
}

fn nested_levels(ctx: &YContext, index: &Poset) -> Result<Levels> {
    let n = ctx.lo_mass.len();
    let mut movers: Vec<usize> = (0..n).filter(|&a| ctx.lo_mass[a].is_positive()).collect();
    let order = index.linear_extension();
    movers.sort_by_key(|a| order.iter().position(|x| x == a));
    if movers.windows(2).any(|w| !index.leq(w[0], w[1])) {
        return Err(violated("indices carrying mass at the lower vertex are not a chain"));
    }
    let zero = Q::zero();
    let mut gamma = vec![zero.clone(); n];
    let mut tail = vec![zero.clone(); n];
    let mut child = vec![vec![zero.clone(); ctx.children.len()]; n];
    let mut prev_len = zero.clone();
    let mut prev_tail = zero.clone();
    let mut prev_child = vec![zero.clone(); ctx.children.len()];
    for &alpha in movers.iter().rev() {
        let extra = &ctx.lo_mass[alpha] - &prev_len;
        let tail_room = &ctx.f_mid[alpha] - &ctx.mu_minus - &prev_tail;
        let into_tail = rational::max(&zero, &rational::min(&extra, &tail_room));
        let rest = &extra - &into_tail;
        let room: Vec<Q> = ctx
            .children
            .iter()
            .zip(&ctx.f_heads[alpha])
            .zip(&prev_child)
            .map(|(((_, m, _), fh), taken)| m - fh - taken)
            .collect();
        let room_total: Q = room.iter().sum();
        if room.iter().any(|r| r.is_negative()) || rest > room_total {
            return Err(violated("replacement sets cannot be nested"));
        }
        let now: Vec<Q> = if rest.is_zero() {
            prev_child.clone()
        } else {
            prev_child.iter().zip(&room).map(|(t, r)| t + &rest * r / &room_total).collect()
        };
        tail[alpha] = &prev_tail + &into_tail;
        gamma[alpha] = now.iter().sum();
        child[alpha] = now.clone();
        prev_len = ctx.lo_mass[alpha].clone();
        prev_tail = tail[alpha].clone();
        prev_child = now;
    }
    Ok(Levels { gamma, tail, child })
}

fn apply_levels(
    system: &MeasureSystem,
    ctx: &YContext,
    bases: &[InverseTransform],
    levels: &Levels,
    lo: usize,
    mid: usize,
) -> Result<Vec<ModifiedTransform>> {
    let mut out = Vec::with_capacity(bases.len());
    for (alpha, base) in bases.iter().enumerate() {
        if levels.tail[alpha].is_negative() {
            return Err(violated("negative tail replacement"));
        }
        let level_lo = &ctx.mu_minus + &levels.tail[alpha];
        let mut pieces = vec![(ctx.mu_minus.clone(), level_lo.clone())];
        let mut child_levels = Vec::with_capacity(ctx.children.len());
        for ((start, m, _), s) in ctx.children.iter().zip(&levels.child[alpha]) {
            let level = m - s;
            pieces.push((start + &level, start + m));
            child_levels.push(level);
        }
        let replaced = IntervalSet::new(pieces).shifted(&ctx.offset);
        let modified = base.reassign(&replaced, mid, lo)?;
        out.push(ModifiedTransform {
            base: base.clone(),
            replaced,
            gamma: levels.gamma[alpha].clone(),
            level_lo,
            child_levels,
            modified,
        });
    }
    let y = system.support();
    for (alpha, t) in out.iter().enumerate() {
        if t.modified.pushforward(y.len()) != *system.member(alpha) {
            return Err(violated("modified transform misses its target measure"));
        }
    }
    let modified: Vec<InverseTransform> = out.iter().map(|t| t.modified.clone()).collect();
    if !pointwise_monotone(system.index(), y, &modified) {
        return Err(violated("modified transforms are not pointwise ordered"));
    }
    Ok(out)
}

/// The diamond of a W-glued diamond and the W-class piece at each corner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiamondParts {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub wa: ElementSet,
    pub wb: ElementSet,
    pub wc: ElementSet,
    pub wd: ElementSet,
}

impl DiamondParts {
    pub fn of(s: &Poset) -> Result<DiamondParts> {
        let ev = crate::classify::w_glued_diamond(s).map_err(|_| Error::NotWGluedDiamond)?;
        let set = |names: &Vec<String>| s.set_by_names(names);
        let l = &ev.diamond;
        let parts = DiamondParts {
            a: s.require(&l.a)?,
            b: s.require(&l.b)?,
            c: s.require(&l.c)?,
            d: s.require(&l.d)?,
            wa: set(&ev.components[0])?,
            wb: set(&ev.components[1])?,
            wc: set(&ev.components[2])?,
            wd: set(&ev.components[3])?,
        };
        let a_min = s.down_of(parts.a).intersection(parts.wa).len() == 1;
        let d_max = s.up_of(parts.d).intersection(parts.wd).len() == 1;
        if !a_min || !d_max {
            return Err(Error::NotWGluedDiamond);
        }
        Ok(parts)
    }

    pub fn corners(&self) -> [usize; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// `W_b + {a, d}`.
    pub fn y_b(&self) -> ElementSet {
        self.wb.union(ElementSet::from_indices([self.a, self.d]))
    }

    pub fn y_c(&self) -> ElementSet {
        self.wc.union(ElementSet::from_indices([self.a, self.d]))
    }

    /// `W_a + W_d`.
    pub fn w_prime(&self) -> ElementSet {
        self.wa.union(self.wd)
    }
}

/// Copies the masses of `m` (on `s`) at the elements of `target`.
fn restrict_measure(s: &Poset, m: &Measure, target: &Poset) -> Measure {
    Measure((0..target.len()).map(|x| m.mass(s.index_of(target.name(x)).unwrap()).clone()).collect())
}

fn extend_measure(s: &Poset, m: &Measure, source: &Poset) -> Measure {
    let mut out = Measure::zeros(s.len());
    for x in 0..source.len() {
        out.add_at(s.index_of(source.name(x)).unwrap(), m.mass(x));
    }
    out
}

fn rename_into(s: &Poset, t: &InverseTransform, source: &Poset) -> InverseTransform {
    t.map_values(|v| s.index_of(source.name(v)).unwrap())
}

/// Index positions of the diamond corners `a, b, c, d`.
fn corner_indices(index: &Poset, s: &Poset, parts: &DiamondParts) -> Result<[usize; 4]> {
    let mut out = [0; 4];
    for (slot, corner) in out.iter_mut().zip(parts.corners()) {
        *slot = index.require(s.name(corner))?;
    }
    if !index.is_isomorphic(&crate::catalog::diamond())
        || !index.lt(out[0], out[1])
        || !index.lt(out[0], out[2])
        || !index.lt(out[1], out[3])
        || !index.lt(out[2], out[3])
    {
        return Err(violated("index is not the diamond of the support"));
    }
    Ok(out)
}

/// The split of a system with `P_a(d) = P_d(a) = 0` into pieces on
/// `W_b + {a, d}` and `W_c + {a, d}`, with `Q + theta I = P + theta* I`.
#[derive(Clone, Debug)]
pub struct DiamondDecomposition {
    pub parts: DiamondParts,
    pub y1: MeasureSystem,
    pub y2: MeasureSystem,
    pub p: Q,
    pub q1: Q,
    pub q2: Q,
    pub q: Q,
    pub theta: Q,
    pub theta_star: Q,
}

/// `system` is indexed by the diamond of its W-glued support and puts no
/// mass on `W_a - a` or `W_d - d`.
pub fn w_glued_split(system: &MeasureSystem) -> Result<DiamondDecomposition> {
    let s = system.support();
    let parts = DiamondParts::of(s)?;
    let [ia, ib, ic, id] = corner_indices(system.index(), s, &parts)?;
    let p = system.common_total()?;
    if !system_is_stoch_monotone(system)? {
        return Err(Error::NotStochasticallyMonotone);
    }
    let outside = parts.wa.union(parts.wd).difference(ElementSet::from_indices([parts.a, parts.d]));
    if system.members().iter().any(|m| !m.on(outside).is_zero()) {
        return Err(violated("mass outside the diamond with its b and c pieces"));
    }
    if !system.member(ia).mass(parts.d).is_zero() || !system.member(id).mass(parts.a).is_zero() {
        return Err(violated("P_a(d) and P_d(a) must vanish"));
    }
    let m = |alpha: usize| system.member(alpha);
    let build = |piece: ElementSet, top: usize, middle: usize, partner: usize| -> Result<(MeasureSystem, Q)> {
        let y_set = piece.union(ElementSet::from_indices([parts.a, parts.d]));
        let q = m(partner).on(y_set);
        let mut members = vec![Measure::zeros(s.len()); 4];
        for y in piece.iter() {
            members[ia].add_at(y, m(ia).mass(y));
            members[id].add_at(y, m(id).mass(y));
            if y != middle {
                members[top].add_at(y, m(top).mass(y));
            }
        }
        members[ia].add_at(parts.a, &(&q - m(ia).on(piece)));
        members[id].add_at(parts.d, &(&q - m(id).on(piece)));
        members[top].add_at(middle, &(&q - m(top).on(piece.difference(ElementSet::singleton(middle)))));
        for y in y_set.iter() {
            members[partner].add_at(y, m(partner).mass(y));
        }
        let y_poset = s.induced(y_set);
        let restricted = members.iter().map(|mm| restrict_measure(s, mm, &y_poset)).collect();
        Ok((MeasureSystem::new(system.index().clone(), y_poset, restricted)?, q))
    };
    let (y1, q1) = build(parts.wb, ib, parts.b, ic)?;
    let (y2, q2) = build(parts.wc, ic, parts.c, ib)?;
    let q = &q1 + &q2;
    let zero = Q::zero();
    let theta = rational::max(&(&p - &q), &zero);
    let theta_star = rational::max(&(&q - &p), &zero);
    for alpha in 0..4 {
        let lhs = extend_measure(s, y1.member(alpha), y1.support()).plus(&extend_measure(s, y2.member(alpha), y2.support()));
        if !lhs.is_nonnegative() {
            return Err(violated("split measures take negative values"));
        }
        let place = s.index_of(system.index().name(alpha)).unwrap();
        let mut left = lhs;
        left.add_at(place, &theta);
        let mut right = m(alpha).clone();
        right.add_at(place, &theta_star);
        if left != right {
            return Err(violated("split identity fails"));
        }
    }
    Ok(DiamondDecomposition { parts, y1, y2, p, q1, q2, q, theta, theta_star })
}

/// Transforms for a split: the two Y pieces, then the identity on the
/// `theta` tail. Values are support elements of the split's poset.
#[derive(Clone, Debug)]
pub struct SplitRealization {
    pub first: YRealization,
    pub second: YRealization,
    pub transforms: Vec<InverseTransform>,
}

fn realize_split(split: &DiamondDecomposition, s: &Poset, index: &Poset) -> Result<SplitRealization> {
    let parts = &split.parts;
    let name = |x: usize| s.name(x).to_string();
    let (a, b, c, d) = (name(parts.a), name(parts.b), name(parts.c), name(parts.d));
    let first = modified_rit_y(&split.y1, &a, &b, &d, Some(&c))?;
    let second = modified_rit_y(&split.y2, &a, &c, &d, Some(&b))?;
    let transforms = (0..4)
        .map(|alpha| {
            let place = s.require(index.name(alpha))?;
            Ok(InverseTransform::concat(&[
                rename_into(s, &first.transforms[alpha].modified, &first.support),
                rename_into(s, &second.transforms[alpha].modified, &second.support),
                InverseTransform::constant(split.theta.clone(), place),
            ]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SplitRealization { first, second, transforms })
}

/// Realizes `P + theta* I` for a split system, with all checks redone on
/// the output.
pub fn w_glued_split_realize(system: &MeasureSystem) -> Result<(DiamondDecomposition, SplitRealization)> {
    let split = w_glued_split(system)?;
    let r = realize_split(&split, system.support(), system.index())?;
    let target = system.plus_identity(&split.theta_star)?;
    verify_family(&target, &r.transforms)?;
    Ok((split, r))
}

fn verify_family(target: &MeasureSystem, transforms: &[InverseTransform]) -> Result<()> {
    let n = target.support().len();
    if transforms.iter().zip(target.members()).any(|(t, m)| t.pushforward(n) != *m) {
        return Err(violated("transforms miss their target measures"));
    }
    if !pointwise_monotone(target.index(), target.support(), transforms) {
        return Err(violated("transforms are not pointwise ordered"));
    }
    Ok(())
}

/// Segment boundaries of a W-glued realization: the `b` piece ends at
/// `q1`, the `c` piece at `q`, the `W_a + W_d` piece at `q + p'`, and the
/// identity tail at `total`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segments {
    pub q1: Q,
    pub q: Q,
    pub w_end: Q,
    pub total: Q,
}

#[derive(Clone, Debug)]
pub struct WGluedRealization {
    pub parts: DiamondParts,
    pub split: DiamondDecomposition,
    /// `P'` on `W_a + W_d`.
    pub outer: MeasureSystem,
    pub p_outer: Q,
    pub theta_star: Q,
    /// Mixing weight `p / (p + theta*)` of the realized weak combination.
    pub theta: Q,
    pub segments: Segments,
    pub first: YRealization,
    pub second: YRealization,
    /// Transforms realizing `P + theta* I` on the diamond index.
    pub transforms: Vec<InverseTransform>,
    /// For a full-index system, a law on monotone maps realizing the weak
    /// combination with weight `theta`.
    pub full: Option<crate::feasibility::MapDistribution>,
}

/// Realizes a stochastically monotone system on a W-glued diamond. The
/// index is either the diamond itself or the whole support.
pub fn w_glued_realize(system: &MeasureSystem) -> Result<WGluedRealization> {
    let s = system.support();
    let parts = DiamondParts::of(s)?;
    let p = system.common_total()?;
    if !system_is_stoch_monotone(system)? {
        return Err(Error::NotStochasticallyMonotone);
    }
    let full_index = system.index() == s;
    let diamond = if full_index {
        system.restrict_index(ElementSet::from_indices(parts.corners()))
    } else {
        system.clone()
    };
    let [ia, _, _, id] = corner_indices(diamond.index(), s, &parts)?;
    let m = |alpha: usize| diamond.member(alpha);

    let w_prime = s.induced(parts.w_prime());
    let wa_rest = parts.wa.difference(ElementSet::singleton(parts.a));
    let wd_rest = parts.wd.difference(ElementSet::singleton(parts.d));
    let top_a = m(id).on(parts.wa);
    let bottom_d = m(ia).on(parts.wd);
    let p_outer = &top_a + &bottom_d;
    let outer_members: Vec<Measure> = (0..4)
        .map(|alpha| {
            let mut out = Measure::zeros(s.len());
            for y in wa_rest.union(wd_rest).iter() {
                out.add_at(y, m(alpha).mass(y));
            }
            out.add_at(parts.a, &(&top_a - m(alpha).on(wa_rest)));
            out.add_at(parts.d, &(&bottom_d - m(alpha).on(wd_rest)));
            out
        })
        .collect();
    let inner_members: Vec<Measure> = (0..4).map(|alpha| m(alpha).minus(&outer_members[alpha])).collect();
    if outer_members.iter().chain(&inner_members).any(|x| !x.is_nonnegative()) {
        return Err(violated("outer part exceeds the system"));
    }
    let outer = MeasureSystem::new(
        diamond.index().clone(),
        w_prime.clone(),
        outer_members.iter().map(|x| restrict_measure(s, x, &w_prime)).collect(),
    )?;
    let inner = diamond.with_members(inner_members)?;
    let split = w_glued_split(&inner)?;
    let lemma = realize_split(&split, s, diamond.index())?;
    let outer_r = crate::rit::w_class_realize(&outer, Some(w_prime.require(s.name(parts.d))?))?;

    let transforms: Vec<InverseTransform> = (0..4)
        .map(|alpha| {
            let place = s.require(diamond.index().name(alpha))?;
            Ok(InverseTransform::concat(&[
                rename_into(s, &lemma.first.transforms[alpha].modified, &lemma.first.support),
                rename_into(s, &lemma.second.transforms[alpha].modified, &lemma.second.support),
                rename_into(s, &outer_r.transforms[alpha], &w_prime),
                InverseTransform::constant(split.theta.clone(), place),
            ]))
        })
        .collect::<Result<Vec<_>>>()?;
    let theta_star = split.theta_star.clone();
    verify_family(&diamond.plus_identity(&theta_star)?, &transforms)?;
    let w_end = &split.q + &p_outer;
    let segments = Segments {
        q1: split.q1.clone(),
        q: split.q.clone(),
        total: &w_end + &split.theta,
        w_end,
    };
    let theta = if p.is_zero() { rational::one() } else { &p / (&p + &theta_star) };

    let full = if full_index {
        let shifted = system.plus_identity(&theta_star)?;
        let mut dist = crate::transform::family_to_distribution(diamond.index(), s, &transforms);
        for (corner, piece) in parts.corners().into_iter().zip([parts.wa, parts.wb, parts.wc, parts.wd]) {
            if piece.len() == 1 {
                continue;
            }
            let names = s.set_names(piece);
            let sub = shifted.restrict_index(system.index().set_by_names(&names)?);
            let coupler = |p1: &Measure, p2: &Measure| -> Result<crate::feasibility::PairCoupling> {
                Ok(strassen_w_glued(s, p1, p2)?.coupling)
            };
            let piece_dist = crate::feasibility::realize_acyclic_with(&sub, &coupler)?;
            dist = glue_realizations(&dist, &piece_dist, s.name(corner))?;
        }
        if dist.index() != s {
            return Err(violated("glued index differs from the support"));
        }
        let dist = dist.scaled(&theta);
        let target = crate::measures::weak_combination(system, &theta)?;
        if !crate::feasibility::certify_realization(&target, &dist) {
            return Err(violated("glued law does not realize the weak combination"));
        }
        Some(dist)
    } else {
        None
    };

    Ok(WGluedRealization {
        parts,
        split,
        outer,
        p_outer,
        theta_star,
        theta,
        segments,
        first: lemma.first,
        second: lemma.second,
        transforms,
        full,
    })
}

/// An ordered pair of transforms on a W-glued diamond and the coupling it
/// induces.
#[derive(Clone, Debug)]
pub struct StrassenPair {
    pub lower: InverseTransform,
    pub upper: InverseTransform,
    pub coupling: crate::feasibility::PairCoupling,
    pub first: YRealization,
    pub second: YRealization,
}

/// Couples `p1 ⪯ p2` on a W-glued diamond by transforms `X1 <= X2`.
pub fn strassen_w_glued(s: &Poset, p1: &Measure, p2: &Measure) -> Result<StrassenPair> {
    let parts = DiamondParts::of(s)?;
    if !crate::measures::stoch_leq(s, p1, p2)? {
        return Err(Error::NotOrdered);
    }
    let chain = Poset::from_cover_edges(&["1", "2"], &[("1", "2")])?;
    let piece = |w: ElementSet| -> Result<MeasureSystem> {
        let q = rational::max(&p1.on(w), &p2.on(w));
        let mut m1 = Measure::zeros(s.len());
        let mut m2 = Measure::zeros(s.len());
        for y in w.iter() {
            m1.add_at(y, p1.mass(y));
            m2.add_at(y, p2.mass(y));
        }
        m1.add_at(parts.a, &(&q - p1.on(w)));
        m2.add_at(parts.d, &(&q - p2.on(w)));
        let y = s.induced(w.union(ElementSet::from_indices([parts.a, parts.d])));
        MeasureSystem::new(chain.clone(), y.clone(), vec![restrict_measure(s, &m1, &y), restrict_measure(s, &m2, &y)])
    };
    let y1 = piece(parts.wb)?;
    let y2 = piece(parts.wc)?;
    let w_prime = s.induced(parts.w_prime());
    let outer: Vec<Measure> = [p1, p2]
        .iter()
        .enumerate()
        .map(|(i, pm)| {
            let taken = extend_measure(s, y1.member(i), y1.support()).plus(&extend_measure(s, y2.member(i), y2.support()));
            pm.minus(&taken)
        })
        .collect();
    let rest = s.all().difference(parts.w_prime());
    if outer.iter().any(|x| !x.is_nonnegative() || !x.on(rest).is_zero()) {
        return Err(violated("outer measures are not supported on W_a + W_d"));
    }
    let outer = MeasureSystem::new(chain.clone(), w_prime.clone(), outer.iter().map(|x| restrict_measure(s, x, &w_prime)).collect())?;
    let name = |x: usize| s.name(x).to_string();
    let (a, b, c, d) = (name(parts.a), name(parts.b), name(parts.c), name(parts.d));
    let first = modified_rit_y(&y1, &a, &b, &d, None)?;
    let second = modified_rit_y(&y2, &a, &c, &d, None)?;
    let outer_r = crate::rit::w_class_realize(&outer, Some(w_prime.require(&d)?))?;
    let pair: Vec<InverseTransform> = (0..2)
        .map(|i| {
            InverseTransform::concat(&[
                rename_into(s, &first.transforms[i].modified, &first.support),
                rename_into(s, &second.transforms[i].modified, &second.support),
                rename_into(s, &outer_r.transforms[i], &w_prime),
            ])
        })
        .collect();
    let target = MeasureSystem::new(chain.clone(), s.clone(), vec![p1.clone(), p2.clone()])?;
    let n = s.len();
    if pair[0].pushforward(n) != *p1 || pair[1].pushforward(n) != *p2 {
        return Err(violated("coupling misses its marginals"));
    }
    if !pointwise_monotone(target.index(), s, &pair) {
        return Err(violated("coupling transforms are not ordered"));
    }
    let dist = crate::transform::family_to_distribution(&chain, s, &pair);
    let coupling = crate::feasibility::PairCoupling {
        weights: dist.weights().map(|(h, w)| ((h.image(0), h.image(1)), w.clone())).collect(),
    };
    let [lower, upper]: [InverseTransform; 2] = pair.try_into().unwrap();
    Ok(StrassenPair { lower, upper, coupling, first, second })
}

/// A system on a Y-glued bipartite, extended by the middle vertex of the
/// acyclic extension.
#[derive(Clone, Debug)]
pub struct BipartiteExtension {
    pub extension: crate::classify::Extension,
    /// Midpoints on the two pieces, before scaling.
    pub mid_first: Measure,
    pub mid_second: Measure,
    pub p_c: Q,
    pub theta: Q,
    /// `theta P + (1 - theta) I` on the old index plus the new midpoint,
    /// all on the extended poset.
    pub system: MeasureSystem,
}

fn midpoint(piece: &Poset, lower: &[Measure], upper: &[Measure]) -> Result<Measure> {
    use crate::lp::{LinearProgram, Relation};
    let n = piece.len();
    let mut lp = LinearProgram::new();
    let first = lp.add_vars(n);
    lp.add_constraint((0..n).map(|x| (first + x, rational::one())).collect(), Relation::Eq, rational::one());
    for &u in piece.up_sets() {
        if u.is_empty() || u == piece.all() {
            continue;
        }
        let coeffs: Vec<(usize, Q)> = u.iter().map(|x| (first + x, rational::one())).collect();
        for m in lower {
            lp.add_constraint(coeffs.clone(), Relation::Ge, m.on(u));
        }
        for m in upper {
            lp.add_constraint(coeffs.clone(), Relation::Le, m.on(u));
        }
    }
    let values = crate::lp::lp_feasible(&lp).ok_or(Error::MidpointInfeasible)?;
    Ok(Measure(values[first..first + n].to_vec()))
}

/// Extends a stochastically monotone system of probability measures on a
/// Y-glued bipartite to the acyclic extension. The index must contain the
/// bipartite; the result is indexed by the old index plus the new vertex.
pub fn extend_bipartite(system: &MeasureSystem) -> Result<BipartiteExtension> {
    let s = system.support();
    let ev = crate::classify::is_y_glued_bipartite(s).ok_or(Error::NotYGluedBipartite)?;
    if !system.is_probability() {
        return Err(violated("members must be probability measures"));
    }
    if !system_is_stoch_monotone(system)? {
        return Err(Error::NotStochasticallyMonotone);
    }
    let ext = ev.extension;
    let index = system.index();
    let member_of = |name: &String| system.member_by_name(name);
    let side = |piece: &Poset| -> Result<Measure> {
        let c = piece.require(&ext.c)?;
        let lift = |m: &Measure| {
            let mut out = Measure::zeros(piece.len());
            for y in 0..piece.len() {
                if y != c {
                    out.add_at(y, m.mass(s.require(piece.name(y)).unwrap()));
                }
            }
            let rest = rational::one() - out.total();
            out.add_at(c, &rest);
            out
        };
        let lower = ev.lower.iter().map(|x| member_of(x).map(lift)).collect::<Result<Vec<_>>>()?;
        let upper = ev.upper.iter().map(|x| member_of(x).map(lift)).collect::<Result<Vec<_>>>()?;
        midpoint(piece, &lower, &upper)
    };
    let mid_first = side(&ext.s1)?;
    let mid_second = side(&ext.s2)?;
    let off_c = |piece: &Poset, m: &Measure| {
        let c = piece.require(&ext.c).unwrap();
        m.total() - m.mass(c)
    };
    let p_c = off_c(&ext.s1, &mid_first) + off_c(&ext.s2, &mid_second);
    let one = rational::one();
    let theta = if p_c > one { &one / &p_c } else { one.clone() };

    let hat = &ext.s_hat;
    let c_hat = hat.require(&ext.c)?;
    let mut p_hat_c = Measure::zeros(hat.len());
    for (piece, m) in [(&ext.s1, &mid_first), (&ext.s2, &mid_second)] {
        for y in 0..piece.len() {
            if piece.name(y) != ext.c {
                p_hat_c.add_at(hat.require(piece.name(y))?, &(&theta * m.mass(y)));
            }
        }
    }
    p_hat_c.add_at(c_hat, &(&one - &theta * &p_c));

    let mut names: Vec<String> = index.names().to_vec();
    names.push(ext.c.clone());
    let index_hat = hat.induced(hat.set_by_names(&names)?);
    let members = (0..index_hat.len())
        .map(|alpha| {
            let name = index_hat.name(alpha);
            if name == ext.c {
                return Ok(p_hat_c.clone());
            }
            let m = system.member_by_name(name)?;
            let mut out = Measure::zeros(hat.len());
            for y in 0..s.len() {
                out.add_at(hat.require(s.name(y))?, &(&theta * m.mass(y)));
            }
            out.add_at(hat.require(name)?, &(&one - &theta));
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let extended = MeasureSystem::new(index_hat, hat.clone(), members)?;
    if !system_is_stoch_monotone(&extended)? {
        return Err(violated("extended system is not stochastically monotone"));
    }
    Ok(BipartiteExtension { extension: ext, mid_first, mid_second, p_c, theta, system: extended })
}

/// `theta` and a law on monotone maps realizing `theta P + (1 - theta) I`
/// for a transition kernel on a Y-glued bipartite.
pub fn y_glued_realize(system: &MeasureSystem) -> Result<(Q, crate::feasibility::MapDistribution)> {
    if system.index() != system.support() {
        return Err(violated("expected a transition kernel"));
    }
    let ext = extend_bipartite(system)?;
    let dist = crate::feasibility::realize_acyclic(&ext.system)?
        .restrict_index(system.index())?
        .map_support(system.support())?;
    let target = crate::measures::weak_combination(system, &ext.theta)?;
    if !crate::feasibility::certify_realization(&target, &dist) {
        return Err(violated("restricted law does not realize the weak combination"));
    }
    Ok((ext.theta, dist))
}
