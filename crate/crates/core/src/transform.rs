//! Piecewise-constant maps on half-open rational intervals.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::feasibility::MapDistribution;
use crate::measures::Measure;
use crate::poset::{MonotoneMap, Poset};
use crate::rational::{self, Q};

/// A finite union of disjoint half-open intervals `[start, end)`, kept
/// sorted with touching pieces merged and empty pieces dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalSet(Vec<(Q, Q)>);

impl IntervalSet {
    pub fn new(pieces: impl IntoIterator<Item = (Q, Q)>) -> IntervalSet {
        let mut pieces: Vec<(Q, Q)> = pieces.into_iter().filter(|(s, e)| s < e).collect();
        pieces.sort();
        let mut out: Vec<(Q, Q)> = Vec::with_capacity(pieces.len());
        for (s, e) in pieces {
            match out.last_mut() {
                Some(last) if s <= last.1 => {
                    if e > last.1 {
                        last.1 = e;
                    }
                }
                _ => out.push((s, e)),
            }
        }
        IntervalSet(out)
    }

    pub fn interval(start: Q, end: Q) -> IntervalSet {
        IntervalSet::new([(start, end)])
    }

    pub fn pieces(&self) -> &[(Q, Q)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn length(&self) -> Q {
        self.0.iter().map(|(s, e)| e - s).sum()
    }

    pub fn contains(&self, omega: &Q) -> bool {
        self.0.iter().any(|(s, e)| s <= omega && omega < e)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::new(self.0.iter().chain(&other.0).cloned())
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for (s1, e1) in &self.0 {
            for (s2, e2) in &other.0 {
                let s = rational::max(s1, s2);
                let e = rational::min(e1, e2);
                if s < e {
                    out.push((s, e));
                }
            }
        }
        IntervalSet::new(out)
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.intersection(other) == *self
    }

    pub fn shifted(&self, offset: &Q) -> IntervalSet {
        IntervalSet(self.0.iter().map(|(s, e)| (s + offset, e + offset)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: Q,
    pub end: Q,
    pub value: usize,
}

/// A map from `[0, length)` to poset elements, constant on each segment.
/// Segments partition the domain, are nonempty, and adjacent segments carry
/// different values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseTransform {
    length: Q,
    segments: Vec<Segment>,
}

impl InverseTransform {
    /// Builds a transform from pieces that tile `[0, length)` in order.
    /// Empty pieces are dropped and equal neighbours merged.
    pub fn from_pieces(length: Q, pieces: impl IntoIterator<Item = (Q, Q, usize)>) -> Result<InverseTransform> {
        let mut segments: Vec<Segment> = Vec::new();
        let mut cursor = Q::zero();
        for (start, end, value) in pieces {
            if start != cursor || end < start {
                return Err(Error::HypothesisViolated(format!(
                    "transform pieces do not tile the domain at {}",
                    rational::format(&start)
                )));
            }
            cursor = end.clone();
            if start == end {
                continue;
            }
            match segments.last_mut() {
                Some(last) if last.value == value => last.end = end,
                _ => segments.push(Segment { start, end, value }),
            }
        }
        if cursor != length {
            return Err(Error::HypothesisViolated("transform pieces do not cover the domain".into()));
        }
        Ok(InverseTransform { length, segments })
    }

    pub fn constant(length: Q, value: usize) -> InverseTransform {
        let segments = if length.is_positive() {
            vec![Segment { start: Q::zero(), end: length.clone(), value }]
        } else {
            Vec::new()
        };
        InverseTransform { length, segments }
    }

    pub fn length(&self) -> &Q {
        &self.length
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Value at `omega`, which must lie in `[0, length)`.
    pub fn value_at(&self, omega: &Q) -> usize {
        let k = self.segments.partition_point(|s| s.end <= *omega);
        self.segments[k].value
    }

    pub fn preimage(&self, x: usize) -> IntervalSet {
        IntervalSet::new(
            self.segments
                .iter()
                .filter(|s| s.value == x)
                .map(|s| (s.start.clone(), s.end.clone())),
        )
    }

    /// Lengths of all preimages, as a measure on `n` elements.
    pub fn pushforward(&self, n: usize) -> Measure {
        let mut m = Measure::zeros(n);
        for s in &self.segments {
            m.add_at(s.value, &(&s.end - &s.start));
        }
        m
    }

    pub fn shifted(&self, offset: &Q) -> Vec<(Q, Q, usize)> {
        self.segments
            .iter()
            .map(|s| (&s.start + offset, &s.end + offset, s.value))
            .collect()
    }

    /// Places the transforms one after another.
    pub fn concat(parts: &[InverseTransform]) -> InverseTransform {
        let mut pieces = Vec::new();
        let mut offset = Q::zero();
        for part in parts {
            pieces.extend(part.shifted(&offset));
            offset += &part.length;
        }
        InverseTransform::from_pieces(offset, pieces).expect("concatenation tiles its domain")
    }

    /// Renames every value through `rename`.
    pub fn map_values(&self, rename: impl Fn(usize) -> usize) -> InverseTransform {
        let pieces: Vec<(Q, Q, usize)> =
            self.segments.iter().map(|s| (s.start.clone(), s.end.clone(), rename(s.value))).collect();
        InverseTransform::from_pieces(self.length.clone(), pieces).expect("renaming keeps the tiling")
    }

    /// Sends `from` to `to` on `set`, which must lie inside the preimage of
    /// `from`.
    pub fn reassign(&self, set: &IntervalSet, from: usize, to: usize) -> Result<InverseTransform> {
        if !set.is_subset(&self.preimage(from)) {
            return Err(Error::HypothesisViolated(
                "replacement set leaves the preimage it modifies".into(),
            ));
        }
        let mut cuts: BTreeSet<Q> = self.segments.iter().map(|s| s.start.clone()).collect();
        for (s, e) in set.pieces() {
            cuts.insert(s.clone());
            cuts.insert(e.clone());
        }
        cuts.insert(self.length.clone());
        let cuts: Vec<Q> = cuts.into_iter().filter(|c| *c <= self.length).collect();
        let pieces: Vec<(Q, Q, usize)> = cuts
            .windows(2)
            .map(|w| {
                let v = self.value_at(&w[0]);
                let v = if v == from && set.contains(&w[0]) { to } else { v };
                (w[0].clone(), w[1].clone(), v)
            })
            .collect();
        InverseTransform::from_pieces(self.length.clone(), pieces)
    }
}

/// Left endpoints of the common refinement of equally long transforms.
pub fn common_breakpoints(transforms: &[InverseTransform]) -> Vec<Q> {
    let mut cuts: BTreeSet<Q> = BTreeSet::new();
    for t in transforms {
        for s in t.segments() {
            cuts.insert(s.start.clone());
        }
    }
    cuts.into_iter().collect()
}

/// `X_alpha(omega) <= X_beta(omega)` whenever `alpha <= beta`, checked on
/// every piece of the common refinement.
pub fn pointwise_monotone(index: &Poset, support: &Poset, transforms: &[InverseTransform]) -> bool {
    if transforms.len() != index.len() {
        return false;
    }
    if let Some(first) = transforms.first() {
        if transforms.iter().any(|t| t.length() != first.length()) {
            return false;
        }
    }
    common_breakpoints(transforms).iter().all(|omega| {
        index
            .covers()
            .iter()
            .all(|&(a, b)| support.leq(transforms[a].value_at(omega), transforms[b].value_at(omega)))
    })
}

/// The law of `(X_alpha)` under Lebesgue measure, read off the common
/// refinement.
pub fn family_to_distribution(index: &Poset, support: &Poset, transforms: &[InverseTransform]) -> MapDistribution {
    let mut dist = MapDistribution::new(index.clone(), support.clone());
    let Some(first) = transforms.first() else {
        return dist;
    };
    let mut cuts = common_breakpoints(transforms);
    cuts.push(first.length().clone());
    for w in cuts.windows(2) {
        let image = transforms.iter().map(|t| t.value_at(&w[0])).collect();
        dist.add(MonotoneMap(image), &w[1] - &w[0]);
    }
    dist
}

pub fn format_transform(t: &InverseTransform, support: &Poset) -> String {
    t.segments()
        .iter()
        .map(|s| {
            format!(
                "[{}, {}) -> {}",
                rational::format(&s.start),
                rational::format(&s.end),
                support.name(s.value)
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}
