//! Finite posets stored as cover relations plus their order closure.
//!
//! Elements are opaque string identifiers kept in lexicographic order; every
//! index-based API below refers to that order, so all enumerations are
//! deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Upper limit on enumerated monotone maps unless a caller overrides it.
pub const DEFAULT_MAP_BOUND: usize = 250_000;

/// A subset of poset elements, as a bitmask over element indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElementSet(pub u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub fn full(n: usize) -> Self {
        if n == 64 {
            ElementSet(u64::MAX)
        } else {
            ElementSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        ElementSet(1u64 << i)
    }

    pub fn from_indices(items: impl IntoIterator<Item = usize>) -> Self {
        let mut s = ElementSet::EMPTY;
        for i in items {
            s.insert(i);
        }
        s
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u64 << i);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        ElementSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ElementSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        ElementSet(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> Self {
        ElementSet::full(n).difference(self)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A monotone map between two posets, stored as the image index of each
/// domain element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonotoneMap(pub Vec<usize>);

impl MonotoneMap {
    pub fn identity(n: usize) -> Self {
        MonotoneMap((0..n).collect())
    }

    pub fn image(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn compose(&self, then: &MonotoneMap) -> MonotoneMap {
        MonotoneMap(self.0.iter().map(|&y| then.0[y]).collect())
    }
}

#[derive(Clone)]
pub struct Poset {
    names: Vec<String>,
    covers: Vec<(usize, usize)>,
    up: Vec<ElementSet>,
    down: Vec<ElementSet>,
    up_sets: OnceLock<Vec<ElementSet>>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.covers == other.covers
    }
}

impl Eq for Poset {}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<String> = self
            .covers
            .iter()
            .map(|&(x, y)| format!("{}<{}", self.names[x], self.names[y]))
            .collect();
        write!(f, "Poset{{{}; {}}}", self.names.join(" "), covers.join(" "))
    }
}

impl Poset {
    /// Builds a poset from its Hasse diagram. Covers must form an acyclic
    /// relation with no pair implied by the others.
    pub fn from_cover_edges<S: AsRef<str>, T: AsRef<str>>(
        elements: &[S],
        covers: &[(T, T)],
    ) -> Result<Poset> {
        let mut names: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        names.sort();
        for w in names.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateElement(w[0].clone()));
            }
        }
        if names.len() > 64 {
            return Err(Error::TooLarge(names.len()));
        }
        let index: BTreeMap<&str, usize> =
            names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownElement(s.to_string()))
        };
        let mut edges = Vec::with_capacity(covers.len());
        for (x, y) in covers {
            edges.push((lookup(x.as_ref())?, lookup(y.as_ref())?));
        }
        let n = names.len();
        for &(x, y) in &edges {
            if x == y {
                return Err(Error::DirectedCycle(names[x].clone()));
            }
        }

        // Kahn's algorithm both orders the elements and detects cycles.
        let mut succ = vec![Vec::new(); n];
        let mut indegree = vec![0usize; n];
        for &(x, y) in &edges {
            succ[x].push(y);
            indegree[y] += 1;
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(x) = queue.pop() {
            topo.push(x);
            for &y in &succ[x] {
                indegree[y] -= 1;
                if indegree[y] == 0 {
                    queue.push(y);
                }
            }
        }
        if topo.len() < n {
            let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap();
            return Err(Error::DirectedCycle(names[stuck].clone()));
        }

        let mut up = vec![ElementSet::EMPTY; n];
        for &x in topo.iter().rev() {
            let mut set = ElementSet::singleton(x);
            for &y in &succ[x] {
                set = set.union(up[y]);
            }
            up[x] = set;
        }

        let mut sorted = edges.clone();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::RedundantCover(
                    names[w[0].0].clone(),
                    names[w[0].1].clone(),
                ));
            }
        }
        let poset = Poset::from_up_closures(names, up);
        if poset.covers != sorted {
            let redundant = sorted
                .iter()
                .find(|e| poset.covers.binary_search(e).is_err())
                .unwrap();
            return Err(Error::RedundantCover(
                poset.names[redundant.0].clone(),
                poset.names[redundant.1].clone(),
            ));
        }
        Ok(poset)
    }

    /// Builds a poset from sorted names and a valid up-closure table.
    fn from_up_closures(names: Vec<String>, up: Vec<ElementSet>) -> Poset {
        let n = names.len();
        let mut down = vec![ElementSet::EMPTY; n];
        for (x, set) in up.iter().enumerate() {
            for y in set.iter() {
                down[y].insert(x);
            }
        }
        let mut covers = Vec::new();
        for x in 0..n {
            let mut strict_up = up[x];
            strict_up.remove(x);
            for y in strict_up.iter() {
                let mut strict_down = down[y];
                strict_down.remove(y);
                if strict_up.intersection(strict_down).is_empty() {
                    covers.push((x, y));
                }
            }
        }
        covers.sort();
        Poset {
            names,
            covers,
            up,
            down,
            up_sets: OnceLock::new(),
        }
    }

    /// Builds a poset from element names (any order) and a strict order
    /// predicate that is already transitive and antisymmetric.
    pub(crate) fn from_relation(
        names: Vec<String>,
        leq: impl Fn(usize, usize) -> bool,
    ) -> Poset {
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by(|&i, &j| names[i].cmp(&names[j]));
        let sorted: Vec<String> = order.iter().map(|&i| names[i].clone()).collect();
        let n = sorted.len();
        let mut up = vec![ElementSet::EMPTY; n];
        for (x, &ox) in order.iter().enumerate() {
            for (y, &oy) in order.iter().enumerate() {
                if x == y || leq(ox, oy) {
                    up[x].insert(y);
                }
            }
        }
        Poset::from_up_closures(sorted, up)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|s| s.as_str().cmp(name)).ok()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn cover_names(&self) -> Vec<(String, String)> {
        self.covers
            .iter()
            .map(|&(x, y)| (self.names[x].clone(), self.names[y].clone()))
            .collect()
    }

    pub fn all(&self) -> ElementSet {
        ElementSet::full(self.len())
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// `{y : x <= y}`
    pub fn up_of(&self, x: usize) -> ElementSet {
        self.up[x]
    }

    /// `{y : y <= x}`
    pub fn down_of(&self, x: usize) -> ElementSet {
        self.down[x]
    }

    pub fn covers_edge(&self, x: usize, y: usize) -> bool {
        self.covers.binary_search(&(x, y)).is_ok()
    }

    pub fn upper_covers(&self, x: usize) -> Vec<usize> {
        self.covers.iter().filter(|e| e.0 == x).map(|e| e.1).collect()
    }

    pub fn lower_covers(&self, x: usize) -> Vec<usize> {
        self.covers.iter().filter(|e| e.1 == x).map(|e| e.0).collect()
    }

    /// Hasse-diagram neighbours, ignoring direction.
    pub fn neighbors(&self, x: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .covers
            .iter()
            .filter_map(|&(a, b)| {
                if a == x {
                    Some(b)
                } else if b == x {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort();
        out
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.down[x].len() == 1).collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.up[x].len() == 1).collect()
    }

    pub fn minimum(&self) -> Option<usize> {
        (0..self.len()).find(|&x| self.up[x] == self.all())
    }

    pub fn maximum(&self) -> Option<usize> {
        (0..self.len()).find(|&x| self.down[x] == self.all())
    }

    pub fn up_closure(&self, set: ElementSet) -> ElementSet {
        set.iter().fold(ElementSet::EMPTY, |acc, x| acc.union(self.up[x]))
    }

    pub fn down_closure(&self, set: ElementSet) -> ElementSet {
        set.iter().fold(ElementSet::EMPTY, |acc, x| acc.union(self.down[x]))
    }

    pub fn is_up_set(&self, set: ElementSet) -> bool {
        self.up_closure(set) == set
    }

    pub fn is_down_set(&self, set: ElementSet) -> bool {
        self.down_closure(set) == set
    }

    /// Connected components of the Hasse diagram restricted to `within`,
    /// each as an element set, in order of their smallest element.
    pub fn components_within(&self, within: ElementSet, edges: &[(usize, usize)]) -> Vec<ElementSet> {
        let mut seen = ElementSet::EMPTY;
        let mut out = Vec::new();
        for start in within.iter() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = ElementSet::singleton(start);
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &(a, b) in edges {
                    let other = if a == x {
                        b
                    } else if b == x {
                        a
                    } else {
                        continue;
                    };
                    if within.contains(other) && !comp.contains(other) {
                        comp.insert(other);
                        stack.push(other);
                    }
                }
            }
            seen = seen.union(comp);
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.len() <= 1 || self.components_within(self.all(), &self.covers).len() == 1
    }

    /// All up-sets, including the empty set and the whole poset, ordered by
    /// size and then by sorted element indices.
    pub fn up_sets(&self) -> &[ElementSet] {
        self.up_sets.get_or_init(|| {
            let mut out = Vec::new();
            let order: Vec<usize> = (0..self.len()).collect();
            self.antichains_from(&order, 0, ElementSet::EMPTY, &mut out);
            out.sort_by_key(|s| (s.len(), s.iter().collect::<Vec<_>>()));
            out
        })
    }

    // Every up-set is the up-closure of its minimal elements, an antichain.
    fn antichains_from(
        &self,
        order: &[usize],
        start: usize,
        chosen: ElementSet,
        out: &mut Vec<ElementSet>,
    ) {
        out.push(self.up_closure(chosen));
        for k in start..order.len() {
            let x = order[k];
            if chosen.iter().all(|y| !self.comparable(x, y)) {
                let mut next = chosen;
                next.insert(x);
                self.antichains_from(order, k + 1, next, out);
            }
        }
    }

    pub fn down_sets(&self) -> Vec<ElementSet> {
        let n = self.len();
        let mut out: Vec<ElementSet> = self.up_sets().iter().map(|u| u.complement(n)).collect();
        out.sort_by_key(|s| (s.len(), s.iter().collect::<Vec<_>>()));
        out
    }

    /// The subposet on `subset` with the restricted order. Its covers are
    /// recomputed, so they can differ from the restricted Hasse diagram.
    pub fn induced(&self, subset: ElementSet) -> Poset {
        let keep: Vec<usize> = subset.iter().filter(|&x| x < self.len()).collect();
        let names = keep.iter().map(|&x| self.names[x].clone()).collect();
        Poset::from_relation(names, |i, j| self.leq(keep[i], keep[j]))
    }

    pub fn induced_by_names<S: AsRef<str>>(&self, subset: &[S]) -> Result<Poset> {
        let mut set = ElementSet::EMPTY;
        for s in subset {
            set.insert(self.require(s.as_ref())?);
        }
        Ok(self.induced(set))
    }

    pub fn set_by_names<S: AsRef<str>>(&self, subset: &[S]) -> Result<ElementSet> {
        let mut set = ElementSet::EMPTY;
        for s in subset {
            set.insert(self.require(s.as_ref())?);
        }
        Ok(set)
    }

    pub fn set_names(&self, set: ElementSet) -> Vec<String> {
        set.iter().map(|x| self.names[x].clone()).collect()
    }

    pub fn dual(&self) -> Poset {
        Poset::from_up_closures(self.names.clone(), self.down.clone())
    }

    /// Union of two Hasse diagrams sharing exactly one vertex.
    pub fn glue(&self, other: &Poset, shared: &str) -> Result<Poset> {
        let common: Vec<&String> = self
            .names
            .iter()
            .filter(|s| other.index_of(s).is_some())
            .collect();
        if common.len() != 1 || common[0] != shared {
            return Err(Error::BadIntersection(common.len()));
        }
        let mut names: Vec<String> = self.names.clone();
        names.extend(other.names.iter().filter(|s| *s != shared).cloned());
        let mut covers = self.cover_names();
        covers.extend(other.cover_names());
        Poset::from_cover_edges(&names, &covers)
    }

    /// A copy with every element renamed through `rename`.
    pub fn relabel(&self, rename: impl Fn(&str) -> String) -> Result<Poset> {
        let names: Vec<String> = self.names.iter().map(|s| rename(s)).collect();
        let covers: Vec<(String, String)> = self
            .covers
            .iter()
            .map(|&(x, y)| (names[x].clone(), names[y].clone()))
            .collect();
        Poset::from_cover_edges(&names, &covers)
    }

    /// All order embeddings of `pattern` onto induced subposets of `self`.
    /// Each embedding lists the image of every pattern element; the list is
    /// in lexicographic order of those images.
    pub fn find_induced(&self, pattern: &Poset) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if pattern.len() <= self.len() {
            let mut image = Vec::with_capacity(pattern.len());
            self.embed_from(pattern, &mut image, ElementSet::EMPTY, &mut out, usize::MAX);
        }
        out
    }

    pub fn contains_induced(&self, pattern: &Poset) -> bool {
        let mut out = Vec::new();
        if pattern.len() <= self.len() {
            let mut image = Vec::with_capacity(pattern.len());
            self.embed_from(pattern, &mut image, ElementSet::EMPTY, &mut out, 1);
        }
        !out.is_empty()
    }

    fn embed_from(
        &self,
        pattern: &Poset,
        image: &mut Vec<usize>,
        used: ElementSet,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        let p = image.len();
        if p == pattern.len() {
            out.push(image.clone());
            return;
        }
        for y in 0..self.len() {
            if used.contains(y) {
                continue;
            }
            let fits = image.iter().enumerate().all(|(q, &z)| {
                pattern.leq(q, p) == self.leq(z, y) && pattern.leq(p, q) == self.leq(y, z)
            });
            if fits {
                image.push(y);
                let mut next = used;
                next.insert(y);
                self.embed_from(pattern, image, next, out, limit);
                image.pop();
            }
        }
    }

    pub fn is_isomorphic(&self, other: &Poset) -> bool {
        self.len() == other.len()
            && self.covers.len() == other.covers.len()
            && self.contains_induced(other)
    }

    /// A linear extension of the order (every element after all elements
    /// below it), smallest index first among available elements.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut placed = ElementSet::EMPTY;
        let mut out = Vec::with_capacity(self.len());
        while out.len() < self.len() {
            let next = (0..self.len())
                .find(|&x| !placed.contains(x) && self.down[x].difference(placed) == ElementSet::singleton(x))
                .unwrap();
            placed.insert(next);
            out.push(next);
        }
        out
    }

    pub fn is_monotone(&self, codomain: &Poset, map: &[usize]) -> bool {
        map.len() == self.len()
            && self
                .covers
                .iter()
                .all(|&(x, y)| codomain.leq(map[x], map[y]))
    }
}

/// Every monotone map from `domain` to `codomain` in lexicographic order of
/// the image vectors. Fails with `SizeLimit` once more than `bound` maps
/// would be produced.
pub fn monotone_maps(domain: &Poset, codomain: &Poset, bound: usize) -> Result<Vec<MonotoneMap>> {
    monotone_maps_within(domain, codomain, &vec![codomain.all(); domain.len()], bound)
}

/// Monotone maps with `h(x)` in `targets[x]` for every `x`.
pub fn monotone_maps_within(
    domain: &Poset,
    codomain: &Poset,
    targets: &[ElementSet],
    bound: usize,
) -> Result<Vec<MonotoneMap>> {
    let order = domain.linear_extension();
    let mut image = vec![usize::MAX; domain.len()];
    let mut out = Vec::new();
    monotone_from(domain, codomain, targets, &order, 0, &mut image, &mut out, bound)?;
    out.sort();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn monotone_from(
    domain: &Poset,
    codomain: &Poset,
    targets: &[ElementSet],
    order: &[usize],
    k: usize,
    image: &mut Vec<usize>,
    out: &mut Vec<MonotoneMap>,
    bound: usize,
) -> Result<()> {
    if k == order.len() {
        if out.len() >= bound {
            return Err(Error::SizeLimit { bound });
        }
        out.push(MonotoneMap(image.clone()));
        return Ok(());
    }
    let x = order[k];
    // Elements placed earlier are never above x, so only lower bounds apply.
    let mut allowed = targets[x];
    for &z in &order[..k] {
        if domain.leq(z, x) {
            allowed = allowed.intersection(codomain.up_of(image[z]));
        }
    }
    for y in allowed.iter() {
        image[x] = y;
        monotone_from(domain, codomain, targets, order, k + 1, image, out, bound)?;
    }
    image[x] = usize::MAX;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(names: &[&str]) -> Poset {
        let covers: Vec<(&str, &str)> = names.windows(2).map(|w| (w[0], w[1])).collect();
        Poset::from_cover_edges(names, &covers).unwrap()
    }

    fn diamond() -> Poset {
        Poset::from_cover_edges(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")],
        )
        .unwrap()
    }

    #[test]
    fn builds_the_diamond() {
        let p = diamond();
        assert_eq!(p.len(), 4);
        assert!(p.lt(0, 3));
        assert!(!p.comparable(1, 2));
        assert!(p.is_connected());
    }

    #[test]
    fn singleton_poset() {
        let p = Poset::from_cover_edges(&["x"], &[] as &[(&str, &str)]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.up_sets().len(), 2);
    }

    #[test]
    fn rejects_cycles_redundancy_and_unknowns() {
        assert!(matches!(
            Poset::from_cover_edges(&["a", "b"], &[("a", "b"), ("b", "a")]),
            Err(Error::DirectedCycle(_))
        ));
        assert!(matches!(
            Poset::from_cover_edges(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]),
            Err(Error::RedundantCover(x, y)) if x == "a" && y == "c"
        ));
        assert!(matches!(
            Poset::from_cover_edges(&["a"], &[("a", "z")]),
            Err(Error::UnknownElement(z)) if z == "z"
        ));
        assert!(matches!(
            Poset::from_cover_edges(&["a", "a"], &[] as &[(&str, &str)]),
            Err(Error::DuplicateElement(_))
        ));
    }

    #[test]
    fn chain_up_sets_are_suffixes() {
        let p = chain(&["a", "b"]);
        let ups = p.up_sets();
        assert_eq!(ups, &[ElementSet::EMPTY, ElementSet::singleton(1), p.all()]);
    }

    #[test]
    fn induced_recomputes_covers() {
        let p = diamond();
        let q = p.induced_by_names(&["a", "b", "d"]).unwrap();
        assert_eq!(q, chain(&["a", "b", "d"]));
    }

    #[test]
    fn dual_reverses_and_is_an_involution() {
        let p = chain(&["a", "b"]);
        let d = p.dual();
        assert!(d.lt(1, 0));
        assert_eq!(d.dual(), p);
    }

    #[test]
    fn glue_two_chains() {
        let p = chain(&["a", "c"]);
        let q = chain(&["c", "b"]);
        let g = p.glue(&q, "c").unwrap();
        assert_eq!(
            g,
            Poset::from_cover_edges(&["a", "b", "c"], &[("a", "c"), ("c", "b")]).unwrap()
        );
        let r = chain(&["a", "c", "b"]);
        assert!(matches!(p.glue(&r, "c"), Err(Error::BadIntersection(2))));
    }

    #[test]
    fn diamond_embeds_twice_in_itself() {
        let p = diamond();
        assert_eq!(p.find_induced(&p), vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]]);
    }

    #[test]
    fn monotone_maps_on_small_chains() {
        let c2 = chain(&["a", "b"]);
        assert_eq!(monotone_maps(&c2, &c2, 100).unwrap().len(), 3);
        let one = Poset::from_cover_edges(&["x"], &[] as &[(&str, &str)]).unwrap();
        assert_eq!(monotone_maps(&one, &diamond(), 100).unwrap().len(), 4);
        assert!(matches!(
            monotone_maps(&c2, &c2, 2),
            Err(Error::SizeLimit { bound: 2 })
        ));
    }
}
