//! Poset subclasses and the monotonicity-equivalence verdict.

use crate::catalog;
use crate::error::{Error, Result};
use crate::poset::{ElementSet, Poset};

/// Whether the Hasse diagram, as an undirected graph, is a forest.
pub fn is_acyclic(p: &Poset) -> bool {
    let components = p.components_within(p.all(), p.covers()).len();
    p.covers().len() + components == p.len()
}

pub fn is_y_class(p: &Poset) -> bool {
    is_acyclic(p) && !p.contains_induced(&catalog::bowtie())
}

pub fn is_w_class(p: &Poset) -> bool {
    let y = catalog::y_poset();
    is_y_class(p) && !p.contains_induced(&y) && !p.contains_induced(&y.dual())
}

/// A complete bipartite subgraph of the Hasse diagram: every element of
/// `upper` covers every element of `lower`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartite {
    pub lower: ElementSet,
    pub upper: ElementSet,
}

fn common_upper_covers(p: &Poset, lower: ElementSet) -> ElementSet {
    let mut out = p.all();
    for x in lower.iter() {
        out = out.intersection(ElementSet::from_indices(p.upper_covers(x)));
    }
    out
}

fn common_lower_covers(p: &Poset, upper: ElementSet) -> ElementSet {
    let mut out = p.all();
    for y in upper.iter() {
        out = out.intersection(ElementSet::from_indices(p.lower_covers(y)));
    }
    out
}

/// Every maximal complete bipartite Hasse subgraph with at least two
/// elements on each side, sorted.
pub fn maximal_bipartites(p: &Poset) -> Vec<Bipartite> {
    // Maximal bicliques of the cover relation are its formal concepts; their
    // lower sides are the intersections of lower-cover sets.
    let mut extents: Vec<ElementSet> = (0..p.len())
        .map(|y| ElementSet::from_indices(p.lower_covers(y)))
        .filter(|s| s.len() >= 2)
        .collect();
    extents.sort();
    extents.dedup();
    let mut frontier = extents.clone();
    while !frontier.is_empty() {
        let mut fresh = Vec::new();
        for &s in &frontier {
            for &t in &extents {
                let meet = s.intersection(t);
                if meet.len() >= 2 && extents.binary_search(&meet).is_err() && !fresh.contains(&meet) {
                    fresh.push(meet);
                }
            }
        }
        extents.extend(fresh.iter().copied());
        extents.sort();
        frontier = fresh;
    }
    let mut out: Vec<Bipartite> = extents
        .into_iter()
        .filter_map(|lower| {
            let upper = common_upper_covers(p, lower);
            (upper.len() >= 2 && common_lower_covers(p, upper) == lower)
                .then_some(Bipartite { lower, upper })
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Result of replacing a bipartite subgraph by a fresh middle vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub s_hat: Poset,
    pub s1: Poset,
    pub s2: Poset,
    /// Name of the inserted vertex.
    pub c: String,
}

pub fn fresh_name(p: &Poset, base: &str) -> String {
    if p.index_of(base).is_none() {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|s| p.index_of(s).is_none())
        .unwrap()
}

/// Removes the edges of `bipartite` and inserts a new vertex `c` with every
/// lower element below it and every upper element above it.
pub fn algorithm_ext(p: &Poset, bipartite: Bipartite) -> Result<Extension> {
    if !maximal_bipartites(p).contains(&bipartite) {
        return Err(Error::NotMaximalBipartite);
    }
    Ok(extend_unchecked(p, bipartite))
}

fn extend_unchecked(p: &Poset, bipartite: Bipartite) -> Extension {
    let c = fresh_name(p, "c");
    let mut names: Vec<String> = p.names().to_vec();
    names.push(c.clone());
    let mut covers: Vec<(String, String)> = p
        .covers()
        .iter()
        .filter(|&&(x, y)| !(bipartite.lower.contains(x) && bipartite.upper.contains(y)))
        .map(|&(x, y)| (p.name(x).to_string(), p.name(y).to_string()))
        .collect();
    for x in bipartite.lower.iter() {
        covers.push((p.name(x).to_string(), c.clone()));
    }
    for y in bipartite.upper.iter() {
        covers.push((c.clone(), p.name(y).to_string()));
    }
    let s_hat = Poset::from_cover_edges(&names, &covers).expect("extension keeps a valid diagram");
    let ci = s_hat.index_of(&c).unwrap();
    let rest = s_hat.all().difference(ElementSet::singleton(ci));
    let components = s_hat.components_within(rest, s_hat.covers());
    let side = |members: ElementSet| {
        let mut set = ElementSet::singleton(ci);
        for comp in &components {
            if comp.iter().any(|x| members.contains(x)) {
                set = set.union(*comp);
            }
        }
        s_hat.induced(set)
    };
    let rename = |set: ElementSet| {
        ElementSet::from_indices(set.iter().map(|x| s_hat.index_of(p.name(x)).unwrap()))
    };
    let s1 = side(rename(bipartite.lower));
    let s2 = side(rename(bipartite.upper));
    Extension { s_hat, s1, s2, c }
}

/// Whether `p` is an induced subposet of some acyclic poset. Decided by
/// repeatedly replacing maximal bipartite subgraphs with a middle vertex
/// and searching over all replacement orders.
pub fn has_acyclic_extension(p: &Poset) -> bool {
    if is_acyclic(p) {
        return true;
    }
    maximal_bipartites(p)
        .into_iter()
        .any(|b| has_acyclic_extension(&extend_unchecked(p, b).s_hat))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YGluedEvidence {
    pub bipartite: Bipartite,
    pub lower: Vec<String>,
    pub upper: Vec<String>,
    pub extension: Extension,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiamondLabels {
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WGluedEvidence {
    pub diamond: DiamondLabels,
    /// Components left after deleting the diamond edges, each containing
    /// `a`, `b`, `c`, `d` respectively.
    pub components: [Vec<String>; 4],
}

/// The first violated condition for a poset outside all three classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BipartiteCount(usize),
    PieceNotYClass { piece: Vec<String> },
    DiamondCount(usize),
    ForbiddenPattern(&'static str),
    DiamondEdgeNotCover(String, String),
    ComponentNotWClass { component: Vec<String> },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::BipartiteCount(k) => write!(f, "{k} maximal bipartite subgraphs (need exactly 1)"),
            Violation::PieceNotYClass { piece } => write!(f, "split piece {{{}}} is not in Y-class", piece.join(" ")),
            Violation::DiamondCount(k) => write!(f, "{k} induced diamonds (need exactly 1)"),
            Violation::ForbiddenPattern(name) => write!(f, "contains an induced {name}"),
            Violation::DiamondEdgeNotCover(x, y) => write!(f, "diamond pair {x} < {y} is not a cover"),
            Violation::ComponentNotWClass { component } => {
                write!(f, "component {{{}}} is not in W-class", component.join(" "))
            }
        }
    }
}

pub fn y_glued_bipartite(p: &Poset) -> std::result::Result<YGluedEvidence, Violation> {
    let bipartites = maximal_bipartites(p);
    if bipartites.len() != 1 {
        return Err(Violation::BipartiteCount(bipartites.len()));
    }
    let bipartite = bipartites[0];
    let extension = extend_unchecked(p, bipartite);
    for piece in [&extension.s1, &extension.s2] {
        if !is_y_class(piece) {
            return Err(Violation::PieceNotYClass { piece: piece.names().to_vec() });
        }
    }
    Ok(YGluedEvidence {
        bipartite,
        lower: p.set_names(bipartite.lower),
        upper: p.set_names(bipartite.upper),
        extension,
    })
}

pub fn is_y_glued_bipartite(p: &Poset) -> Option<YGluedEvidence> {
    if is_acyclic(p) || !has_acyclic_extension(p) {
        return None;
    }
    y_glued_bipartite(p).ok()
}

/// Induced diamonds, one embedding `[a, b, c, d]` per unlabeled copy
/// (the one with `b < c` by index).
pub fn diamonds(p: &Poset) -> Vec<[usize; 4]> {
    p.find_induced(&catalog::diamond())
        .into_iter()
        .filter(|e| e[1] < e[2])
        .map(|e| [e[0], e[1], e[2], e[3]])
        .collect()
}

pub fn w_glued_diamond(p: &Poset) -> std::result::Result<WGluedEvidence, Violation> {
    let found = diamonds(p);
    if found.len() != 1 {
        return Err(Violation::DiamondCount(found.len()));
    }
    let [a, b, c, d] = found[0];
    let s1 = catalog::s1();
    for (name, pattern) in [
        ("S1", s1.clone()),
        ("dual S1", s1.dual()),
        ("S4-hat", catalog::s4_hat()),
    ] {
        if p.contains_induced(&pattern) {
            return Err(Violation::ForbiddenPattern(name));
        }
    }
    let arcs = [(a, b), (a, c), (b, d), (c, d)];
    for &(x, y) in &arcs {
        if !p.covers_edge(x, y) {
            return Err(Violation::DiamondEdgeNotCover(p.name(x).into(), p.name(y).into()));
        }
    }
    let edges: Vec<(usize, usize)> =
        p.covers().iter().copied().filter(|e| !arcs.contains(e)).collect();
    let components = p.components_within(p.all(), &edges);
    for comp in &components {
        let members = p.set_names(*comp);
        if [a, b, c, d].iter().filter(|&&v| comp.contains(v)).count() != 1 {
            return Err(Violation::ComponentNotWClass { component: members });
        }
        if !is_w_class(&p.induced(*comp)) {
            return Err(Violation::ComponentNotWClass { component: members });
        }
    }
    let of = |v: usize| p.set_names(*components.iter().find(|s| s.contains(v)).unwrap());
    Ok(WGluedEvidence {
        diamond: DiamondLabels {
            a: p.name(a).into(),
            b: p.name(b).into(),
            c: p.name(c).into(),
            d: p.name(d).into(),
        },
        components: [of(a), of(b), of(c), of(d)],
    })
}

pub fn is_w_glued_diamond(p: &Poset) -> Option<WGluedEvidence> {
    w_glued_diamond(p).ok()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Acyclic,
    YGluedBipartite,
    WGluedDiamond,
    Fails,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Acyclic => "Acyclic",
            Kind::YGluedBipartite => "YGluedBipartite",
            Kind::WGluedDiamond => "WGluedDiamond",
            Kind::Fails => "Fails",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    Acyclic,
    YGlued(YGluedEvidence),
    WGlued(WGluedEvidence),
    Fails {
        has_acyclic_extension: bool,
        violation: Violation,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub kind: Kind,
    pub evidence: Evidence,
}

/// Requires a connected poset.
pub fn verdict(p: &Poset) -> Result<Verdict> {
    if !p.is_connected() {
        return Err(Error::NotConnected);
    }
    if is_acyclic(p) {
        return Ok(Verdict { kind: Kind::Acyclic, evidence: Evidence::Acyclic });
    }
    let extendable = has_acyclic_extension(p);
    let outcome = if extendable {
        y_glued_bipartite(p).map(|e| Verdict { kind: Kind::YGluedBipartite, evidence: Evidence::YGlued(e) })
    } else {
        w_glued_diamond(p).map(|e| Verdict { kind: Kind::WGluedDiamond, evidence: Evidence::WGlued(e) })
    };
    Ok(outcome.unwrap_or_else(|violation| Verdict {
        kind: Kind::Fails,
        evidence: Evidence::Fails { has_acyclic_extension: extendable, violation },
    }))
}
