//! Stochastically monotone systems that are not realizably weakly monotone,
//! each on a small concrete host poset.

use crate::catalog;
use crate::classify;
use crate::error::{Error, Result};
use crate::feasibility;
use crate::measures::{self, Measure, MeasureSystem};
use crate::poset::{ElementSet, Poset};
use crate::rational::{self, Q};

/// Where the bowtie's second top sits relative to the bipartite core.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HPlacement {
    /// `h` is one of the upper bipartite elements.
    Upper,
    /// `h` lies in the lower piece, away from the bipartite core.
    Lower,
}

/// Which second cycle meets the diamond.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SecondCycle {
    /// A bowtie whose bottom `e` is the diamond's bottom `a`.
    BowtieAtBottom,
    /// A bowtie whose bottom `e` is the diamond's side `b`.
    BowtieAtSide,
    /// A second diamond avoiding `b`.
    SecondDiamond,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expected {
    pub stoch_monotone: bool,
    pub max_theta: Q,
}

/// A labeled pattern that must occur as an induced subposet of the host,
/// with `labels[i]` the host element playing pattern element `i`.
#[derive(Clone, Debug)]
pub struct PatternCheck {
    pub pattern: Poset,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub case: &'static str,
    pub host: Poset,
    /// The system the argument works with. Its index is the host itself or
    /// the diamond inside it.
    pub system: MeasureSystem,
    /// The system indexed by the whole host.
    pub full: MeasureSystem,
    pub expected: Expected,
    pub patterns: Vec<PatternCheck>,
    /// Number of induced diamonds the host must have, when that matters.
    pub diamonds: Option<usize>,
}

fn host(elements: &[&str], covers: &[(&str, &str)]) -> Poset {
    Poset::from_cover_edges(elements, covers).expect("fixture host is a valid Hasse diagram")
}

fn uniform(host: &Poset, names: &[&str]) -> Measure {
    let set = host.set_by_names(names).expect("fixture names belong to the host");
    Measure::uniform_on(host.len(), set, &rational::ratio(1, names.len() as i64))
}

fn pattern(pattern: Poset, labels: &[&str]) -> PatternCheck {
    PatternCheck { pattern, labels: labels.iter().map(|s| s.to_string()).collect() }
}

fn expected() -> Expected {
    Expected { stoch_monotone: true, max_theta: rational::zero() }
}

/// The bipartite core `a1, a2 < b1, b2` with an induced bowtie `e, f < g, h`
/// in the lower piece. Elements above `a1` or `a2` outside the core get
/// `1/2 I_{g,h}`, the rest `1/2 I_{e,f}`.
pub fn fixture_bipartite_violation(case: HPlacement) -> Fixture {
    let (s, h, name) = match case {
        HPlacement::Upper => (
            host(
                &["a1", "a2", "b1", "b2", "e", "f", "g"],
                &[
                    ("a1", "b1"),
                    ("a1", "b2"),
                    ("a2", "b1"),
                    ("a2", "b2"),
                    ("e", "a2"),
                    ("f", "a2"),
                    ("a2", "g"),
                ],
            ),
            "b2",
            "bipartite-h-upper",
        ),
        HPlacement::Lower => (
            host(
                &["a1", "a2", "b1", "b2", "e", "f", "g", "h", "m"],
                &[
                    ("a1", "b1"),
                    ("a1", "b2"),
                    ("a2", "b1"),
                    ("a2", "b2"),
                    ("a2", "m"),
                    ("e", "m"),
                    ("f", "m"),
                    ("m", "g"),
                    ("m", "h"),
                ],
            ),
            "h",
            "bipartite-h-lower",
        ),
    };
    let core = s.set_by_names(&["a1", "a2", "b1", "b2"]).unwrap();
    let above = s
        .up_closure(s.set_by_names(&["a1", "a2"]).unwrap())
        .difference(core);
    let members = (0..s.len())
        .map(|x| match s.name(x) {
            "a1" => uniform(&s, &["e", "f", h]),
            "a2" => uniform(&s, &["e", "f", "g"]),
            "b1" => uniform(&s, &["f", "g", h]),
            "b2" => uniform(&s, &["e", "g", h]),
            _ if above.contains(x) => uniform(&s, &["g", h]),
            _ => uniform(&s, &["e", "f"]),
        })
        .collect();
    let full = MeasureSystem::kernel(s.clone(), members).unwrap();
    Fixture {
        name,
        case: match case {
            HPlacement::Upper => "bipartite core, h upper",
            HPlacement::Lower => "bipartite core, h lower",
        },
        host: s,
        system: full.clone(),
        full,
        expected: expected(),
        patterns: vec![
            pattern(catalog::bowtie(), &["a1", "a2", "b1", "b2"]),
            pattern(catalog::bowtie(), &["e", "f", "g", h]),
        ],
        diamonds: None,
    }
}

fn on_diamond(s: &Poset, members: [&[&str]; 4]) -> MeasureSystem {
    let members = members.iter().map(|names| uniform(s, names)).collect();
    MeasureSystem::new(catalog::diamond(), s.clone(), members).unwrap()
}

fn diamond_fixture(
    name: &'static str,
    case: &'static str,
    s: Poset,
    members: [&[&str]; 4],
    patterns: Vec<PatternCheck>,
    diamonds: Option<usize>,
) -> Fixture {
    let system = on_diamond(&s, members);
    let full = extend_to_full(&system, &s).expect("fixture hosts avoid the extension gap");
    Fixture { name, case, host: s, system, full, expected: expected(), patterns, diamonds }
}

/// The diamond `a < b, c < d` together with a second induced cycle.
pub fn fixture_second_cycle(case: SecondCycle) -> Fixture {
    let diamond = [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")];
    let with = |extra: &[&str], covers: &[(&'static str, &'static str)]| {
        let mut names = vec!["a", "b", "c", "d"];
        names.extend_from_slice(extra);
        let mut all = diamond.to_vec();
        all.extend_from_slice(covers);
        host(&names, &all)
    };
    match case {
        // e = a, f, g = d, h.
        SecondCycle::BowtieAtBottom => diamond_fixture(
            "second-cycle-bowtie-bottom",
            "bowtie through the bottom",
            with(&["f", "h"], &[("f", "d"), ("a", "h"), ("f", "h")]),
            [&["a", "f"], &["f", "h"], &["f", "d"], &["d", "h"]],
            vec![pattern(catalog::bowtie(), &["a", "f", "d", "h"])],
            None,
        ),
        // e = b, f = c, g, h = d.
        SecondCycle::BowtieAtSide => diamond_fixture(
            "second-cycle-bowtie-side",
            "bowtie through a side",
            with(&["g"], &[("b", "g"), ("c", "g")]),
            [&["b", "c"], &["b", "g"], &["c", "g"], &["d", "g"]],
            vec![pattern(catalog::bowtie(), &["b", "c", "d", "g"])],
            None,
        ),
        // a' = a, b' = x, c' = c, d' = d.
        SecondCycle::SecondDiamond => diamond_fixture(
            "second-cycle-diamond",
            "second diamond avoiding b",
            with(&["x"], &[("a", "x"), ("x", "d")]),
            [&["a", "x"], &["x", "c"], &["a", "d"], &["x", "d"]],
            vec![pattern(catalog::diamond(), &["a", "x", "c", "d"])],
            None,
        ),
    }
}

/// The diamond with a Y-poset `a < f < g, h` sharing only `a`.
pub fn fixture_yposet() -> Fixture {
    diamond_fixture(
        "yposet",
        "Y-poset sharing the bottom",
        host(
            &["a", "b", "c", "d", "f", "g", "h"],
            &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d"), ("a", "f"), ("f", "g"), ("f", "h")],
        ),
        [&["a", "f"], &["a", "g"], &["a", "h"], &["g", "h"]],
        vec![pattern(catalog::y_poset(), &["a", "f", "g", "h"])],
        Some(1),
    )
}

/// Extends a system indexed by the diamond `a < b, c < d` to every element
/// of `host`: `P_d` above `b` or `c`, `P_a` for elements below neither.
/// Anything else is a `RuleGap`.
pub fn extend_to_full(system: &MeasureSystem, host: &Poset) -> Result<MeasureSystem> {
    let place = system.embedding()?;
    if system.support() != host || !system.index().is_isomorphic(&catalog::diamond()) {
        return Err(Error::HypothesisViolated("system must be indexed by a diamond inside the host".into()));
    }
    let [a, b, c, d] = ["a", "b", "c", "d"].map(|x| system.index().require(x));
    let (a, b, c, d) = (a?, b?, c?, d?);
    let (hb, hc) = (place[b], place[c]);
    let mut members = Vec::with_capacity(host.len());
    for x in 0..host.len() {
        let own = place.iter().position(|&y| y == x);
        let member = match own {
            Some(alpha) => system.member(alpha),
            None if host.lt(hb, x) || host.lt(hc, x) => system.member(d),
            None if !host.leq(x, hb) && !host.leq(x, hc) => system.member(a),
            None => return Err(Error::RuleGap(host.name(x).to_string())),
        };
        members.push(member.clone());
    }
    MeasureSystem::kernel(host.clone(), members)
}

pub fn all_fixtures() -> Vec<Fixture> {
    vec![
        fixture_bipartite_violation(HPlacement::Upper),
        fixture_bipartite_violation(HPlacement::Lower),
        fixture_second_cycle(SecondCycle::BowtieAtBottom),
        fixture_second_cycle(SecondCycle::BowtieAtSide),
        fixture_second_cycle(SecondCycle::SecondDiamond),
        fixture_yposet(),
    ]
}

pub fn fixture_by_name(name: &str) -> Option<Fixture> {
    all_fixtures().into_iter().find(|f| f.name == name)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureReport {
    pub name: &'static str,
    pub full_stoch_monotone: bool,
    pub system_stoch_monotone: bool,
    pub max_theta: Q,
    pub patterns_found: bool,
    pub diamonds: usize,
}

impl FixtureReport {
    pub fn passed(&self, fixture: &Fixture) -> bool {
        self.full_stoch_monotone == fixture.expected.stoch_monotone
            && self.system_stoch_monotone == fixture.expected.stoch_monotone
            && self.max_theta == fixture.expected.max_theta
            && self.patterns_found
            && fixture.diamonds.is_none_or(|n| n == self.diamonds)
    }
}

fn has_labeled_copy(host: &Poset, check: &PatternCheck) -> bool {
    let Ok(labels) = check
        .labels
        .iter()
        .map(|s| host.require(s))
        .collect::<Result<Vec<usize>>>()
    else {
        return false;
    };
    let distinct = ElementSet::from_indices(labels.iter().copied()).len() == labels.len();
    distinct
        && (0..labels.len()).all(|i| {
            (0..labels.len()).all(|j| check.pattern.leq(i, j) == host.leq(labels[i], labels[j]))
        })
}

/// Recomputes every expectation of `fixture` from scratch. `max_theta` is
/// solved on `fixture.system`; a zero there forces zero for the full system.
pub fn check_fixture(fixture: &Fixture, bound: usize) -> Result<FixtureReport> {
    let (max_theta, _) = feasibility::max_theta(&fixture.system, bound)?;
    Ok(FixtureReport {
        name: fixture.name,
        full_stoch_monotone: measures::system_is_stoch_monotone(&fixture.full)?,
        system_stoch_monotone: measures::system_is_stoch_monotone(&fixture.system)?,
        max_theta,
        patterns_found: fixture.patterns.iter().all(|p| has_labeled_copy(&fixture.host, p)),
        diamonds: classify::diamonds(&fixture.host).len(),
    })
}
