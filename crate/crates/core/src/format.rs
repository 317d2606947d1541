//! Text formats for posets, measures, measure systems and generators.
//!
//! Every format is line based, `#` starts a comment and blank lines are
//! ignored. Serializers emit the canonical form, which parses back to the
//! same value and re-serializes to the same bytes.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::markov::Generator;
use crate::measures::{Measure, MeasureSystem};
use crate::poset::Poset;
use crate::rational;

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn header<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.strip_prefix(key)?.strip_prefix(':').map(str::trim)
}

fn names_of(rest: &str) -> Vec<String> {
    rest.split_whitespace().map(String::from).collect()
}

fn cover(line: &str) -> Option<(String, String)> {
    let (x, y) = line.split_once('<')?;
    let (x, y) = (x.trim(), y.trim());
    let single = |s: &str| !s.is_empty() && !s.contains(char::is_whitespace);
    (single(x) && single(y)).then(|| (x.to_string(), y.to_string()))
}

/// Attaches a line number to errors raised while building a value.
fn at_line<T>(line: usize, result: Result<T>) -> Result<T> {
    result.map_err(|e| match e {
        Error::Parse { message, .. } => parse_error(line, message),
        other => parse_error(line, other.to_string()),
    })
}

/// `elements: a b c d` followed by one `x < y` cover per line.
pub fn parse_poset(text: &str) -> Result<Poset> {
    let mut lines = content_lines(text);
    let (first, line) = lines.next().ok_or_else(|| parse_error(1, "missing `elements:` line"))?;
    let elements = header(line, "elements").ok_or_else(|| parse_error(first, "expected `elements: ...`"))?;
    let elements = names_of(elements);
    let mut covers = Vec::new();
    let mut last = first;
    for (n, line) in lines {
        let c = cover(line).ok_or_else(|| parse_error(n, format!("expected `x < y`, got `{line}`")))?;
        covers.push(c);
        last = n;
    }
    at_line(last, Poset::from_cover_edges(&elements, &covers))
}

fn write_covers(p: &Poset, out: &mut String) {
    let mut covers = p.cover_names();
    covers.sort();
    for (x, y) in covers {
        out.push_str(&format!("{x} < {y}\n"));
    }
}

pub fn poset_to_text(p: &Poset) -> String {
    let mut out = format!("elements: {}\n", p.names().join(" "));
    write_covers(p, &mut out);
    out
}

/// `x=1/3 y=2/3`, masses on named support elements.
fn parse_masses(line: usize, text: &str, support: &Poset) -> Result<Measure> {
    let mut m = Measure::zeros(support.len());
    let mut seen = vec![false; support.len()];
    for item in text.split_whitespace() {
        let (x, q) = item
            .split_once('=')
            .ok_or_else(|| parse_error(line, format!("expected `element=mass`, got `{item}`")))?;
        let i = support.index_of(x).ok_or_else(|| parse_error(line, format!("unknown element `{x}`")))?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(parse_error(line, format!("mass for `{x}` given twice")));
        }
        let q = at_line(line, rational::parse(q))?;
        if q.is_negative() {
            return Err(parse_error(line, format!("negative mass for `{x}`")));
        }
        m.add_at(i, &q);
    }
    Ok(m)
}

fn masses_to_text(m: &Measure, support: &Poset) -> String {
    (0..support.len())
        .filter(|&x| !m.mass(x).is_zero())
        .map(|x| format!("{}={}", support.name(x), rational::format(m.mass(x))))
        .collect::<Vec<_>>()
        .join(" ")
}

/// A single measure: one line `x=1/2 y=1/2`, optionally labeled `p1: ...`.
pub fn parse_measure(text: &str, support: &Poset) -> Result<Measure> {
    let mut lines = content_lines(text);
    let (n, line) = lines.next().ok_or_else(|| parse_error(1, "empty measure file"))?;
    if let Some((extra, _)) = lines.next() {
        return Err(parse_error(extra, "a measure file holds one line"));
    }
    let body = match line.split_once(':') {
        Some((_, rest)) => rest,
        None => line,
    };
    parse_masses(n, body, support)
}

pub fn measure_to_text(m: &Measure, support: &Poset) -> String {
    format!("{}\n", masses_to_text(m, support))
}

/// One `alpha: x=1/3 y=2/3` line per index element. The index order is
/// the support order restricted to the listed names, unless `order: x < y`
/// lines give the index covers explicitly.
pub fn parse_system(text: &str, support: &Poset) -> Result<MeasureSystem> {
    let mut rows: Vec<(usize, String, &str)> = Vec::new();
    let mut order: Vec<(String, String)> = Vec::new();
    let mut explicit = false;
    let mut last = 1;
    for (n, line) in content_lines(text) {
        last = n;
        if let Some(rest) = header(line, "order") {
            explicit = true;
            if !rest.is_empty() {
                order.push(cover(rest).ok_or_else(|| parse_error(n, format!("expected `order: x < y`, got `{line}`")))?);
            }
            continue;
        }
        let (alpha, masses) = line
            .split_once(':')
            .ok_or_else(|| parse_error(n, format!("expected `index: element=mass ...`, got `{line}`")))?;
        let alpha = alpha.trim();
        if alpha.is_empty() || alpha.contains(char::is_whitespace) {
            return Err(parse_error(n, format!("bad index name `{alpha}`")));
        }
        if rows.iter().any(|(_, a, _)| a == alpha) {
            return Err(parse_error(n, format!("index `{alpha}` listed twice")));
        }
        rows.push((n, alpha.to_string(), masses));
    }
    if rows.is_empty() {
        return Err(parse_error(last, "no index lines"));
    }
    let names: Vec<&str> = rows.iter().map(|(_, a, _)| a.as_str()).collect();
    let index = if explicit {
        at_line(last, Poset::from_cover_edges(&names, &order))?
    } else {
        at_line(last, support.induced_by_names(&names))?
    };
    let mut members = vec![Measure::zeros(support.len()); index.len()];
    for (n, alpha, masses) in &rows {
        members[index.require(alpha).unwrap()] = parse_masses(*n, masses, support)?;
    }
    at_line(last, MeasureSystem::new(index, support.clone(), members))
}

pub fn system_to_text(system: &MeasureSystem) -> String {
    let (index, support) = (system.index(), system.support());
    let mut out = String::new();
    for (alpha, m) in system.members().iter().enumerate() {
        let masses = masses_to_text(m, support);
        let sep = if masses.is_empty() { "" } else { " " };
        out.push_str(&format!("{}:{sep}{masses}\n", index.name(alpha)));
    }
    let induced = support.induced_by_names(index.names());
    if induced.as_ref() != Ok(index) {
        let mut covers = index.cover_names();
        covers.sort();
        if covers.is_empty() {
            out.push_str("order:\n");
        }
        for (x, y) in covers {
            out.push_str(&format!("order: {x} < {y}\n"));
        }
    }
    out
}

/// `states: a b c`, the order as `x < y` cover lines, then off-diagonal
/// rates as rows `a: b=1 c=2`. Missing rates are zero.
pub fn parse_generator(text: &str) -> Result<Generator> {
    let mut lines = content_lines(text).peekable();
    let (first, line) = lines.next().ok_or_else(|| parse_error(1, "missing `states:` line"))?;
    let states = header(line, "states").ok_or_else(|| parse_error(first, "expected `states: ...`"))?;
    let states = names_of(states);
    let mut covers = Vec::new();
    let mut last = first;
    while let Some(&(n, line)) = lines.peek() {
        if line.contains(':') {
            break;
        }
        covers.push(cover(line).ok_or_else(|| parse_error(n, format!("expected `x < y`, got `{line}`")))?);
        last = n;
        lines.next();
    }
    let poset = at_line(last, Poset::from_cover_edges(&states, &covers))?;
    let size = poset.len();
    let mut rates = vec![vec![rational::zero(); size]; size];
    let mut seen = vec![false; size];
    for (n, line) in lines {
        last = n;
        let (x, row) = line.split_once(':').unwrap_or((line, ""));
        let x = x.trim();
        let i = poset.index_of(x).ok_or_else(|| parse_error(n, format!("unknown state `{x}`")))?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(parse_error(n, format!("row for `{x}` given twice")));
        }
        let m = parse_masses(n, row, &poset)?;
        if !m.mass(i).is_zero() {
            return Err(parse_error(n, format!("diagonal rate for `{x}` is computed, not given")));
        }
        rates[i] = m.0;
    }
    at_line(last, Generator::new(poset, rates))
}

pub fn generator_to_text(g: &Generator) -> String {
    let p = g.states();
    let mut out = format!("states: {}\n", p.names().join(" "));
    write_covers(p, &mut out);
    for x in 0..p.len() {
        let mut row = Measure(g.rates()[x].clone());
        row.0[x] = rational::zero();
        let masses = masses_to_text(&row, p);
        let sep = if masses.is_empty() { "" } else { " " };
        out.push_str(&format!("{}:{sep}{masses}\n", p.name(x)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::ratio;

    #[test]
    fn poset_round_trip() {
        let text = "elements: a b c d\na < b\na < c\nb < d\nc < d\n";
        let p = parse_poset(text).unwrap();
        assert_eq!(p, catalog::diamond());
        assert_eq!(poset_to_text(&p), text);
    }

    #[test]
    fn poset_comments_and_errors() {
        let p = parse_poset("# two\nelements: y x\n\nx < y # cover\n").unwrap();
        assert_eq!(p, Poset::from_cover_edges(&["x", "y"], &[("x", "y")]).unwrap());
        assert_eq!(
            parse_poset("elements: a b\na < b\nb - a\n").unwrap_err(),
            Error::Parse { line: 3, message: "expected `x < y`, got `b - a`".into() }
        );
        assert!(matches!(parse_poset("elements: a b\na < c\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_poset("a < b\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn system_round_trip() {
        let s = catalog::diamond();
        let text = "a: a=1/2 b=1/2\nb: b=1\nc: c=1\nd: d=1\n";
        let sys = parse_system(text, &s).unwrap();
        assert_eq!(sys.member(0).mass(1), &ratio(1, 2));
        assert_eq!(system_to_text(&sys), text);
    }

    #[test]
    fn system_with_its_own_order() {
        let s = catalog::chain(3);
        let text = "hi: x2=1\nlo: x0=1\norder: lo < hi\n";
        let sys = parse_system(text, &s).unwrap();
        assert!(sys.index().lt(sys.index().require("lo").unwrap(), sys.index().require("hi").unwrap()));
        assert_eq!(system_to_text(&sys), text);
        let sub = parse_system("x0: x0=1\nx2: x2=1\n", &s).unwrap();
        assert_eq!(sub.index().covers().len(), 1);
    }

    #[test]
    fn system_errors_carry_lines() {
        let s = catalog::diamond();
        assert!(matches!(parse_system("a: a=1\nb: q=1\n", &s), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_system("a: a=1\n\na: b=1\n", &s), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_system("a: a=x\n", &s), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_system("a: a=-1\n", &s), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn generator_round_trip() {
        let text = "states: a b c\na < b\nb < c\na: b=1 c=1/2\nb:\nc: a=3\n";
        let g = parse_generator(text).unwrap();
        assert_eq!(g.rate(0, 0), &ratio(-3, 2));
        assert_eq!(generator_to_text(&g), text);
        assert!(matches!(parse_generator("states: a b\na < b\na: a=1\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn measure_file() {
        let s = catalog::diamond();
        let m = parse_measure("p1: a=1/4 d=3/4\n", &s).unwrap();
        assert_eq!(measure_to_text(&m, &s), "a=1/4 d=3/4\n");
        assert_eq!(parse_measure(&measure_to_text(&m, &s), &s).unwrap(), m);
    }
}
