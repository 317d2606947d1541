//! Enumeration of small posets up to isomorphism.

use std::collections::BTreeMap;

use crate::poset::{ElementSet, Poset};

/// Canonical code of a poset: the lexicographically smallest upper-triangular
/// relation matrix over all linear extensions. Two posets share a code iff
/// they are isomorphic. Intended for posets of at most 11 elements.
pub fn canonical_code(p: &Poset) -> (usize, u64) {
    let n = p.len();
    assert!(n <= 11, "canonical_code supports at most 11 elements");
    let mut best = u64::MAX;
    let mut perm = Vec::with_capacity(n);
    extend_code(p, &mut perm, ElementSet::EMPTY, 0, &mut best);
    (n, if n == 0 { 0 } else { best })
}

fn extend_code(p: &Poset, perm: &mut Vec<usize>, placed: ElementSet, code: u64, best: &mut u64) {
    let n = p.len();
    let k = perm.len();
    if k == n {
        *best = (*best).min(code);
        return;
    }
    for x in 0..n {
        if placed.contains(x) || !p.down_of(x).difference(placed).eq(&ElementSet::singleton(x)) {
            continue;
        }
        let mut next = code;
        for (i, &y) in perm.iter().enumerate() {
            if p.leq(y, x) {
                next |= 1u64 << pair_bit(n, i, k);
            }
        }
        // Prefix pruning: bits of later pairs are all lower than this one's
        // column only when ordered by column; compare on the fixed prefix.
        let prefix_mask = prefix_mask(n, k);
        if next & prefix_mask > *best & prefix_mask {
            continue;
        }
        perm.push(x);
        extend_code(p, perm, placed.union(ElementSet::singleton(x)), next, best);
        perm.pop();
    }
}

// Pairs (i, j) with i < j are laid out column by column, column j occupying
// the bits just below those of column j - 1, so a smaller prefix of columns
// decides the comparison.
fn pair_bit(n: usize, i: usize, j: usize) -> u32 {
    let total = n * (n - 1) / 2;
    let before = j * (j - 1) / 2 + i;
    (total - 1 - before) as u32
}

fn prefix_mask(n: usize, k: usize) -> u64 {
    let total = n * (n - 1) / 2;
    let used = (k + 1) * k / 2;
    if used == 0 {
        return 0;
    }
    let low = total - used;
    (((1u128 << used) - 1) << low) as u64
}

fn element_name(i: usize) -> String {
    ((b'a' + i as u8) as char).to_string()
}

/// All posets on `n` elements up to isomorphism, named `a`, `b`, ... and
/// sorted by canonical code.
pub fn all_posets(n: usize) -> Vec<Poset> {
    assert!(n <= 11);
    let mut level: BTreeMap<(usize, u64), Poset> = BTreeMap::new();
    let empty = Poset::from_relation(Vec::new(), |_, _| false);
    level.insert(canonical_code(&empty), empty);
    for m in 0..n {
        let mut next = BTreeMap::new();
        for p in level.values() {
            // Every poset arises by adding a maximal element above a down-set.
            for down in p.down_sets() {
                let names: Vec<String> = (0..=m).map(element_name).collect();
                let q = Poset::from_relation(names, |x, y| {
                    if y == m {
                        x == m || down.contains(x)
                    } else {
                        x != m && p.leq(x, y)
                    }
                });
                next.entry(canonical_code(&q)).or_insert(q);
            }
        }
        level = next;
    }
    level.into_values().collect()
}

/// Connected posets on `n` elements up to isomorphism.
pub fn connected_posets(n: usize) -> Vec<Poset> {
    all_posets(n).into_iter().filter(|p| p.is_connected()).collect()
}
