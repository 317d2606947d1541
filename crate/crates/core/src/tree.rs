//! Rooted trees over acyclic posets.

use crate::classify::is_acyclic;
use crate::error::{Error, Result};
use crate::poset::{ElementSet, Poset};

/// A connected acyclic poset with a chosen root. `x <=_root y` holds when
/// the Hasse path from the root to `x` passes through `y`, so the root is
/// the top of the tree order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    poset: Poset,
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    section: Vec<ElementSet>,
}

impl RootedTree {
    /// The root must be a maximal or a minimal element.
    pub fn new(poset: Poset, root: usize) -> Result<RootedTree> {
        if !poset.is_connected() {
            return Err(Error::NotConnected);
        }
        if !is_acyclic(&poset) {
            return Err(Error::NotAcyclic);
        }
        if root >= poset.len() {
            return Err(Error::BadIndex(root));
        }
        if poset.up_of(root).len() != 1 && poset.down_of(root).len() != 1 {
            return Err(Error::HypothesisViolated(format!(
                "root {} is neither maximal nor minimal",
                poset.name(root)
            )));
        }
        Ok(Self::new_unchecked(poset, root))
    }

    /// Roots the tree at any element. Section-type queries still work, but
    /// sections need not be up- or down-sets unless the root is extreme.
    pub(crate) fn new_unchecked(poset: Poset, root: usize) -> RootedTree {
        let n = poset.len();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut order = vec![root];
        let mut seen = ElementSet::singleton(root);
        let mut k = 0;
        while k < order.len() {
            let x = order[k];
            k += 1;
            for y in poset.neighbors(x) {
                if !seen.contains(y) {
                    seen.insert(y);
                    parent[y] = Some(x);
                    children[x].push(y);
                    order.push(y);
                }
            }
        }
        let mut section = vec![ElementSet::EMPTY; n];
        for &x in order.iter().rev() {
            let mut s = ElementSet::singleton(x);
            for &y in &children[x] {
                s = s.union(section[y]);
            }
            section[x] = s;
        }
        RootedTree { poset, root, parent, children, section }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.parent[x]
    }

    /// Successors in the tree order, in element order.
    pub fn children(&self, x: usize) -> &[usize] {
        &self.children[x]
    }

    pub fn tree_leq(&self, x: usize, y: usize) -> bool {
        self.section[y].contains(x)
    }

    /// `(<-, x]`, the subtree hanging from `x`.
    pub fn closed_section(&self, x: usize) -> ElementSet {
        self.section[x]
    }

    pub fn open_section(&self, x: usize) -> ElementSet {
        self.section[x].difference(ElementSet::singleton(x))
    }

    /// Whether `(<-, x]` is a down-set of the poset. For the root (the whole
    /// set) both this and `section_is_up_set` hold.
    pub fn section_is_down_set(&self, x: usize) -> bool {
        match self.parent[x] {
            None => true,
            Some(p) => self.poset.lt(x, p),
        }
    }

    pub fn section_is_up_set(&self, x: usize) -> bool {
        match self.parent[x] {
            None => true,
            Some(p) => self.poset.lt(p, x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn sections_of_a_rooted_w_poset() {
        let w = catalog::w_poset();
        let f = w.require("f").unwrap();
        let e = w.require("e").unwrap();
        let t = RootedTree::new(w.clone(), f).unwrap();
        assert_eq!(t.parent(e), Some(f));
        assert!(t.section_is_down_set(e));
        let g = w.require("g").unwrap();
        assert!(t.section_is_up_set(g));
        assert!(t.tree_leq(g, e));
        assert!(t.tree_leq(g, f));
        assert!(!t.tree_leq(f, g));
        for x in 0..w.len() {
            let s = t.closed_section(x);
            assert!(w.is_down_set(s) || w.is_up_set(s));
            assert_eq!(w.is_down_set(s), t.section_is_down_set(x));
        }
    }

    #[test]
    fn rejects_bad_roots() {
        let y = catalog::y_poset();
        let f = y.require("f").unwrap();
        assert!(matches!(RootedTree::new(y, f), Err(Error::HypothesisViolated(_))));
        assert_eq!(RootedTree::new(catalog::diamond(), 0), Err(Error::NotAcyclic));
    }
}
