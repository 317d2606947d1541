//! Recursive inverse transforms on posets of class W.

use num_traits::Zero;

use crate::classify::is_w_class;
use crate::error::{Error, Result};
use crate::measures::{distribution_function, system_is_stoch_monotone, DistributionFunction, MeasureSystem};
use crate::poset::ElementSet;
use crate::rational::{self, Q};
use crate::transform::{pointwise_monotone, IntervalSet, InverseTransform};
use crate::tree::RootedTree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexNode {
    /// `u_1, ..., u_*`, from the top of the tree order downwards.
    pub path: Vec<usize>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

impl IndexNode {
    pub fn head(&self) -> usize {
        self.path[0]
    }

    pub fn tail(&self) -> usize {
        *self.path.last().expect("paths are nonempty")
    }
}

/// Decomposition of a rooted tree into maximal paths. Node 0 holds the
/// root; nodes are numbered in preorder and children follow the element
/// order of their head vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneTreeIndex {
    nodes: Vec<IndexNode>,
    node_of: Vec<usize>,
}

impl PlaneTreeIndex {
    pub fn build(tree: &RootedTree) -> PlaneTreeIndex {
        Self::build_with_breaks(tree, ElementSet::EMPTY)
    }

    /// A path also ends at any vertex of `breaks`, even with one successor.
    pub fn build_with_breaks(tree: &RootedTree, breaks: ElementSet) -> PlaneTreeIndex {
        let mut index = PlaneTreeIndex { nodes: Vec::new(), node_of: vec![0; tree.len()] };
        index.grow(tree, breaks, tree.root(), None);
        index
    }

    fn grow(&mut self, tree: &RootedTree, breaks: ElementSet, head: usize, parent: Option<usize>) -> usize {
        let id = self.nodes.len();
        let mut path = vec![head];
        let mut x = head;
        while tree.children(x).len() == 1 && !breaks.contains(x) {
            x = tree.children(x)[0];
            path.push(x);
        }
        for &v in &path {
            self.node_of[v] = id;
        }
        self.nodes.push(IndexNode { path, parent, children: Vec::new() });
        let mut heads = tree.children(x).to_vec();
        heads.sort_unstable();
        for h in heads {
            let child = self.grow(tree, breaks, h, Some(id));
            self.nodes[id].children.push(child);
        }
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, kappa: usize) -> &IndexNode {
        &self.nodes[kappa]
    }

    pub fn nodes(&self) -> &[IndexNode] {
        &self.nodes
    }

    /// The node whose path contains `x`.
    pub fn node_of(&self, x: usize) -> usize {
        self.node_of[x]
    }

    /// `W^(kappa)`: all vertices on paths of the subtree at `kappa`.
    pub fn subtree(&self, kappa: usize) -> ElementSet {
        let mut s = ElementSet::from_indices(self.nodes[kappa].path.iter().copied());
        for &c in &self.nodes[kappa].children {
            s = s.union(self.subtree(c));
        }
        s
    }

    /// The tail of the parent path, attached above `W^(kappa)`.
    pub fn attachment(&self, kappa: usize) -> Option<usize> {
        self.nodes[kappa].parent.map(|p| self.nodes[p].tail())
    }

    /// `\hat W^(kappa)`.
    pub fn extended_subtree(&self, kappa: usize) -> ElementSet {
        let mut s = self.subtree(kappa);
        if let Some(x) = self.attachment(kappa) {
            s.insert(x);
        }
        s
    }

    /// The extended path from the deepest vertex upwards: `u_*, ..., u_1`
    /// followed by the attachment vertex when there is one.
    pub fn extended_path_upwards(&self, kappa: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.nodes[kappa].path.iter().rev().copied().collect();
        out.extend(self.attachment(kappa));
        out
    }

    /// Start of the segment of `kappa` inside the transform of the root.
    pub fn offset(&self, mu: &[Q], kappa: usize) -> Q {
        let mut total = Q::zero();
        let mut k = kappa;
        while let Some(p) = self.nodes[k].parent {
            let pos = self.nodes[p].children.iter().position(|&c| c == k).expect("child listed at parent");
            total += floor(self, mu, p, pos);
            k = p;
        }
        total
    }
}

/// `mu(kappa-)`, the summed weight of the children.
pub fn mu_minus(index: &PlaneTreeIndex, mu: &[Q], kappa: usize) -> Q {
    index.node(kappa).children.iter().map(|&c| &mu[c]).sum()
}

/// Weight of the children strictly before position `j`.
pub fn floor(index: &PlaneTreeIndex, mu: &[Q], kappa: usize, j: usize) -> Q {
    index.node(kappa).children[..j].iter().map(|&c| &mu[c]).sum()
}

/// Weight of the children up to and including position `j`.
pub fn ceil(index: &PlaneTreeIndex, mu: &[Q], kappa: usize, j: usize) -> Q {
    floor(index, mu, kappa, j + 1)
}

/// `mu(kappa) = max(F_min(u_1), F_max(u_1))`.
pub fn interlaced_mu(
    tree: &RootedTree,
    index: &PlaneTreeIndex,
    f_min: &DistributionFunction,
    f_max: &DistributionFunction,
) -> Result<Vec<Q>> {
    if !crate::measures::df_stoch_leq(tree, f_min, f_max)? {
        return Err(Error::NotOrdered);
    }
    Ok(index
        .nodes()
        .iter()
        .map(|n| rational::max(f_min.at(n.head()), f_max.at(n.head())))
        .collect())
}

pub fn is_interlaced(tree: &RootedTree, index: &PlaneTreeIndex, mu: &[Q], f: &DistributionFunction) -> bool {
    if mu.len() != index.len() || mu[0] != *f.at(tree.root()) {
        return false;
    }
    (0..index.len()).all(|k| {
        let node = index.node(k);
        let below = mu_minus(index, mu, k);
        below <= *f.at(node.tail()) && f.at(node.tail()) <= f.at(node.head()) && *f.at(node.head()) <= mu[k]
    })
}

/// `F^(kappa)` on `\hat W^(kappa)` as `(vertex, value)` pairs.
pub fn extend_f(index: &PlaneTreeIndex, mu: &[Q], f: &DistributionFunction, kappa: usize) -> Vec<(usize, Q)> {
    let mut out: Vec<(usize, Q)> = index.subtree(kappa).iter().map(|x| (x, f.at(x).clone())).collect();
    if let Some(x) = index.attachment(kappa) {
        out.push((x, mu[kappa].clone()));
        out.sort();
    }
    out
}

/// The transform from `[0, mu(kappa))` to `\hat W^(kappa)`, with values
/// given as tree vertices.
pub fn build_rit(
    tree: &RootedTree,
    index: &PlaneTreeIndex,
    mu: &[Q],
    f: &DistributionFunction,
    kappa: usize,
) -> Result<InverseTransform> {
    if kappa >= index.len() {
        return Err(Error::BadIndex(kappa));
    }
    if !is_interlaced(tree, index, mu, f) {
        return Err(Error::NotInterlaced);
    }
    Ok(rit_unchecked(index, mu, f, kappa))
}

fn rit_unchecked(index: &PlaneTreeIndex, mu: &[Q], f: &DistributionFunction, kappa: usize) -> InverseTransform {
    let node = index.node(kappa);
    let mut pieces = Vec::new();
    let mut cursor = Q::zero();
    for &c in &node.children {
        let child = rit_unchecked(index, mu, f, c);
        pieces.extend(child.shifted(&cursor));
        cursor += &mu[c];
    }
    let top = &mu[kappa];
    for x in index.extended_path_upwards(kappa) {
        let level = if Some(x) == index.attachment(kappa) { top.clone() } else { rational::min(f.at(x), top) };
        if level > cursor {
            pieces.push((cursor.clone(), level.clone(), x));
            cursor = level;
        }
    }
    InverseTransform::from_pieces(top.clone(), pieces).expect("interlaced levels tile the segment")
}

/// Closed form of the preimage of `u_*^(kappa)`.
pub fn tail_preimage(index: &PlaneTreeIndex, mu: &[Q], f: &DistributionFunction, kappa: usize) -> IntervalSet {
    let node = index.node(kappa);
    let mut pieces = vec![(mu_minus(index, mu, kappa), f.at(node.tail()).clone())];
    for (j, &c) in node.children.iter().enumerate() {
        let start = floor(index, mu, kappa, j);
        pieces.push((&start + f.at(index.node(c).head()), &start + &mu[c]));
    }
    IntervalSet::new(pieces)
}

/// A monotone family of transforms realizing a system on a W-class poset.
#[derive(Clone, Debug)]
pub struct WClassRealization {
    pub tree: RootedTree,
    pub index: PlaneTreeIndex,
    pub mu: Vec<Q>,
    pub transforms: Vec<InverseTransform>,
}

/// Realizes a stochastically monotone system on a W-class support whose
/// index has a minimum and a maximum. The tree is rooted at `root`, or at
/// the first maximal element.
pub fn w_class_realize(system: &MeasureSystem, root: Option<usize>) -> Result<WClassRealization> {
    w_class_realize_with_breaks(system, root, ElementSet::EMPTY)
}

pub fn w_class_realize_with_breaks(
    system: &MeasureSystem,
    root: Option<usize>,
    breaks: ElementSet,
) -> Result<WClassRealization> {
    let support = system.support();
    if !support.is_connected() || !is_w_class(support) {
        return Err(Error::NotWClass);
    }
    let (Some(lo), Some(hi)) = (system.index().minimum(), system.index().maximum()) else {
        return Err(Error::NoExtremes);
    };
    system.common_total()?;
    if !system_is_stoch_monotone(system)? {
        return Err(Error::NotStochasticallyMonotone);
    }
    let root = root.unwrap_or_else(|| support.maximal_elements()[0]);
    let tree = RootedTree::new(support.clone(), root)?;
    let index = PlaneTreeIndex::build_with_breaks(&tree, breaks);
    let fs = system
        .members()
        .iter()
        .map(|m| distribution_function(m, &tree))
        .collect::<Result<Vec<_>>>()?;
    let mu = interlaced_mu(&tree, &index, &fs[lo], &fs[hi])?;
    let transforms = fs
        .iter()
        .map(|f| build_rit(&tree, &index, &mu, f, 0))
        .collect::<Result<Vec<_>>>()?;
    debug_assert!(pointwise_monotone(system.index(), support, &transforms));
    Ok(WClassRealization { tree, index, mu, transforms })
}
