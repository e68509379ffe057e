//! Nested trees on labelled leaves.
//!
//! A nested tree is a rooted tree whose leaves carry the labels `1..=k`
//! exactly once and whose vertices all have at least two children. Trees are
//! unplanar: children are always stored sorted by the smallest leaf label
//! they contain, which makes the nested-array rendering a canonical key.
//!
//! [`Tree`] is generic over per-vertex data `V` and per-internal-edge data
//! `E`, so the same cutting and grafting machinery serves bare shapes
//! ([`NestedTree`]), points of the compactified configuration space (vertex
//! configurations, edge scales) and points of the W-construction (vertex
//! labels, edge lengths). Vertex data is indexed by child position; whenever
//! sorting reorders children the data is permuted through [`Slots`].

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Permutation;

/// Data attached to a vertex whose entries are indexed by child position.
pub trait Slots {
    /// Moves the entry at position `old` to position `perm[old]`.
    fn permute_slots(&mut self, perm: &[usize]);
}

impl Slots for () {
    fn permute_slots(&mut self, _perm: &[usize]) {}
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tree<V, E> {
    pub(crate) data: V,
    pub(crate) children: Vec<Child<V, E>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Child<V, E> {
    Leaf(usize),
    Node(E, Box<Tree<V, E>>),
}

/// Bare tree shape; indexes strata of the compactification and cells of the
/// W-construction.
pub type NestedTree = Tree<(), ()>;

/// Canonical, totally ordered identifier of an unplanar leaf-labelled tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TreeKey(String);

impl TreeKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TreeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<V, E> Child<V, E> {
    pub fn min_leaf(&self) -> usize {
        match self {
            Child::Leaf(a) => *a,
            Child::Node(_, t) => t.min_leaf(),
        }
    }

    pub fn as_node(&self) -> Option<(&E, &Tree<V, E>)> {
        match self {
            Child::Leaf(_) => None,
            Child::Node(e, t) => Some((e, t)),
        }
    }
}

enum Slot<'a, V, E> {
    Leaf(usize),
    Cut(&'a E, &'a Tree<V, E>),
}

impl<V, E> Tree<V, E> {
    pub(crate) fn from_parts(data: V, children: Vec<Child<V, E>>) -> Self {
        Tree { data, children }
    }

    pub fn data(&self) -> &V {
        &self.data
    }

    pub fn children(&self) -> &[Child<V, E>] {
        &self.children
    }

    /// Number of children of the root vertex, `|v|`.
    pub fn valence(&self) -> usize {
        self.children.len()
    }

    pub fn min_leaf(&self) -> usize {
        self.children
            .iter()
            .map(Child::min_leaf)
            .min()
            .expect("vertex without children")
    }

    /// Number of leaves, `k`.
    pub fn arity(&self) -> usize {
        self.children
            .iter()
            .map(|c| match c {
                Child::Leaf(_) => 1,
                Child::Node(_, t) => t.arity(),
            })
            .sum()
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out.sort_unstable();
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        for c in &self.children {
            match c {
                Child::Leaf(a) => out.push(*a),
                Child::Node(_, t) => t.collect_leaves(out),
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .filter_map(Child::as_node)
            .map(|(_, t)| t.vertex_count())
            .sum::<usize>()
    }

    /// Number of internal (vertex to vertex) edges, `l(T)`.
    pub fn edge_count(&self) -> usize {
        self.vertex_count() - 1
    }

    /// All vertices in pre-order; each entry is the subtree rooted there.
    pub fn vertices(&self) -> Vec<&Tree<V, E>> {
        let mut out = Vec::new();
        self.push_vertices(&mut out);
        out
    }

    fn push_vertices<'a>(&'a self, out: &mut Vec<&'a Tree<V, E>>) {
        out.push(self);
        for (_, t) in self.children.iter().filter_map(Child::as_node) {
            t.push_vertices(out);
        }
    }

    /// All internal edges in pre-order of their lower endpoint.
    pub fn edges(&self) -> Vec<(&E, &Tree<V, E>)> {
        let mut out = Vec::new();
        self.push_edges(&mut out);
        out
    }

    fn push_edges<'a>(&'a self, out: &mut Vec<(&'a E, &'a Tree<V, E>)>) {
        for (e, t) in self.children.iter().filter_map(Child::as_node) {
            out.push((e, t));
            t.push_edges(out);
        }
    }

    pub fn shape(&self) -> NestedTree {
        self.map_ref(&mut |_| (), &mut |_| ())
    }

    pub fn key(&self) -> TreeKey {
        TreeKey(self.render())
    }

    fn render(&self) -> String {
        let mut s = String::from("[");
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            match c {
                Child::Leaf(a) => s.push_str(&a.to_string()),
                Child::Node(_, t) => s.push_str(&t.render()),
            }
        }
        s.push(']');
        s
    }

    pub fn map_ref<V2, E2>(
        &self,
        fv: &mut impl FnMut(&V) -> V2,
        fe: &mut impl FnMut(&E) -> E2,
    ) -> Tree<V2, E2> {
        let data = fv(&self.data);
        let children = self
            .children
            .iter()
            .map(|c| match c {
                Child::Leaf(a) => Child::Leaf(*a),
                Child::Node(e, t) => Child::Node(fe(e), Box::new(t.map_ref(fv, fe))),
            })
            .collect();
        Tree { data, children }
    }

    /// Visits vertex data in pre-order.
    pub fn for_each_vertex_mut(&mut self, f: &mut impl FnMut(&mut V)) {
        f(&mut self.data);
        for c in &mut self.children {
            if let Child::Node(_, t) = c {
                t.for_each_vertex_mut(f);
            }
        }
    }

    /// Visits edge data in pre-order.
    pub fn for_each_edge_mut(&mut self, f: &mut impl FnMut(&mut E)) {
        for c in &mut self.children {
            if let Child::Node(e, t) = c {
                f(e);
                t.for_each_edge_mut(f);
            }
        }
    }

    /// Rewrites leaf labels without re-sorting.
    fn relabel_raw(&mut self, f: &impl Fn(usize) -> usize) {
        for c in &mut self.children {
            match c {
                Child::Leaf(a) => *a = f(*a),
                Child::Node(_, t) => t.relabel_raw(f),
            }
        }
    }

    /// Checks the shape invariants: every vertex has at least two children
    /// and the leaves are exactly `1..=k`.
    pub fn validate_shape(&self) -> Result<()> {
        self.check_valence()?;
        let leaves = self.leaves();
        if leaves.iter().enumerate().any(|(i, &a)| a != i + 1) {
            return Err(Error::InvalidTree(format!(
                "leaf labels {leaves:?} are not exactly 1..={}",
                leaves.len()
            )));
        }
        Ok(())
    }

    fn check_valence(&self) -> Result<()> {
        if self.children.len() < 2 {
            return Err(Error::InvalidTree(format!(
                "vertex {} has {} children; at least 2 required",
                self.render(),
                self.children.len()
            )));
        }
        for (_, t) in self.children.iter().filter_map(Child::as_node) {
            t.check_valence()?;
        }
        Ok(())
    }

    fn is_sorted(&self) -> bool {
        self.children
            .windows(2)
            .all(|w| w[0].min_leaf() < w[1].min_leaf())
            && self
                .children
                .iter()
                .filter_map(Child::as_node)
                .all(|(_, t)| t.is_sorted())
    }
}

impl<V: Slots, E> Tree<V, E> {
    /// Sorts children by smallest leaf at every vertex, permuting vertex data
    /// to follow. Returns the smallest leaf of the tree.
    pub fn canonicalize(&mut self) -> usize {
        let mins: Vec<usize> = self
            .children
            .iter_mut()
            .map(|c| match c {
                Child::Leaf(a) => *a,
                Child::Node(_, t) => t.canonicalize(),
            })
            .collect();
        let mut order: Vec<usize> = (0..mins.len()).collect();
        order.sort_by_key(|&i| mins[i]);
        if order.iter().enumerate().any(|(p, &i)| p != i) {
            let mut perm = vec![0; order.len()];
            for (new, &old) in order.iter().enumerate() {
                perm[old] = new;
            }
            self.data.permute_slots(&perm);
            let mut old: Vec<Option<Child<V, E>>> = self.children.drain(..).map(Some).collect();
            self.children = order.iter().map(|&i| old[i].take().unwrap()).collect();
        }
        mins.into_iter().min().expect("vertex without children")
    }

    /// Applies a leaf relabelling (leaf `a` becomes `f(a)`) and restores
    /// canonical order.
    pub fn relabel(&mut self, f: impl Fn(usize) -> usize) {
        self.relabel_raw(&f);
        self.canonicalize();
    }

    /// Replaces leaf `j` by `replacements[j - 1]`, each used exactly once.
    fn substitute(&mut self, replacements: &mut [Option<Child<V, E>>]) {
        for c in &mut self.children {
            match c {
                Child::Leaf(j) => {
                    *c = replacements[*j - 1]
                        .take()
                        .expect("slot substituted twice");
                }
                Child::Node(_, t) => t.substitute(replacements),
            }
        }
    }
}

impl<V: Slots + Clone, E: Clone> Tree<V, E> {
    /// Cuts every internal edge whose data satisfies `pred`.
    ///
    /// Returns the skeleton (one vertex per fragment, carrying the cut edges)
    /// and the fragments in pre-order of the skeleton. Each fragment has its
    /// leaves renumbered `1..=m` following the children of its skeleton
    /// vertex, so `graft_along(&skeleton, fragments)` rebuilds `self`.
    pub fn cut(&self, pred: &impl Fn(&E) -> bool) -> (Tree<(), E>, Vec<Tree<V, E>>) {
        let mut frags = Vec::new();
        let skeleton = self.cut_into(pred, &mut frags);
        (skeleton, frags.into_iter().map(Option::unwrap).collect())
    }

    fn cut_into(
        &self,
        pred: &impl Fn(&E) -> bool,
        frags: &mut Vec<Option<Tree<V, E>>>,
    ) -> Tree<(), E> {
        let idx = frags.len();
        frags.push(None);
        let mut slots = Vec::new();
        let mut frag = self.copy_region(pred, &mut slots);
        let mins: Vec<usize> = slots
            .iter()
            .map(|s| match s {
                Slot::Leaf(a) => *a,
                Slot::Cut(_, t) => t.min_leaf(),
            })
            .collect();
        let mut order: Vec<usize> = (0..slots.len()).collect();
        order.sort_by_key(|&i| mins[i]);
        let mut rank = vec![0; slots.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r + 1;
        }
        frag.relabel(|j| rank[j - 1]);
        frags[idx] = Some(frag);
        let children = order
            .iter()
            .map(|&i| match slots[i] {
                Slot::Leaf(a) => Child::Leaf(a),
                Slot::Cut(e, t) => Child::Node(e.clone(), Box::new(t.cut_into(pred, frags))),
            })
            .collect();
        Tree { data: (), children }
    }

    fn copy_region<'a>(
        &'a self,
        pred: &impl Fn(&E) -> bool,
        slots: &mut Vec<Slot<'a, V, E>>,
    ) -> Tree<V, E> {
        let children = self
            .children
            .iter()
            .map(|c| match c {
                Child::Leaf(a) => {
                    slots.push(Slot::Leaf(*a));
                    Child::Leaf(slots.len())
                }
                Child::Node(e, t) if pred(e) => {
                    slots.push(Slot::Cut(e, t));
                    Child::Leaf(slots.len())
                }
                Child::Node(e, t) => Child::Node(e.clone(), Box::new(t.copy_region(pred, slots))),
            })
            .collect();
        Tree {
            data: self.data.clone(),
            children,
        }
    }

    /// Grafts `parts` (one per skeleton vertex, pre-order) along the
    /// skeleton: leaf `j` of a part is replaced by the `j`-th child of its
    /// skeleton vertex, and skeleton edges keep their data.
    pub fn graft_along(skeleton: &Tree<(), E>, parts: Vec<Tree<V, E>>) -> Result<Tree<V, E>> {
        if parts.len() != skeleton.vertex_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} parts for a skeleton with {} vertices",
                parts.len(),
                skeleton.vertex_count()
            )));
        }
        let mut it = parts.into_iter();
        Self::graft_rec(skeleton, &mut it)
    }

    fn graft_rec(
        skeleton: &Tree<(), E>,
        parts: &mut impl Iterator<Item = Tree<V, E>>,
    ) -> Result<Tree<V, E>> {
        let mut part = parts.next().expect("part count checked");
        let m = skeleton.children.len();
        if part.arity() != m {
            return Err(Error::ShapeMismatch(format!(
                "part of arity {} grafted at a vertex of valence {m}",
                part.arity()
            )));
        }
        let mut repl = Vec::with_capacity(m);
        for c in &skeleton.children {
            repl.push(Some(match c {
                Child::Leaf(a) => Child::Leaf(*a),
                Child::Node(e, t) => Child::Node(e.clone(), Box::new(Self::graft_rec(t, parts)?)),
            }));
        }
        part.substitute(&mut repl);
        part.canonicalize();
        Ok(part)
    }
}

impl<V, E> fmt::Display for Tree<V, E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl NestedTree {
    /// The one-vertex tree on `k` leaves.
    pub fn corolla(k: usize) -> Result<NestedTree> {
        if k < 2 {
            return Err(Error::UnsupportedArity(k));
        }
        Ok(Tree {
            data: (),
            children: (1..=k).map(Child::Leaf).collect(),
        })
    }

    /// Builds a tree from nested children (shape only), validating and
    /// canonicalizing it.
    pub fn from_shape(shape: &Shape) -> Result<NestedTree> {
        match shape {
            Shape::Leaf(_) => Err(Error::InvalidTree("a bare leaf is not a tree".into())),
            Shape::Node(cs) => {
                let mut t = Self::from_shape_raw(cs);
                t.validate_shape()?;
                t.canonicalize();
                Ok(t)
            }
        }
    }

    /// Like [`from_shape`](Self::from_shape) but keeps the children in the
    /// order written.
    pub(crate) fn from_shape_as_written(shape: &Shape) -> Result<NestedTree> {
        match shape {
            Shape::Leaf(_) => Err(Error::InvalidTree("a bare leaf is not a tree".into())),
            Shape::Node(cs) => {
                let t = Self::from_shape_raw(cs);
                t.validate_shape()?;
                Ok(t)
            }
        }
    }

    /// Canonical key of a subtree written with arbitrary leaf labels.
    pub(crate) fn subtree_key(shape: &Shape) -> Result<TreeKey> {
        match shape {
            Shape::Leaf(_) => Err(Error::InvalidTree("a bare leaf is not a subtree".into())),
            Shape::Node(cs) => {
                let mut t = Self::from_shape_raw(cs);
                t.check_valence()?;
                t.canonicalize();
                Ok(t.key())
            }
        }
    }

    fn from_shape_raw(cs: &[Shape]) -> NestedTree {
        Tree {
            data: (),
            children: cs
                .iter()
                .map(|c| match c {
                    Shape::Leaf(a) => Child::Leaf(*a),
                    Shape::Node(cs) => Child::Node((), Box::new(Self::from_shape_raw(cs))),
                })
                .collect(),
        }
    }

    pub fn parse(s: &str) -> Result<NestedTree> {
        let shape: Shape = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_shape(&shape)
    }

    pub fn to_shape(&self) -> Shape {
        fn go<V, E>(t: &Tree<V, E>) -> Shape {
            Shape::Node(
                t.children
                    .iter()
                    .map(|c| match c {
                        Child::Leaf(a) => Shape::Leaf(*a),
                        Child::Node(_, t) => go(t),
                    })
                    .collect(),
            )
        }
        go(self)
    }

    /// Operadic grafting `T1 ∘_i T2`: leaf `i` of `self` is replaced by the
    /// root of `other`, whose leaves become `i..i+k2-1`; leaves of `self`
    /// above `i` shift up by `k2 - 1`.
    ///
    /// Also returns the key of the new internal edge (the grafted subtree).
    pub fn graft(&self, i: usize, other: &NestedTree) -> Result<(NestedTree, TreeKey)> {
        let k1 = self.arity();
        let k2 = other.arity();
        if i == 0 || i > k1 {
            return Err(Error::LeafOutOfRange {
                index: i,
                arity: k1,
            });
        }
        let mut lower = other.clone();
        lower.relabel(|b| b + i - 1);
        let edge = lower.key();
        let mut upper = self.clone();
        upper.relabel_raw(&|a| if a > i { a + k2 - 1 } else { a });
        upper.replace_leaf(i, lower);
        upper.canonicalize();
        Ok((upper, edge))
    }

    fn replace_leaf(&mut self, leaf: usize, sub: NestedTree) -> Option<NestedTree> {
        let mut sub = Some(sub);
        for c in &mut self.children {
            match c {
                Child::Leaf(a) if *a == leaf => {
                    *c = Child::Node((), Box::new(sub.take().unwrap()));
                    return None;
                }
                Child::Node(_, t) => {
                    sub = Some(t.replace_leaf(leaf, sub.take().unwrap())?);
                }
                _ => {}
            }
        }
        sub
    }

    /// Action of `σ ∈ Σ_k`: leaf `i` is relabelled `σ(i)`.
    pub fn act_perm(&self, sigma: &Permutation) -> Result<NestedTree> {
        if sigma.len() != self.arity() {
            return Err(Error::InvalidPermutation(format!(
                "permutation of {} letters acting on a tree with {} leaves",
                sigma.len(),
                self.arity()
            )));
        }
        let mut t = self.clone();
        t.relabel(|a| sigma.apply(a));
        Ok(t)
    }

    pub fn canonical_key(&self) -> TreeKey {
        debug_assert!(self.is_sorted());
        self.key()
    }
}

/// Nested-array JSON form of a tree: leaves are integers, vertices arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Shape {
    Leaf(usize),
    Node(Vec<Shape>),
}

impl Serialize for NestedTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_shape().serialize(s)
    }
}

impl<'de> Deserialize<'de> for NestedTree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let shape = Shape::deserialize(d)?;
        NestedTree::from_shape(&shape).map_err(serde::de::Error::custom)
    }
}

pub const MAX_ENUMERATION_ARITY: usize = 8;

/// All nested trees on `k` labelled leaves, each once, sorted by key.
pub fn enumerate_trees(k: usize) -> Result<Vec<NestedTree>> {
    if !(2..=MAX_ENUMERATION_ARITY).contains(&k) {
        return Err(Error::UnsupportedArity(k));
    }
    let mut memo = HashMap::new();
    let full = (1u32 << k) - 1;
    let mut out = trees_on(full, &mut memo);
    out.sort_by_cached_key(|t| t.key());
    Ok(out)
}

// Trees whose leaves are the set bits of `mask` (bit i is leaf i+1).
fn trees_on(mask: u32, memo: &mut HashMap<u32, Vec<NestedTree>>) -> Vec<NestedTree> {
    if let Some(ts) = memo.get(&mask) {
        return ts.clone();
    }
    let elems: Vec<usize> = (0..32).filter(|b| mask >> b & 1 == 1).collect();
    let mut out = Vec::new();
    for blocks in set_partitions(&elems) {
        if blocks.len() < 2 {
            continue;
        }
        let options: Vec<Vec<Child<(), ()>>> = blocks
            .iter()
            .map(|b| {
                if b.len() == 1 {
                    vec![Child::Leaf(b[0] + 1)]
                } else {
                    let m = b.iter().fold(0u32, |acc, &i| acc | 1 << i);
                    trees_on(m, memo)
                        .into_iter()
                        .map(|t| Child::Node((), Box::new(t)))
                        .collect()
                }
            })
            .collect();
        for children in cartesian(&options) {
            // blocks come ordered by smallest element, so this is canonical
            out.push(Tree { data: (), children });
        }
    }
    memo.insert(mask, out.clone());
    out
}

fn set_partitions(elems: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn go(i: usize, elems: &[usize], blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == elems.len() {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(elems[i]);
            go(i + 1, elems, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![elems[i]]);
        go(i + 1, elems, blocks, out);
        blocks.pop();
    }
    go(0, elems, &mut blocks, &mut out);
    out
}

fn cartesian<T: Clone>(options: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut acc: Vec<Vec<T>> = vec![Vec::new()];
    for opts in options {
        let mut next = Vec::with_capacity(acc.len() * opts.len());
        for prefix in &acc {
            for o in opts {
                let mut v = prefix.clone();
                v.push(o.clone());
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> NestedTree {
        NestedTree::parse(s).unwrap()
    }

    #[test]
    fn graft_smallest_cases() {
        let c2 = NestedTree::corolla(2).unwrap();
        let (g, edge) = c2.graft(1, &c2).unwrap();
        assert_eq!(g, t("[[1,2],3]"));
        assert_eq!(edge.as_str(), "[1,2]");
        assert_eq!(g.edge_count(), 1);
        let (g, edge) = c2.graft(2, &c2).unwrap();
        assert_eq!(g, t("[1,[2,3]]"));
        assert_eq!(edge.as_str(), "[2,3]");
    }

    #[test]
    fn graft_counts_edges() {
        let c2 = NestedTree::corolla(2).unwrap();
        let (g, _) = t("[[1,2],3]").graft(3, &c2).unwrap();
        assert_eq!(g.arity(), 4);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g, t("[[1,2],[3,4]]"));
    }

    #[test]
    fn graft_rejects_bad_leaf() {
        let c2 = NestedTree::corolla(2).unwrap();
        assert_eq!(
            c2.graft(3, &c2),
            Err(Error::LeafOutOfRange { index: 3, arity: 2 })
        );
        assert!(c2.graft(0, &c2).is_err());
    }

    #[test]
    fn planar_presentations_share_a_key() {
        assert_eq!(t("[3,[2,1]]").canonical_key(), t("[[1,2],3]").canonical_key());
        assert_ne!(t("[[1,2],3]").canonical_key(), t("[1,[2,3]]").canonical_key());
    }

    #[test]
    fn act_perm_relabels() {
        let tree = t("[[1,2],3]");
        let id = Permutation::identity(3);
        assert_eq!(tree.act_perm(&id).unwrap(), tree);
        let s12 = Permutation::from_images(vec![2, 1, 3]).unwrap();
        assert_eq!(tree.act_perm(&s12).unwrap(), tree);
        let s13 = Permutation::from_images(vec![3, 2, 1]).unwrap();
        let moved = tree.act_perm(&s13).unwrap();
        assert_eq!(moved, t("[[3,2],1]"));
        assert_ne!(moved.canonical_key(), tree.canonical_key());
        assert!(tree.act_perm(&Permutation::identity(2)).is_err());
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_trees(2).unwrap().len(), 1);
        let k3 = enumerate_trees(3).unwrap();
        assert_eq!(k3.len(), 4);
        assert_eq!(k3.iter().filter(|t| t.edge_count() == 1).count(), 3);
        assert!(enumerate_trees(1).is_err());
        assert!(enumerate_trees(9).is_err());
    }

    #[test]
    fn rejects_malformed_trees() {
        assert!(NestedTree::parse("[[1],2]").is_err());
        assert!(NestedTree::parse("[1,3]").is_err());
        assert!(NestedTree::parse("[1,1]").is_err());
        assert!(NestedTree::parse("1").is_err());
        assert!(NestedTree::parse("[[1,2],3").is_err());
    }

    #[test]
    fn cut_and_graft_round_trip() {
        let tree = t("[[1,[2,5]],[3,4],6]");
        for mask in 0..8u32 {
            // tag each edge by its position so the predicate selects a subset
            let mut tagged: Tree<(), usize> = tree.map_ref(&mut |_| (), &mut |_| 0);
            let mut next = 0;
            tagged.for_each_edge_mut(&mut |e| {
                *e = next;
                next += 1;
            });
            let (skel, frags) = tagged.cut(&|e| mask >> e & 1 == 1);
            assert_eq!(skel.edge_count(), mask.count_ones() as usize);
            assert_eq!(frags.len(), skel.vertex_count());
            for (f, v) in frags.iter().zip(skel.vertices()) {
                assert_eq!(f.arity(), v.valence());
                f.validate_shape().unwrap();
            }
            let back = Tree::graft_along(&skel, frags).unwrap();
            assert_eq!(back, tagged);
        }
    }

    #[test]
    fn json_form() {
        let tree = t("[[1,2],3]");
        assert_eq!(serde_json::to_string(&tree).unwrap(), "[[1,2],3]");
        let back: NestedTree = serde_json::from_str("[3,[2,1]]").unwrap();
        assert_eq!(back, tree);
    }
}
