//! Graphviz export: leaves are boxes, vertices circles, and edges of
//! `F` and `WF` points carry their scale or length.

use std::fmt::Write;

use crate::fm::FmPoint;
use crate::tree::{Child, NestedTree, Tree};
use crate::w::WPoint;

fn render<V, E>(tree: &Tree<V, E>, edge_label: &dyn Fn(&E) -> Option<String>) -> String {
    let mut out = String::from("digraph tree {\n  node [shape=circle, label=\"\"];\n");
    let mut next = 0usize;
    walk(tree, edge_label, &mut next, &mut out);
    for a in tree.leaves() {
        writeln!(out, "  l{a} [shape=box, label=\"{a}\"];").unwrap();
    }
    out.push_str("}\n");
    out
}

fn walk<V, E>(
    tree: &Tree<V, E>,
    edge_label: &dyn Fn(&E) -> Option<String>,
    next: &mut usize,
    out: &mut String,
) -> usize {
    let id = *next;
    *next += 1;
    writeln!(out, "  v{id};").unwrap();
    for c in tree.children() {
        match c {
            Child::Leaf(a) => writeln!(out, "  v{id} -> l{a};").unwrap(),
            Child::Node(e, t) => {
                let child = walk(t, edge_label, next, out);
                match edge_label(e) {
                    Some(l) => writeln!(out, "  v{id} -> v{child} [label=\"{l}\"];").unwrap(),
                    None => writeln!(out, "  v{id} -> v{child};").unwrap(),
                }
            }
        }
    }
    id
}

pub fn tree_to_dot(tree: &NestedTree) -> String {
    render(tree, &|_| None)
}

pub fn fm_to_dot(p: &FmPoint) -> String {
    render(p.root(), &|u| Some(format!("u={u}")))
}

pub fn w_to_dot(w: &WPoint) -> String {
    render(w.root(), &|l| Some(format!("{l}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_dot() {
        let dot = tree_to_dot(&NestedTree::parse("[[1,2],3]").unwrap());
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("shape=box").count(), 3);
        assert!(dot.contains("v0 -> v1;"));
        assert!(dot.contains("v1 -> l2;"));
        assert!(dot.contains("v0 -> l3;"));
    }

    #[test]
    fn w_dot_shows_lengths() {
        let w = crate::w::random_w_sample(1, 4, 2).unwrap();
        let dot = w_to_dot(&w);
        for l in w.lengths() {
            assert!(dot.contains(&format!("label=\"{l}\"")));
        }
    }
}
