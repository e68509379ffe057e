//! The Boardman–Vogt construction `WF_n(k)`.
//!
//! A point is a nested tree whose vertices carry labels in `F_n(|v|)` and
//! whose internal edges carry lengths in `[0, 1]`, modulo collapsing a
//! zero-length edge into a single vertex labelled by the composite. Stored
//! points are canonical: every length lies in `(0, 1]`. Labels may be
//! boundary points of `F_n(|v|)`; they are never expanded into longer trees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invariant, Error, Result};
use crate::fm::{self, check_rho0, theta_compose, FmPoint, Region};
use crate::group::GroupElement;
use crate::tree::{Child, NestedTree, Tree};

pub type WTree = Tree<FmPoint, f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct WPoint {
    n: usize,
    rho0: f64,
    root: WTree,
}

fn corolla_over(label: FmPoint) -> WTree {
    let m = label.arity();
    Tree::from_parts(label, (1..=m).map(Child::Leaf).collect())
}

/// Collapses every edge whose length satisfies `pred`, composing the labels
/// of each collapsed region along its shape.
pub fn collapse_edges(root: WTree, pred: impl Fn(f64) -> bool) -> Result<WTree> {
    let (skeleton, regions) = root.cut(&|l: &f64| !pred(*l));
    let parts = regions
        .into_iter()
        .map(|region| {
            if region.edge_count() == 0 {
                Ok(region)
            } else {
                let labels: Vec<FmPoint> =
                    region.vertices().into_iter().map(|v| v.data().clone()).collect();
                Ok(corolla_over(theta_compose(&region.shape(), &labels)?))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Tree::graft_along(&skeleton, parts)
}

impl WPoint {
    /// Validates a raw labelled tree (lengths in `[0, 1]`) and collapses its
    /// zero-length edges.
    pub fn from_raw(mut root: WTree) -> Result<Self> {
        root.validate_shape()?;
        let (n, rho0) = (root.data().dim(), root.data().rho0());
        check_rho0(rho0)?;
        for v in root.vertices() {
            let label = v.data();
            if label.arity() != v.valence() {
                return Err(invariant(
                    "label arity equals valence",
                    format!("vertex {v} of valence {} has a label of arity {}", v.valence(), label.arity()),
                ));
            }
            if label.dim() != n || label.rho0() != rho0 {
                return Err(invariant(
                    "labels share n and rho0",
                    format!(
                        "label with (n={}, rho0={}) in a point with (n={n}, rho0={rho0})",
                        label.dim(),
                        label.rho0()
                    ),
                ));
            }
        }
        for (&l, _) in root.edges() {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::OutOfRange {
                    name: "length",
                    value: l,
                    range: "[0, 1]",
                });
            }
        }
        root.canonicalize();
        let root = collapse_edges(root, |l| l == 0.0)?;
        Ok(WPoint { n, rho0, root })
    }

    /// Builds a point from a tree, labels (pre-order of vertices) and lengths
    /// (pre-order of edges), collapsing zero lengths.
    pub fn make(tree: &NestedTree, labels: Vec<FmPoint>, lengths: Vec<f64>) -> Result<Self> {
        if labels.len() != tree.vertex_count() || lengths.len() != tree.edge_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels and {} lengths for a tree with {} vertices and {} edges",
                labels.len(),
                lengths.len(),
                tree.vertex_count(),
                tree.edge_count()
            )));
        }
        let mut ls = labels.into_iter();
        let mut es = lengths.into_iter();
        Self::from_raw(tree.map_ref(&mut |_| ls.next().unwrap(), &mut |_| es.next().unwrap()))
    }

    /// The inclusion `F(k) ⊂ WF(k)`.
    pub fn single(label: FmPoint) -> Self {
        WPoint {
            n: label.dim(),
            rho0: label.rho0(),
            root: corolla_over(label),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.root.arity()
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn root(&self) -> &WTree {
        &self.root
    }

    pub fn tree(&self) -> NestedTree {
        self.root.shape()
    }

    pub fn labels(&self) -> Vec<&FmPoint> {
        self.root.vertices().into_iter().map(|v| v.data()).collect()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.root.edges().into_iter().map(|(l, _)| *l).collect()
    }

    pub fn is_single_vertex(&self) -> bool {
        self.root.edge_count() == 0
    }

    /// Label of a single-vertex point.
    pub fn single_label(&self) -> Option<&FmPoint> {
        self.is_single_vertex().then(|| self.root.data())
    }

    /// Longest internal edge, `None` for a single vertex.
    pub fn max_length(&self) -> Option<f64> {
        self.root.edges().into_iter().map(|(l, _)| *l).reduce(f64::max)
    }

    /// Cuts every edge of maximal length. Returns the skeleton recording how
    /// the pieces reattach and the pieces in pre-order of its vertices;
    /// [`reassemble`] with the maximal length rebuilds `self`.
    pub fn cut_max_edges(&self) -> Result<(NestedTree, Vec<WPoint>)> {
        let max = self.max_length().ok_or_else(|| {
            Error::ShapeMismatch("a single-vertex point has no edge to cut".into())
        })?;
        let (skeleton, parts) = self.root.cut(&|l| *l == max);
        let parts = parts
            .into_iter()
            .map(|root| WPoint { root, ..*self })
            .collect();
        Ok((skeleton.shape(), parts))
    }

    /// Action of `(σ, Q)`: leaves relabelled by `σ`, every label rotated by
    /// `Q`, lengths untouched.
    pub fn act(&self, g: &GroupElement) -> Result<WPoint> {
        if g.arity() != self.arity() || g.dim() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "group element for (k={}, n={}) acting on (k={}, n={})",
                g.arity(),
                g.dim(),
                self.arity(),
                self.n
            )));
        }
        let mut root = self.root.clone();
        let mut err = None;
        root.for_each_vertex_mut(&mut |label| {
            let rot = GroupElement::from_orthogonal(label.arity(), g.q().clone())
                .and_then(|h| label.act(&h));
            match rot {
                Ok(l) => *label = l,
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        root.relabel(|a| g.perm().apply(a));
        Ok(WPoint { root, ..*self })
    }

    /// The continuous map `WF(k) → F(k)` that splices all labels together
    /// and turns an edge of length `ℓ` into a scale `ℓ/2`. Zero-length edges
    /// go to `u = 0`, matching the collapse relation.
    pub fn flatten(&self) -> FmPoint {
        let skeleton = self.root.map_ref(&mut |_| (), &mut |l| l / 2.0);
        let parts = self
            .root
            .vertices()
            .into_iter()
            .map(|v| v.data().root().clone())
            .collect();
        let root = Tree::graft_along(&skeleton, parts).expect("label arities match valences");
        FmPoint::from_valid(self.n, self.rho0, root)
    }
}

/// Grafts `parts` (pre-order of the vertices of `tree`) along `tree`, giving
/// every new edge the same `length`; a zero length collapses them.
pub fn reassemble(tree: &NestedTree, parts: &[WPoint], length: f64) -> Result<WPoint> {
    let first = parts.first().ok_or_else(|| Error::ShapeMismatch("no parts".into()))?;
    if !(0.0..=1.0).contains(&length) {
        return Err(Error::OutOfRange {
            name: "length",
            value: length,
            range: "[0, 1]",
        });
    }
    if parts.len() != tree.vertex_count() {
        return Err(Error::ShapeMismatch(format!(
            "{} parts for a tree with {} vertices",
            parts.len(),
            tree.vertex_count()
        )));
    }
    for (v, p) in tree.vertices().into_iter().zip(parts) {
        if p.arity() != v.valence() {
            return Err(Error::ShapeMismatch(format!(
                "part of arity {} at vertex {v} of valence {}",
                p.arity(),
                v.valence()
            )));
        }
        if p.n != first.n || p.rho0 != first.rho0 {
            return Err(Error::ShapeMismatch("parts disagree on dimension or rho0".into()));
        }
    }
    let skeleton = tree.map_ref(&mut |_| (), &mut |_| length);
    let root = Tree::graft_along(&skeleton, parts.iter().map(|p| p.root.clone()).collect())?;
    let root = if length == 0.0 {
        collapse_edges(root, |l| l == 0.0)?
    } else {
        root
    };
    Ok(WPoint { root, ..*first })
}

/// Operad composition in `WF`: graft along `tree`, new edges of length 1.
pub fn w_compose(tree: &NestedTree, parts: &[WPoint]) -> Result<WPoint> {
    reassemble(tree, parts, 1.0)
}

/// Partial composition `a ∘_i b` in `WF`.
pub fn w_compose_at(a: &WPoint, i: usize, b: &WPoint) -> Result<WPoint> {
    let c1 = NestedTree::corolla(a.arity())?;
    let c2 = NestedTree::corolla(b.arity())?;
    let (tree, _) = c1.graft(i, &c2)?;
    w_compose(&tree, &[a.clone(), b.clone()])
}

fn check_same_space(v: &WPoint, w: &WPoint) -> Result<()> {
    if v.n != w.n || v.arity() != w.arity() || v.rho0 != w.rho0 {
        return Err(Error::ShapeMismatch(format!(
            "comparing (n={}, k={}, rho0={}) with (n={}, k={}, rho0={})",
            v.n,
            v.arity(),
            v.rho0,
            w.n,
            w.arity(),
            w.rho0
        )));
    }
    Ok(())
}

/// Largest discrepancy in lengths and labels between two points on the same
/// tree whose labels share trees, `None` otherwise.
pub fn w_chart_distance(v: &WPoint, w: &WPoint) -> Result<Option<f64>> {
    check_same_space(v, w)?;
    if v.root.key() != w.root.key() {
        return Ok(None);
    }
    let mut d: f64 = 0.0;
    for (a, b) in v.lengths().into_iter().zip(w.lengths()) {
        d = d.max((a - b).abs());
    }
    for (a, b) in v.labels().into_iter().zip(w.labels()) {
        match fm::chart_distance(a, b)? {
            Some(x) => d = d.max(x),
            None => return Ok(None),
        }
    }
    Ok(Some(d))
}

/// Same canonical tree, lengths within `tol`, labels `approx_eq` within `tol`.
pub fn w_approx_eq(v: &WPoint, w: &WPoint, tol: f64) -> Result<bool> {
    Ok(w_chart_distance(v, w)?.is_some_and(|d| d <= tol))
}

/// Distance between the realizations of the flattened points when both are
/// interior, falling back to the chart distance of the flattened points;
/// infinite when neither applies.
pub fn w_realization_distance(v: &WPoint, w: &WPoint) -> Result<f64> {
    check_same_space(v, w)?;
    let (p, q) = (v.flatten(), w.flatten());
    if let (Ok(x), Ok(y)) = (p.realize(), q.realize()) {
        return crate::config::config_dist(&x, &y);
    }
    Ok(fm::chart_distance(&p, &q)?.unwrap_or(f64::INFINITY))
}

/// Deterministic random point of `WF_n(k)`: random tree, labels drawn from
/// every region of `F`, lengths in `(0, 1]` with deliberate ties and ones.
pub fn random_w_sample(n: usize, k: usize, seed: u64) -> Result<WPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_w_with(&mut rng, n, k, fm::DEFAULT_RHO0)
}

pub fn sample_w_with<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, rho0: f64) -> Result<WPoint> {
    let tree = fm::random_tree(rng, k);
    let labels = tree
        .vertices()
        .into_iter()
        .map(|v| {
            let m = v.valence();
            let regions: &[Region] = if m == 2 { &[Region::Interior] } else { &Region::ALL };
            let r = regions[rng.random_range(0..regions.len())];
            fm::sample_with(rng, n, m, rho0, r)
        })
        .collect::<Result<Vec<_>>>()?;
    let tie = 1.0 - rng.random_range(0.0..1.0);
    let lengths = (0..tree.edge_count())
        .map(|_| match rng.random_range(0..5) {
            0 => 1.0,
            1 => tie,
            _ => 1.0 - rng.random_range(0.0..1.0),
        })
        .collect();
    WPoint::make(&tree, labels, lengths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fm::{random_sample, DEFAULT_RHO0};

    fn t(s: &str) -> NestedTree {
        NestedTree::parse(s).unwrap()
    }

    fn pair(seed: u64) -> (FmPoint, FmPoint) {
        (
            random_sample(2, 2, seed, Region::Interior).unwrap(),
            random_sample(2, 2, seed + 100, Region::Interior).unwrap(),
        )
    }

    #[test]
    fn make_collapses_all_zero_lengths() {
        let (a, b) = pair(1);
        let tree = t("[[1,2],3]");
        let w = WPoint::make(&tree, vec![a.clone(), b.clone()], vec![0.0]).unwrap();
        assert!(w.is_single_vertex());
        let composite = theta_compose(&tree, &[a, b]).unwrap();
        assert_eq!(w.single_label(), Some(&composite));
    }

    #[test]
    fn make_keeps_positive_lengths() {
        let (a, b) = pair(2);
        let w = WPoint::make(&t("[[1,2],3]"), vec![a, b], vec![0.4]).unwrap();
        assert_eq!(w.lengths(), vec![0.4]);
        assert_eq!(WPoint::from_raw(w.root().clone()).unwrap(), w);
    }

    #[test]
    fn make_collapses_only_zero_edges() {
        let tree = t("[[1,2],[3,4]]");
        let labels = (0..3)
            .map(|i| random_sample(1, 2, i, Region::Interior).unwrap())
            .collect();
        let w = WPoint::make(&tree, labels, vec![0.0, 0.7]).unwrap();
        assert_eq!(w.tree(), t("[1,2,[3,4]]"));
        assert_eq!(w.lengths(), vec![0.7]);
        assert_eq!(w.labels()[0].tree(), t("[[1,2],3]"));
    }

    #[test]
    fn make_rejects_bad_input() {
        let (a, b) = pair(3);
        assert!(WPoint::make(&t("[[1,2],3]"), vec![a.clone(), b.clone()], vec![1.5]).is_err());
        assert!(WPoint::make(&t("[[1,2],3]"), vec![a.clone()], vec![0.5]).is_err());
        let c = random_sample(2, 3, 0, Region::Interior).unwrap();
        assert!(WPoint::make(&t("[[1,2],3]"), vec![a, c], vec![0.5]).is_err());
    }

    #[test]
    fn compose_two_vertices() {
        let (a, b) = pair(4);
        let w = w_compose(&t("[[1,2],3]"), &[WPoint::single(a.clone()), WPoint::single(b.clone())])
            .unwrap();
        assert_eq!(w.lengths(), vec![1.0]);
        assert_eq!(w.labels(), vec![&a, &b]);
        let unit = w_compose(&NestedTree::corolla(3).unwrap(), std::slice::from_ref(&w)).unwrap();
        assert_eq!(unit, w);
    }

    #[test]
    fn max_length_and_cut() {
        let (a, b) = pair(5);
        let single = WPoint::single(a.clone());
        assert_eq!(single.max_length(), None);
        assert!(single.cut_max_edges().is_err());

        let w = w_compose(&t("[[1,2],3]"), &[WPoint::single(a.clone()), WPoint::single(b.clone())])
            .unwrap();
        let (skel, parts) = w.cut_max_edges().unwrap();
        assert_eq!(skel, t("[[1,2],3]"));
        assert_eq!(parts, vec![WPoint::single(a.clone()), WPoint::single(b.clone())]);

        let labels = (0..3)
            .map(|i| random_sample(1, 2, 10 + i, Region::Interior).unwrap())
            .collect();
        let w = WPoint::make(&t("[[1,2],[3,4]]"), labels, vec![0.4, 1.0]).unwrap();
        assert_eq!(w.max_length(), Some(1.0));
        let (skel, parts) = w.cut_max_edges().unwrap();
        assert_eq!(skel.edge_count(), 1);
        assert_eq!(parts.iter().map(|p| p.lengths()).collect::<Vec<_>>(), vec![vec![0.4], vec![]]);
        assert_eq!(reassemble(&skel, &parts, 1.0).unwrap(), w);
    }

    #[test]
    fn cut_reassemble_round_trip() {
        for seed in 0..500 {
            let k = 2 + (seed as usize % 5);
            let w = random_w_sample((seed % 3 + 1) as usize, k, seed).unwrap();
            let Some(max) = w.max_length() else { continue };
            let (skel, parts) = w.cut_max_edges().unwrap();
            assert!(parts.iter().all(|p| p.max_length().is_none_or(|l| l < max)));
            assert_eq!(reassemble(&skel, &parts, max).unwrap(), w);
        }
    }

    #[test]
    fn lengths_and_identity_under_action() {
        let w = random_w_sample(2, 4, 7).unwrap();
        assert_eq!(w.act(&GroupElement::identity(4, 2)).unwrap(), w);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = GroupElement::random(4, 2, &mut rng);
        let mut a = w.lengths();
        let mut b = w.act(&g).unwrap().lengths();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
    }

    #[test]
    fn approx_eq_cases() {
        let w = random_w_sample(2, 4, 8).unwrap();
        assert!(w_approx_eq(&w, &w, 0.0).unwrap());
        let mut root = w.root().clone();
        root.for_each_edge_mut(&mut |l| *l = (*l - 5e-10).max(1e-3));
        let nudged = WPoint::from_raw(root).unwrap();
        assert!(w_approx_eq(&w, &nudged, 1e-9).unwrap());
        let other = WPoint::single(random_sample(2, 4, 1, Region::Interior).unwrap());
        if !w.is_single_vertex() {
            assert!(!w_approx_eq(&w, &other, 1.0).unwrap());
        }
    }

    #[test]
    fn flatten_sends_lengths_to_half_scales() {
        let (a, b) = pair(9);
        let w = WPoint::make(&t("[[1,2],3]"), vec![a, b], vec![0.5]).unwrap();
        assert_eq!(w.flatten().edge_u(), vec![0.25]);
        assert_eq!(w.flatten().rho0(), DEFAULT_RHO0);
    }
}
