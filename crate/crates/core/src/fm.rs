//! Points of the Fulton–MacPherson compactification `F_n(k)`.
//!
//! A point is stored in stratified normal form: a nested tree, a
//! cluster-free normalized configuration at every vertex (one point per
//! child), and a scale `u ∈ [0, 1)` on every internal edge. `u = 0` marks an
//! infinitesimal cluster, so the point lies on the boundary stratum of the
//! tree obtained by keeping only its zero edges. As `u → 1` a cluster grows to
//! the detection threshold and dissolves into its parent.
//!
//! Vertex configurations are indexed by child position (children sorted by
//! smallest leaf). [`realize`](FmPoint::realize) turns an interior normal
//! form into an honest configuration by inserting child clusters at scale
//! `ρ0 · u · sep`, and [`decompose`] recovers the normal form by
//! single-linkage cluster detection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::collar::collar_apply;
use crate::config::{
    self, centroid, cluster_passes, normalize_with_frame, spread, Dendrogram, NormalizedConfig,
    Point,
};
use crate::error::{invariant, Error, Result};
use crate::group::{GroupElement, Permutation};
use crate::tree::{Child, NestedTree, Slots, Tree};

/// Default cluster ratio `ρ0`.
pub const DEFAULT_RHO0: f64 = 1.0 / 16.0;

/// Vertex configurations produced by the samplers pass the cluster test at
/// this multiple of `ρ0`, for every subset. That margin keeps detection on
/// realized configurations away from the threshold.
pub const SAMPLER_MARGIN_FACTOR: f64 = 4.0;

pub type FmTree = Tree<NormalizedConfig, f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct FmPoint {
    n: usize,
    rho0: f64,
    root: FmTree,
}

pub fn check_rho0(rho0: f64) -> Result<()> {
    if rho0 > 0.0 && rho0 < 0.125 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "rho0",
            value: rho0,
            range: "(0, 1/8)",
        })
    }
}

impl FmPoint {
    /// Validates every normal-form invariant and canonicalizes child order.
    pub fn new(rho0: f64, mut root: FmTree) -> Result<Self> {
        check_rho0(rho0)?;
        root.validate_shape()?;
        root.canonicalize();
        let n = root.data.dim();
        let p = FmPoint { n, rho0, root };
        p.validate()?;
        Ok(p)
    }

    pub(crate) fn from_valid(n: usize, rho0: f64, root: FmTree) -> Self {
        FmPoint { n, rho0, root }
    }

    /// Builds a point from a tree, vertex configurations (pre-order) and edge
    /// scales (pre-order of lower endpoints).
    pub fn from_parts(
        tree: &NestedTree,
        configs: Vec<NormalizedConfig>,
        edge_u: Vec<f64>,
        rho0: f64,
    ) -> Result<Self> {
        if configs.len() != tree.vertex_count() || edge_u.len() != tree.edge_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} configs and {} scales for a tree with {} vertices and {} edges",
                configs.len(),
                edge_u.len(),
                tree.vertex_count(),
                tree.edge_count()
            )));
        }
        let mut cs = configs.into_iter();
        let mut us = edge_u.into_iter();
        let root = tree.map_ref(&mut |_| cs.next().unwrap(), &mut |_| us.next().unwrap());
        Self::new(rho0, root)
    }

    /// Inclusion of the open configuration space: a corolla labelled by `x`.
    pub fn interior_point(x: NormalizedConfig, rho0: f64) -> Result<Self> {
        check_rho0(rho0)?;
        if !x.is_cluster_free(rho0) {
            return Err(invariant(
                "cluster-free vertex configuration",
                "configuration has a detectable cluster; decompose it instead",
            ));
        }
        let k = x.len();
        Ok(FmPoint {
            n: x.dim(),
            rho0,
            root: Tree::from_parts(x, (1..=k).map(Child::Leaf).collect()),
        })
    }

    pub fn validate(&self) -> Result<()> {
        check_rho0(self.rho0)?;
        for v in self.root.vertices() {
            let x = v.data();
            if x.dim() != self.n {
                return Err(invariant(
                    "common dimension",
                    format!("vertex {} has dimension {}", v, x.dim()),
                ));
            }
            if x.len() != v.valence() {
                return Err(invariant(
                    "config size equals valence",
                    format!("vertex {} has {} points for {} children", v, x.len(), v.valence()),
                ));
            }
            if !x.is_cluster_free(self.rho0) {
                return Err(invariant(
                    "cluster-free vertex configuration",
                    format!("vertex {v} is not cluster-free at rho0 = {}", self.rho0),
                ));
            }
        }
        for (&u, sub) in self.root.edges() {
            if !(0.0..1.0).contains(&u) {
                return Err(invariant(
                    "edge scale in [0,1)",
                    format!("edge {sub} has u = {u}"),
                ));
            }
        }
        Ok(())
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

    pub fn root(&self) -> &FmTree {
        &self.root
    }

    pub fn tree(&self) -> NestedTree {
        self.root.shape()
    }

    pub fn vertex_configs(&self) -> Vec<&NormalizedConfig> {
        self.root.vertices().into_iter().map(|v| v.data()).collect()
    }

    pub fn edge_u(&self) -> Vec<f64> {
        self.root.edges().into_iter().map(|(u, _)| *u).collect()
    }

    pub(crate) fn map_edge_u(&self, f: impl Fn(f64) -> f64) -> FmPoint {
        let mut root = self.root.clone();
        root.for_each_edge_mut(&mut |u| *u = f(*u));
        FmPoint { root, ..*self }
    }

    pub fn min_u(&self) -> Option<f64> {
        self.root.edges().into_iter().map(|(u, _)| *u).reduce(f64::min)
    }

    /// Lies in `∂F_n(k)`: some edge has `u = 0`.
    pub fn is_boundary(&self) -> bool {
        self.min_u() == Some(0.0)
    }

    /// The stratum containing the point: the tree of its zero edges.
    pub fn stratum_of(&self) -> NestedTree {
        self.root.cut(&|u| *u == 0.0).0.shape()
    }

    /// Splits along all zero edges: the stratum tree and the fragments at its
    /// vertices (pre-order), each with every edge scale positive.
    pub fn boundary_fragments(&self) -> (NestedTree, Vec<FmPoint>) {
        let (skel, frags) = self.root.cut(&|u| *u == 0.0);
        let frags = frags
            .into_iter()
            .map(|root| FmPoint { root, ..*self })
            .collect();
        (skel.shape(), frags)
    }

    /// Action of `(σ, Q)`: leaves relabelled by `σ`, every vertex
    /// configuration rotated by `Q`, scales untouched.
    pub fn act(&self, g: &GroupElement) -> Result<FmPoint> {
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
        root.for_each_vertex_mut(&mut |x| *x = x.rotate(g.q()));
        root.relabel(|a| g.perm().apply(a));
        Ok(FmPoint { root, ..*self })
    }

    pub fn act_perm(&self, sigma: &Permutation) -> Result<FmPoint> {
        self.act(&GroupElement::from_perm(sigma.clone(), self.n))
    }

    /// Honest configuration of an interior point (all `u > 0`), normalized.
    pub fn realize(&self) -> Result<NormalizedConfig> {
        self.realize_with(false)
    }

    /// Like [`realize`](Self::realize) but also accepts `u = 1`, where a
    /// cluster sits exactly at the dissolution threshold.
    pub fn realize_allowing_dissolution(&self) -> Result<NormalizedConfig> {
        self.realize_with(true)
    }

    fn realize_with(&self, allow_unit: bool) -> Result<NormalizedConfig> {
        let mut flat = realize_node(&self.root, self.rho0, allow_unit)?;
        flat.sort_by_key(|(a, _)| *a);
        NormalizedConfig::new(flat.into_iter().map(|(_, p)| p).collect())
    }
}

fn realize_node(node: &FmTree, rho0: f64, allow_unit: bool) -> Result<Vec<(usize, Point)>> {
    let x = node.data();
    let mut flat = Vec::new();
    for (j, c) in node.children().iter().enumerate() {
        match c {
            Child::Leaf(a) => flat.push((*a, x.point(j).clone())),
            Child::Node(u, sub) => {
                if *u <= 0.0 {
                    return Err(Error::BoundaryPoint);
                }
                if *u > 1.0 || (*u == 1.0 && !allow_unit) {
                    return Err(Error::OutOfRange {
                        name: "u",
                        value: *u,
                        range: "(0, 1)",
                    });
                }
                let scale = rho0 * u * x.separation(j);
                for (a, p) in realize_node(sub, rho0, allow_unit)? {
                    flat.push((a, x.point(j) + p * scale));
                }
            }
        }
    }
    let points: Vec<Point> = flat.iter().map(|(_, p)| p.clone()).collect();
    let normalized = config::normalize(&points)?;
    Ok(flat
        .into_iter()
        .map(|(a, _)| a)
        .zip(normalized.points().iter().cloned())
        .collect())
}

/// Normal form of a raw configuration of distinct points (leaf `i + 1` is
/// `points[i]`).
///
/// Maximal single-linkage clusters passing `spread(S) < ρ0 · dist(centroid(S),
/// rest)` become subtrees; each is replaced by its centroid, the parent is
/// normalized, and the cluster scale is read off as
/// `u = spread / (ρ0 · sep)` in the parent's normalized frame.
///
/// Configurations sitting at the detection threshold (a recovered `u ≥ 1` or
/// a parent configuration that is not cluster-free) are reported as
/// [`Error::ThresholdAmbiguity`].
pub fn decompose(points: &[Point], rho0: f64) -> Result<FmPoint> {
    check_rho0(rho0)?;
    let labels: Vec<usize> = (1..=points.len()).collect();
    let root = decompose_node(points, &labels, rho0)?;
    let n = root.data().dim();
    Ok(FmPoint { n, rho0, root })
}

enum Part {
    Single(usize),
    Cluster(Vec<usize>),
}

fn maximal_clusters(d: &Dendrogram, points: &[Point], rho0: f64, out: &mut Vec<Part>) {
    match d {
        Dendrogram::Point(i) => out.push(Part::Single(*i)),
        Dendrogram::Cluster {
            members, children, ..
        } => {
            if cluster_passes(points, members, rho0) {
                out.push(Part::Cluster(members.clone()));
            } else {
                for c in children {
                    maximal_clusters(c, points, rho0, out);
                }
            }
        }
    }
}

fn decompose_node(points: &[Point], labels: &[usize], rho0: f64) -> Result<FmTree> {
    let frame = normalize_with_frame(points)?;
    let pts = frame.config.points();
    let mut parts = Vec::new();
    match Dendrogram::single_linkage(pts) {
        Dendrogram::Cluster { children, .. } => {
            for c in &children {
                maximal_clusters(c, pts, rho0, &mut parts);
            }
        }
        Dendrogram::Point(_) => unreachable!("at least two points"),
    }
    let min_label = |p: &Part| match p {
        Part::Single(i) => labels[*i],
        Part::Cluster(ms) => ms.iter().map(|&i| labels[i]).min().unwrap(),
    };
    parts.sort_by_key(min_label);

    let reps: Vec<Point> = parts
        .iter()
        .map(|p| match p {
            Part::Single(i) => pts[*i].clone(),
            Part::Cluster(ms) => centroid(&ms.iter().map(|&i| pts[i].clone()).collect::<Vec<_>>()),
        })
        .collect();
    let parent = normalize_with_frame(&reps)?;
    let x = parent.config;
    if !x.is_cluster_free(rho0) {
        return Err(Error::ThresholdAmbiguity(
            "parent configuration has a cluster after merging".into(),
        ));
    }
    let mut children = Vec::with_capacity(parts.len());
    for (j, p) in parts.iter().enumerate() {
        match p {
            Part::Single(i) => children.push(Child::Leaf(labels[*i])),
            Part::Cluster(ms) => {
                let sub_pts: Vec<Point> = ms.iter().map(|&i| pts[i].clone()).collect();
                let sub_labels: Vec<usize> = ms.iter().map(|&i| labels[i]).collect();
                let observed = spread(&sub_pts) / parent.scale;
                let u = observed / (rho0 * x.separation(j));
                if !(u > 0.0 && u < 1.0) {
                    return Err(Error::ThresholdAmbiguity(format!(
                        "recovered scale u = {u} outside (0,1)"
                    )));
                }
                let sub = decompose_node(&sub_pts, &sub_labels, rho0)?;
                children.push(Child::Node(u, Box::new(sub)));
            }
        }
    }
    Ok(Tree::from_parts(x, children))
}

/// Operad composition along `tree`: `labels` (pre-order of vertices) have
/// arities equal to the valences. Every edge of `tree` becomes an edge with
/// `u = 0`; edges inside labels keep their scales.
pub fn theta_compose(tree: &NestedTree, labels: &[FmPoint]) -> Result<FmPoint> {
    let first = labels.first().ok_or_else(|| Error::ShapeMismatch("no labels".into()))?;
    if labels.len() != tree.vertex_count() {
        return Err(Error::ShapeMismatch(format!(
            "{} labels for a tree with {} vertices",
            labels.len(),
            tree.vertex_count()
        )));
    }
    for (v, l) in tree.vertices().into_iter().zip(labels) {
        if l.arity() != v.valence() {
            return Err(Error::ShapeMismatch(format!(
                "label of arity {} at vertex {v} of valence {}",
                l.arity(),
                v.valence()
            )));
        }
        if l.n != first.n || l.rho0 != first.rho0 {
            return Err(Error::ShapeMismatch(
                "labels disagree on dimension or rho0".into(),
            ));
        }
    }
    let skeleton = tree.map_ref(&mut |_| (), &mut |_| 0.0);
    let root = Tree::graft_along(&skeleton, labels.iter().map(|l| l.root.clone()).collect())?;
    Ok(FmPoint { root, ..*first })
}

/// Partial composition `x ∘_i y`.
pub fn compose_at(x: &FmPoint, i: usize, y: &FmPoint) -> Result<FmPoint> {
    let c1 = NestedTree::corolla(x.arity())?;
    let c2 = NestedTree::corolla(y.arity())?;
    let (tree, _) = c1.graft(i, &c2)?;
    theta_compose(&tree, &[x.clone(), y.clone()])
}

fn check_same_space(p: &FmPoint, q: &FmPoint) -> Result<()> {
    if p.n != q.n || p.arity() != q.arity() || p.rho0 != q.rho0 {
        return Err(Error::ShapeMismatch(format!(
            "comparing (n={}, k={}, rho0={}) with (n={}, k={}, rho0={})",
            p.n,
            p.arity(),
            p.rho0,
            q.n,
            q.arity(),
            q.rho0
        )));
    }
    Ok(())
}

/// Largest discrepancy between two normal forms on the same tree (vertex
/// configurations and edge scales), or `None` if the trees differ.
pub fn chart_distance(p: &FmPoint, q: &FmPoint) -> Result<Option<f64>> {
    check_same_space(p, q)?;
    if p.root.key() != q.root.key() {
        return Ok(None);
    }
    let mut d: f64 = 0.0;
    for (a, b) in p.root.vertices().into_iter().zip(q.root.vertices()) {
        d = d.max(config::config_dist(a.data(), b.data())?);
    }
    for ((a, _), (b, _)) in p.root.edges().into_iter().zip(q.root.edges()) {
        d = d.max((a - b).abs());
    }
    Ok(Some(d))
}

/// Same canonical tree, and vertex configurations and scales within `tol`.
pub fn approx_eq(p: &FmPoint, q: &FmPoint, tol: f64) -> Result<bool> {
    Ok(chart_distance(p, q)?.is_some_and(|d| d <= tol))
}

impl Slots for FmPoint {
    fn permute_slots(&mut self, perm: &[usize]) {
        self.root.relabel(|a| perm[a - 1] + 1);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// Cluster-free corollas.
    Interior,
    /// Boundary points pushed in by the collar at a random time.
    Collar,
    /// Compositions along a random tree with at least one edge.
    Boundary,
    /// Random tree, random scales in `[0,1)` with some exact zeros.
    Mixed,
}

impl std::str::FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interior" => Ok(Region::Interior),
            "collar" => Ok(Region::Collar),
            "boundary" => Ok(Region::Boundary),
            "mixed" => Ok(Region::Mixed),
            other => Err(Error::UnknownRegion(other.to_string())),
        }
    }
}

impl Region {
    pub const ALL: [Region; 4] = [Region::Interior, Region::Collar, Region::Boundary, Region::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            Region::Interior => "interior",
            Region::Collar => "collar",
            Region::Boundary => "boundary",
            Region::Mixed => "mixed",
        }
    }

    /// Whether the region is non-empty at arity `k` (`F(2)` has no boundary).
    pub fn exists_at(self, k: usize) -> bool {
        k >= 3 || self == Region::Interior
    }
}

/// Deterministic sample of `F_n(k)` from `region`.
pub fn random_sample(n: usize, k: usize, seed: u64, region: Region) -> Result<FmPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(&mut rng, n, k, DEFAULT_RHO0, region)
}

pub fn sample_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
    rho0: f64,
    region: Region,
) -> Result<FmPoint> {
    check_rho0(rho0)?;
    if n == 0 {
        return Err(Error::ShapeMismatch("dimension must be at least 1".into()));
    }
    if k < 2 {
        return Err(Error::UnsupportedArity(k));
    }
    if !region.exists_at(k) {
        return Err(Error::ShapeMismatch(format!(
            "F(2) has no {} points",
            region.name()
        )));
    }
    match region {
        Region::Interior => {
            let x = random_cluster_free_config(rng, n, k, rho0);
            Ok(FmPoint::interior_point(x, rho0).expect("sampled config is cluster-free"))
        }
        Region::Boundary => {
            let tree = loop {
                let t = random_tree(rng, k);
                if t.edge_count() > 0 {
                    break t;
                }
            };
            let labels = tree
                .vertices()
                .into_iter()
                .map(|v| {
                    let m = v.valence();
                    let r = match (m, rng.random_range(0..4)) {
                        (2, _) | (_, 0) | (_, 1) => Region::Interior,
                        (_, 2) => Region::Collar,
                        _ => Region::Mixed,
                    };
                    sample_with(rng, n, m, rho0, r)
                })
                .collect::<Result<Vec<_>>>()?;
            theta_compose(&tree, &labels)
        }
        Region::Collar => {
            let w = sample_with(rng, n, k, rho0, Region::Boundary)?;
            let t = rng.random_range(0.0..=2.0);
            collar_apply(t, &w)
        }
        Region::Mixed => {
            let tree = random_tree(rng, k);
            let mut root = tree.map_ref(&mut |_| None, &mut |_| {
                if rng.random_bool(0.25) {
                    0.0
                } else {
                    rng.random_range(0.0..1.0)
                }
            });
            fill_configs(rng, &mut root, n, rho0);
            Ok(FmPoint::from_valid(n, rho0, unwrap_configs(root)))
        }
    }
}

/// Interior normal form with every scale in `[u_min, u_max]`.
pub fn sample_interior_normal_form<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
    rho0: f64,
    u_min: f64,
    u_max: f64,
) -> FmPoint {
    let tree = random_tree(rng, k);
    let mut root = tree.map_ref(&mut |_| None, &mut |_| rng.random_range(u_min..=u_max));
    fill_configs(rng, &mut root, n, rho0);
    FmPoint::from_valid(n, rho0, unwrap_configs(root))
}

fn fill_configs<R: Rng + ?Sized>(
    rng: &mut R,
    root: &mut Tree<Option<NormalizedConfig>, f64>,
    n: usize,
    rho0: f64,
) {
    let m = root.valence();
    root.data = Some(random_cluster_free_config(rng, n, m, rho0));
    for c in &mut root.children {
        if let Child::Node(_, t) = c {
            fill_configs(rng, t, n, rho0);
        }
    }
}

fn unwrap_configs(root: Tree<Option<NormalizedConfig>, f64>) -> FmTree {
    root.map_ref(&mut |x| x.clone().unwrap(), &mut |u| *u)
}

/// Rejection sample of `m` points with cluster margin at least
/// `SAMPLER_MARGIN_FACTOR · ρ0`.
pub fn random_cluster_free_config<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    rho0: f64,
) -> NormalizedConfig {
    let margin = SAMPLER_MARGIN_FACTOR * rho0;
    loop {
        let pts: Vec<Point> = (0..m)
            .map(|_| Point::from_fn(n, |_, _| rng.random_range(-1.0..1.0)))
            .collect();
        let Ok(x) = config::normalize(&pts) else {
            continue;
        };
        if m == 2 || x.cluster_margin() >= margin {
            return x;
        }
    }
}

/// Random nested tree on `k` leaves: leaves are inserted one at a time,
/// either as a new child of an existing vertex or by subdividing an edge,
/// then labels are shuffled.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, k: usize) -> NestedTree {
    let mut tree = NestedTree::corolla(2).expect("k >= 2");
    for leaf in 3..=k {
        let vertices = tree.vertex_count();
        // options: attach at a vertex, or subdivide one of the
        // (vertices - 1) internal edges, (leaf - 1) leaf edges, or the root
        let options = vertices + (vertices - 1) + (leaf - 1) + 1;
        let mut pick = rng.random_range(0..options);
        insert_leaf(&mut tree, leaf, &mut pick);
    }
    let sigma = Permutation::random(k, rng);
    tree.relabel(|a| sigma.apply(a));
    tree
}

// Walks vertices in pre-order spending `pick`; at each vertex the options are
// "attach here", "subdivide the edge above this vertex" (the root edge at the
// root), and "subdivide the edge above leaf child j".
fn insert_leaf(t: &mut NestedTree, leaf: usize, pick: &mut usize) -> bool {
    if *pick == 0 {
        t.children.push(Child::Leaf(leaf));
        return true;
    }
    *pick -= 1;
    if *pick == 0 {
        let old = std::mem::replace(t, NestedTree::corolla(2).unwrap());
        *t = Tree::from_parts((), vec![Child::Node((), Box::new(old)), Child::Leaf(leaf)]);
        return true;
    }
    *pick -= 1;
    for c in &mut t.children {
        match c {
            Child::Leaf(a) => {
                if *pick == 0 {
                    let a = *a;
                    *c = Child::Node(
                        (),
                        Box::new(Tree::from_parts((), vec![Child::Leaf(a), Child::Leaf(leaf)])),
                    );
                    return true;
                }
                *pick -= 1;
            }
            Child::Node(_, sub) => {
                if insert_leaf(sub, leaf, pick) {
                    return true;
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    const RHO0: f64 = DEFAULT_RHO0;

    fn cfg1(xs: &[f64]) -> NormalizedConfig {
        config::normalize(&xs.iter().map(|&x| DVector::from_vec(vec![x])).collect::<Vec<_>>())
            .unwrap()
    }

    fn t(s: &str) -> NestedTree {
        NestedTree::parse(s).unwrap()
    }

    #[test]
    fn interior_point_cases() {
        let p = FmPoint::interior_point(cfg1(&[-1.0, 0.0, 1.0]), RHO0).unwrap();
        assert_eq!(p.tree(), NestedTree::corolla(3).unwrap());
        assert!(p.edge_u().is_empty());
        let p2 = FmPoint::interior_point(cfg1(&[3.0, 5.0]), RHO0).unwrap();
        assert_eq!(p2.arity(), 2);
        assert!(FmPoint::interior_point(cfg1(&[-1.0, -0.99, 1.0]), RHO0).is_err());
    }

    #[test]
    fn realize_hand_computed() {
        // cluster of radius 1/16 around -1: leaves at -17/16, -15/16, 1;
        // centroid -1/3, half-width 4/3 after centering
        let p = FmPoint::from_parts(
            &t("[[1,2],3]"),
            vec![cfg1(&[-1.0, 1.0]), cfg1(&[-1.0, 1.0])],
            vec![0.5],
            RHO0,
        )
        .unwrap();
        let x = p.realize().unwrap();
        let got: Vec<f64> = x.points().iter().map(|q| q[0]).collect();
        let want = [-35.0 / 64.0, -29.0 / 64.0, 1.0];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-15, "{got:?}");
        }
    }

    #[test]
    fn realize_rejects_boundary() {
        let p = FmPoint::from_parts(
            &t("[[1,2],3]"),
            vec![cfg1(&[-1.0, 1.0]), cfg1(&[-1.0, 1.0])],
            vec![0.0],
            RHO0,
        )
        .unwrap();
        assert_eq!(p.realize(), Err(Error::BoundaryPoint));
    }

    #[test]
    fn decompose_tight_pair() {
        let pts: Vec<Point> = [-1.0, -1.0 + 1e-4, 1.0]
            .iter()
            .map(|&x| DVector::from_vec(vec![x]))
            .collect();
        let p = decompose(&pts, RHO0).unwrap();
        assert_eq!(p.tree(), t("[[1,2],3]"));
        // parent of centroids (-1 + 5e-5, 1) has half-width (2 - 5e-5)/2;
        // cluster spread 5e-5 in that frame over rho0 * sep = 2/16
        let want = (5e-5 / ((2.0 - 5e-5) / 2.0)) / (RHO0 * 2.0);
        assert!((p.edge_u()[0] - want).abs() < 1e-12);
        assert!(p.edge_u()[0] < 0.01);
    }

    #[test]
    fn decompose_cluster_free_is_corolla() {
        let x = cfg1(&[-1.0, 0.0, 1.0]);
        let p = decompose(x.points(), RHO0).unwrap();
        assert_eq!(p.tree(), NestedTree::corolla(3).unwrap());
        assert_eq!(p.vertex_configs()[0], &x);
    }

    #[test]
    fn decompose_coincident() {
        let pts: Vec<Point> = [0.0, 1.0, 0.0].iter().map(|&x| DVector::from_vec(vec![x])).collect();
        assert_eq!(decompose(&pts, RHO0), Err(Error::CoincidentPoints(0, 2)));
    }

    #[test]
    fn theta_compose_one_edge() {
        let a = FmPoint::interior_point(cfg1(&[-1.0, 1.0]), RHO0).unwrap();
        let tree = t("[[1,2],3]");
        let p = theta_compose(&tree, &[a.clone(), a.clone()]).unwrap();
        assert_eq!(p.edge_u(), vec![0.0]);
        assert!(p.is_boundary());
        assert_eq!(p.stratum_of(), tree);
        let corolla = NestedTree::corolla(2).unwrap();
        assert_eq!(theta_compose(&corolla, std::slice::from_ref(&a)).unwrap(), a);
        assert!(theta_compose(&tree, std::slice::from_ref(&a)).is_err());
    }

    #[test]
    fn stratum_of_mixed_scales() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tree = t("[[1,2],[3,4],5]");
        let configs = tree
            .vertices()
            .iter()
            .map(|v| random_cluster_free_config(&mut rng, 2, v.valence(), RHO0))
            .collect();
        let p = FmPoint::from_parts(&tree, configs, vec![0.0, 0.3], RHO0).unwrap();
        assert_eq!(p.stratum_of(), t("[[1,2],3,4,5]"));
        assert!(p.is_boundary());
    }

    #[test]
    fn approx_eq_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = sample_with(&mut rng, 2, 4, RHO0, Region::Mixed).unwrap();
        assert!(approx_eq(&p, &p, 0.0).unwrap());
        let bumped = p.map_edge_u(|u| if u > 0.0 { u + 5e-10 } else { u });
        if !p.edge_u().is_empty() {
            assert!(approx_eq(&p, &bumped, 1e-9).unwrap());
        }
        let other = FmPoint::interior_point(random_cluster_free_config(&mut rng, 2, 4, RHO0), RHO0)
            .unwrap();
        let boundary = sample_with(&mut rng, 2, 4, RHO0, Region::Boundary).unwrap();
        assert!(!approx_eq(&other, &boundary, 1.0).unwrap());
        let small = sample_with(&mut rng, 2, 3, RHO0, Region::Interior).unwrap();
        assert!(approx_eq(&p, &small, 1.0).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_valid() {
        for region in Region::ALL {
            let a = random_sample(2, 4, 9, region).unwrap();
            let b = random_sample(2, 4, 9, region).unwrap();
            assert_eq!(a, b);
            a.validate().unwrap();
        }
        let b = random_sample(1, 5, 3, Region::Boundary).unwrap();
        assert_ne!(b.stratum_of(), NestedTree::corolla(5).unwrap());
        assert!(random_sample(1, 2, 3, Region::Boundary).is_err());
        assert!("sideways".parse::<Region>().is_err());
    }

    #[test]
    fn random_trees_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 2..8 {
            for _ in 0..50 {
                let tree = random_tree(&mut rng, k);
                tree.validate_shape().unwrap();
                assert_eq!(tree.arity(), k);
            }
        }
    }
}
