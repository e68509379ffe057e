//! Point configurations in `R^n` modulo translation and positive dilation.
//!
//! The chosen section of the quotient puts the centroid at the origin and
//! scales so that the farthest point has norm 1.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::tree::Slots;

pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

pub type Point = DVector<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedConfig {
    n: usize,
    points: Vec<Point>,
}

/// Plain `{"n", "points"}` record, used for raw and normalized configurations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub n: usize,
    pub points: Vec<Vec<f64>>,
}

impl ConfigRecord {
    pub fn to_points(&self) -> Result<Vec<Point>> {
        if self.n == 0 {
            return Err(Error::ShapeMismatch("dimension must be at least 1".into()));
        }
        self.points
            .iter()
            .map(|p| {
                if p.len() != self.n {
                    Err(Error::ShapeMismatch(format!(
                        "point {p:?} does not have dimension {}",
                        self.n
                    )))
                } else {
                    Ok(DVector::from_column_slice(p))
                }
            })
            .collect()
    }
}

pub fn centroid(points: &[Point]) -> Point {
    let n = points[0].len();
    let mut c = DVector::zeros(n);
    for p in points {
        c += p;
    }
    c / points.len() as f64
}

/// Largest distance from the centroid.
pub fn spread(points: &[Point]) -> f64 {
    let c = centroid(points);
    points.iter().map(|p| (p - &c).norm()).fold(0.0, f64::max)
}

fn check_points(points: &[Point]) -> Result<usize> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints(points.len()));
    }
    let n = points[0].len();
    if n == 0 {
        return Err(Error::ShapeMismatch("dimension must be at least 1".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::ShapeMismatch(format!(
            "mixed dimensions {n} and {}",
            p.len()
        )));
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return Err(Error::CoincidentPoints(i, j));
            }
        }
    }
    Ok(n)
}

/// Normalization of a raw configuration together with the frame it used:
/// `normalized = (raw - center) / scale`.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub config: NormalizedConfig,
    pub center: Point,
    pub scale: f64,
}

pub fn normalize_with_frame(points: &[Point]) -> Result<Normalized> {
    let n = check_points(points)?;
    let center = centroid(points);
    let centered: Vec<Point> = points.iter().map(|p| p - &center).collect();
    let scale = centered.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let pts: Vec<Point> = centered.into_iter().map(|p| p / scale).collect();
    // distinct inputs can still collide after rounding at extreme ratios
    check_points(&pts)?;
    Ok(Normalized {
        config: NormalizedConfig { n, points: pts },
        center,
        scale,
    })
}

/// Centers at the centroid and scales the farthest point to norm 1.
pub fn normalize(points: &[Point]) -> Result<NormalizedConfig> {
    normalize_with_frame(points).map(|f| f.config)
}

impl NormalizedConfig {
    /// Wraps points that already satisfy the normalization invariants.
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let n = check_points(&points)?;
        let c = centroid(&points);
        if c.amax() > NORMALIZATION_TOLERANCE {
            return Err(crate::error::invariant(
                "centroid at origin",
                format!("centroid has coordinate {:e}", c.amax()),
            ));
        }
        let max = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
        if (max - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(crate::error::invariant(
                "max norm 1",
                format!("max norm is {max}"),
            ));
        }
        Ok(NormalizedConfig { n, points })
    }

    pub fn from_record(rec: &ConfigRecord) -> Result<Self> {
        Self::new(rec.to_points()?)
    }

    pub fn to_record(&self) -> ConfigRecord {
        ConfigRecord {
            n: self.n,
            points: self.points.iter().map(|p| p.iter().copied().collect()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    /// Distance from point `j` to its nearest neighbour.
    pub fn separation(&self, j: usize) -> f64 {
        self.points
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, p)| (p - &self.points[j]).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// `(σ, Q)·x`: point `i` of the result is `Q` applied to point `σ⁻¹(i)`.
    pub fn act(&self, g: &GroupElement) -> Result<Self> {
        if g.arity() != self.len() || g.dim() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "group element for (k={}, n={}) acting on (m={}, n={})",
                g.arity(),
                g.dim(),
                self.len(),
                self.n
            )));
        }
        let mut points = vec![DVector::zeros(self.n); self.len()];
        for (i, p) in self.points.iter().enumerate() {
            points[g.perm().apply(i + 1) - 1] = g.q() * p;
        }
        Ok(NormalizedConfig { n: self.n, points })
    }

    /// Applies only the orthogonal part.
    pub(crate) fn rotate(&self, q: &nalgebra::DMatrix<f64>) -> Self {
        NormalizedConfig {
            n: self.n,
            points: self.points.iter().map(|p| q * p).collect(),
        }
    }

    /// Whether no dendrogram cluster is tight relative to its distance from
    /// the remaining points: `spread(S) < ρ0 · dist(centroid(S), x \ S)`
    /// must fail for every proper single-linkage cluster `S`.
    pub fn is_cluster_free(&self, rho0: f64) -> bool {
        let dendrogram = Dendrogram::single_linkage(&self.points);
        dendrogram
            .proper_clusters()
            .iter()
            .all(|s| !cluster_passes(&self.points, s, rho0))
    }

    /// Smallest ratio `spread(S) / dist(centroid(S), x \ S)` over every
    /// proper subset `S` with at least two points (dendrogram clusters only
    /// above 12 points). A configuration with margin `r` is cluster-free for
    /// every `ρ0 ≤ r`.
    pub fn cluster_margin(&self) -> f64 {
        let m = self.len();
        let subsets: Vec<Vec<usize>> = if m <= 12 {
            (1u32..(1 << m) - 1)
                .filter(|s| s.count_ones() >= 2)
                .map(|s| (0..m).filter(|i| s >> i & 1 == 1).collect())
                .collect()
        } else {
            Dendrogram::single_linkage(&self.points).proper_clusters()
        };
        subsets
            .iter()
            .map(|s| {
                let (spr, dist) = cluster_stats(&self.points, s);
                spr / dist
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Unit vector `(p₂ − p₁)/|p₂ − p₁|` identifying `F(2)` with `S^{n-1}`.
    pub fn sphere_param(&self) -> Result<Point> {
        if self.len() != 2 {
            return Err(Error::ShapeMismatch(format!(
                "sphere parameter needs 2 points, got {}",
                self.len()
            )));
        }
        let d = &self.points[1] - &self.points[0];
        let norm = d.norm();
        Ok(d / norm)
    }
}

impl Slots for NormalizedConfig {
    fn permute_slots(&mut self, perm: &[usize]) {
        let mut old: Vec<Option<Point>> = self.points.drain(..).map(Some).collect();
        let mut new = vec![None; old.len()];
        for (i, p) in old.iter_mut().enumerate() {
            new[perm[i]] = p.take();
        }
        self.points = new.into_iter().map(Option::unwrap).collect();
    }
}

/// Maximum over points of the Euclidean distance between corresponding points.
pub fn config_dist(x: &NormalizedConfig, y: &NormalizedConfig) -> Result<f64> {
    if x.n != y.n || x.len() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "comparing (m={}, n={}) with (m={}, n={})",
            x.len(),
            x.n,
            y.len(),
            y.n
        )));
    }
    Ok(points_dist(&x.points, &y.points))
}

pub(crate) fn points_dist(x: &[Point], y: &[Point]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// `(spread(S), dist(centroid(S), nearest point outside S))`.
pub(crate) fn cluster_stats(points: &[Point], members: &[usize]) -> (f64, f64) {
    let sub: Vec<Point> = members.iter().map(|&i| points[i].clone()).collect();
    let c = centroid(&sub);
    let spr = sub.iter().map(|p| (p - &c).norm()).fold(0.0, f64::max);
    let dist = points
        .iter()
        .enumerate()
        .filter(|(i, _)| !members.contains(i))
        .map(|(_, p)| (p - &c).norm())
        .fold(f64::INFINITY, f64::min);
    (spr, dist)
}

pub(crate) fn cluster_passes(points: &[Point], members: &[usize], rho0: f64) -> bool {
    let (spr, dist) = cluster_stats(points, members);
    spr < rho0 * dist
}

/// Tie-aware single-linkage hierarchy.
///
/// Clusters are the connected components of the graph joining points at
/// distance `≤ h`, for every merge height `h`. Equal distances merge
/// simultaneously, so a node may have more than two children and the
/// hierarchy does not depend on point order.
#[derive(Clone, Debug, PartialEq)]
pub enum Dendrogram {
    Point(usize),
    Cluster {
        height: f64,
        members: Vec<usize>,
        children: Vec<Dendrogram>,
    },
}

impl Dendrogram {
    pub fn single_linkage(points: &[Point]) -> Dendrogram {
        let m = points.len();
        let mut pairs = Vec::with_capacity(m * (m.saturating_sub(1)) / 2);
        for i in 0..m {
            for j in i + 1..m {
                pairs.push(((&points[i] - &points[j]).norm(), i, j));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        // comp[i] is the index in `nodes` of the current component of point i
        let mut nodes: Vec<Option<Dendrogram>> = (0..m).map(|i| Some(Dendrogram::Point(i))).collect();
        let mut comp: Vec<usize> = (0..m).collect();
        let mut live = m;
        let mut start = 0;
        while start < pairs.len() && live > 1 {
            let h = pairs[start].0;
            let mut end = start;
            while end < pairs.len() && pairs[end].0 == h {
                end += 1;
            }
            // union-find over component ids touched at this height
            let mut parent: Vec<usize> = (0..nodes.len()).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while p[r] != r {
                    r = p[r];
                }
                let mut y = x;
                while p[y] != r {
                    let next = p[y];
                    p[y] = r;
                    y = next;
                }
                r
            }
            for &(_, i, j) in &pairs[start..end] {
                let (a, b) = (find(&mut parent, comp[i]), find(&mut parent, comp[j]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
            let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
            for (c, node) in nodes.iter().enumerate() {
                if node.is_some() {
                    groups.entry(find(&mut parent, c)).or_default().push(c);
                }
            }
            for ids in groups.into_values().filter(|g| g.len() > 1) {
                let children: Vec<Dendrogram> = ids.iter().map(|&c| nodes[c].take().unwrap()).collect();
                let mut members: Vec<usize> = children.iter().flat_map(|c| c.members()).collect();
                members.sort_unstable();
                let new_id = nodes.len();
                for &p in &members {
                    comp[p] = new_id;
                }
                live -= ids.len() - 1;
                nodes.push(Some(Dendrogram::Cluster {
                    height: h,
                    members,
                    children,
                }));
            }
            start = end;
        }
        nodes.into_iter().flatten().next().expect("nonempty configuration")
    }

    pub fn members(&self) -> Vec<usize> {
        match self {
            Dendrogram::Point(i) => vec![*i],
            Dendrogram::Cluster { members, .. } => members.clone(),
        }
    }

    /// Every cluster with at least two points, excluding the whole set.
    pub fn proper_clusters(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if let Dendrogram::Cluster { children, .. } = self {
            for c in children {
                c.push_clusters(&mut out);
            }
        }
        out
    }

    fn push_clusters(&self, out: &mut Vec<Vec<usize>>) {
        if let Dendrogram::Cluster {
            members, children, ..
        } = self
        {
            out.push(members.clone());
            for c in children {
                c.push_clusters(out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts1(xs: &[f64]) -> Vec<Point> {
        xs.iter().map(|&x| DVector::from_vec(vec![x])).collect()
    }

    fn coords1(c: &NormalizedConfig) -> Vec<f64> {
        c.points().iter().map(|p| p[0]).collect()
    }

    #[test]
    fn normalize_unit_interval() {
        let c = normalize(&pts1(&[0.0, 1.0])).unwrap();
        assert_eq!(coords1(&c), vec![-1.0, 1.0]);
        let c = normalize(&pts1(&[-1.0, 0.0, 1.0])).unwrap();
        assert_eq!(coords1(&c), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn normalize_errors() {
        assert_eq!(normalize(&pts1(&[1.0])), Err(Error::TooFewPoints(1)));
        assert_eq!(
            normalize(&pts1(&[1.0, 2.0, 1.0])),
            Err(Error::CoincidentPoints(0, 2))
        );
    }

    #[test]
    fn cluster_free_examples() {
        let x = normalize(&pts1(&[-1.0, 0.0, 1.0])).unwrap();
        assert!(x.is_cluster_free(1.0 / 16.0));
        let y = normalize(&pts1(&[-1.0, -0.99, 1.0])).unwrap();
        assert!(!y.is_cluster_free(1.0 / 16.0));
        let z = normalize(&pts1(&[0.0, 1e-9])).unwrap();
        assert!(z.is_cluster_free(1.0 / 16.0));
    }

    #[test]
    fn dendrogram_merges_ties_together() {
        let d = Dendrogram::single_linkage(&pts1(&[-1.0, 0.0, 1.0]));
        match d {
            Dendrogram::Cluster { children, .. } => assert_eq!(children.len(), 3),
            _ => panic!("expected a cluster"),
        }
        let d = Dendrogram::single_linkage(&pts1(&[0.0, 0.1, 1.0, 1.2, 5.0]));
        let mut clusters = d.proper_clusters();
        clusters.sort();
        assert_eq!(clusters, vec![vec![0, 1], vec![0, 1, 2, 3], vec![2, 3]]);
    }

    #[test]
    fn sphere_param_cases() {
        let x = normalize(&pts1(&[-1.0, 1.0])).unwrap();
        assert_eq!(x.sphere_param().unwrap()[0], 1.0);
        let y = normalize(&[DVector::from_vec(vec![0.0, 0.0]), DVector::from_vec(vec![1.0, 0.0])]).unwrap();
        let s = y.sphere_param().unwrap();
        assert_eq!((s[0], s[1]), (1.0, 0.0));
        let z = normalize(&pts1(&[-1.0, 0.0, 1.0])).unwrap();
        assert!(z.sphere_param().is_err());
    }

    #[test]
    fn new_checks_invariants() {
        assert!(NormalizedConfig::new(pts1(&[-1.0, 1.0])).is_ok());
        assert!(NormalizedConfig::new(pts1(&[0.0, 1.0])).is_err());
        assert!(NormalizedConfig::new(pts1(&[-0.5, 0.5])).is_err());
    }

    #[test]
    fn config_dist_shape_mismatch() {
        let x = normalize(&pts1(&[-1.0, 1.0])).unwrap();
        let y = normalize(&pts1(&[-1.0, 0.0, 1.0])).unwrap();
        assert!(config_dist(&x, &y).is_err());
        assert_eq!(config_dist(&x, &x).unwrap(), 0.0);
    }
}
