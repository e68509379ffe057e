//! JSON records for points of `F_n(k)` and `WF_n(k)`.
//!
//! Floats are written in shortest round-trip form, so parsing an emitted
//! record gives back the identical point. Every record carries `rho0`;
//! combining records with different thresholds is an error.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::{ConfigRecord, NormalizedConfig};
use crate::error::{invariant, Error, Result};
use crate::fm::FmPoint;
use crate::tree::{NestedTree, Shape, TreeKey};
use crate::w::WPoint;

/// `vertex_configs` is keyed by the canonical key of the subtree rooted at
/// each vertex (its points listed in the order of that vertex's children in
/// `tree`), `edge_u` by the canonical key of each edge's lower subtree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FmPointRecord {
    pub n: usize,
    pub k: usize,
    pub rho0: f64,
    pub tree: Shape,
    pub vertex_configs: BTreeMap<String, Vec<Vec<f64>>>,
    pub edge_u: BTreeMap<String, f64>,
}

/// `labels` and `lengths` follow the pre-order of the vertices and edges of
/// `tree`; each label's leaves follow its vertex's children.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WPointRecord {
    pub n: usize,
    pub k: usize,
    pub rho0: f64,
    pub tree: Shape,
    pub labels: Vec<FmPointRecord>,
    pub lengths: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnyPoint {
    Fm(FmPoint),
    W(WPoint),
}

fn sorted_key(t: &NestedTree) -> TreeKey {
    let mut t = t.clone();
    t.canonicalize();
    t.key()
}

fn normalize_keys<T: Clone>(map: &BTreeMap<String, T>, what: &str) -> Result<BTreeMap<TreeKey, T>> {
    let mut out = BTreeMap::new();
    for (k, v) in map {
        let shape: Shape = serde_json::from_str(k)
            .map_err(|e| Error::Parse(format!("{what} key {k:?} is not a tree: {e}")))?;
        let key = NestedTree::subtree_key(&shape)
            .map_err(|e| Error::Parse(format!("{what} key {k:?}: {e}")))?;
        if out.insert(key, v.clone()).is_some() {
            return Err(Error::Parse(format!("{what} key {k:?} appears twice")));
        }
    }
    Ok(out)
}

impl FmPointRecord {
    pub fn from_point(p: &FmPoint) -> Self {
        let root = p.root();
        FmPointRecord {
            n: p.dim(),
            k: p.arity(),
            rho0: p.rho0(),
            tree: p.tree().to_shape(),
            vertex_configs: root
                .vertices()
                .into_iter()
                .map(|v| (v.key().as_str().to_owned(), v.data().to_record().points))
                .collect(),
            edge_u: root
                .edges()
                .into_iter()
                .map(|(u, sub)| (sub.key().as_str().to_owned(), *u))
                .collect(),
        }
    }

    pub fn to_point(&self) -> Result<FmPoint> {
        let tree = &NestedTree::from_shape_as_written(&self.tree)?;
        if tree.arity() != self.k {
            return Err(invariant(
                "k equals the number of leaves",
                format!("k = {} but the tree has {} leaves", self.k, tree.arity()),
            ));
        }
        let configs = normalize_keys(&self.vertex_configs, "vertex_configs")?;
        let scales = normalize_keys(&self.edge_u, "edge_u")?;
        if configs.len() != tree.vertex_count() || scales.len() != tree.edge_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} vertex configurations and {} scales for a tree with {} vertices and {} edges",
                configs.len(),
                scales.len(),
                tree.vertex_count(),
                tree.edge_count()
            )));
        }
        let missing = |key: &TreeKey| Error::Parse(format!("no entry for subtree {key}"));
        let vertex_configs = tree
            .vertices()
            .into_iter()
            .map(|v| {
                let key = sorted_key(&v.shape());
                let points = configs.get(&key).ok_or_else(|| missing(&key))?;
                let x = NormalizedConfig::from_record(&ConfigRecord {
                    n: self.n,
                    points: points.clone(),
                })?;
                if x.len() != v.valence() {
                    return Err(invariant(
                        "configuration size equals valence",
                        format!("{} points at vertex {key} of valence {}", x.len(), v.valence()),
                    ));
                }
                Ok(x)
            })
            .collect::<Result<Vec<_>>>()?;
        let edge_u = tree
            .edges()
            .into_iter()
            .map(|(_, sub)| {
                let key = sorted_key(&sub.shape());
                scales.get(&key).copied().ok_or_else(|| missing(&key))
            })
            .collect::<Result<Vec<_>>>()?;
        FmPoint::from_parts(tree, vertex_configs, edge_u, self.rho0)
    }
}

impl WPointRecord {
    pub fn from_point(w: &WPoint) -> Self {
        WPointRecord {
            n: w.dim(),
            k: w.arity(),
            rho0: w.rho0(),
            tree: w.tree().to_shape(),
            labels: w.labels().into_iter().map(FmPointRecord::from_point).collect(),
            lengths: w.lengths(),
        }
    }

    pub fn to_point(&self) -> Result<WPoint> {
        let tree = NestedTree::from_shape_as_written(&self.tree)?;
        if tree.arity() != self.k {
            return Err(invariant(
                "k equals the number of leaves",
                format!("k = {} but the tree has {} leaves", self.k, tree.arity()),
            ));
        }
        let labels = self
            .labels
            .iter()
            .map(|r| {
                if r.n != self.n || r.rho0 != self.rho0 {
                    return Err(invariant(
                        "labels share n and rho0",
                        format!(
                            "label with (n={}, rho0={}) inside a record with (n={}, rho0={})",
                            r.n, r.rho0, self.n, self.rho0
                        ),
                    ));
                }
                r.to_point()
            })
            .collect::<Result<Vec<_>>>()?;
        WPoint::make(&tree, labels, self.lengths.clone())
    }
}

impl AnyPoint {
    pub fn rho0(&self) -> f64 {
        match self {
            AnyPoint::Fm(p) => p.rho0(),
            AnyPoint::W(w) => w.rho0(),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            AnyPoint::Fm(p) => fm_to_json(p),
            AnyPoint::W(w) => w_to_json(w),
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("records always serialize")
}

pub fn fm_to_json(p: &FmPoint) -> String {
    to_json(&FmPointRecord::from_point(p))
}

pub fn w_to_json(w: &WPoint) -> String {
    to_json(&WPointRecord::from_point(w))
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn fm_from_json(s: &str) -> Result<FmPoint> {
    serde_json::from_str::<FmPointRecord>(s).map_err(parse_err)?.to_point()
}

pub fn w_from_json(s: &str) -> Result<WPoint> {
    serde_json::from_str::<WPointRecord>(s).map_err(parse_err)?.to_point()
}

/// Parses either kind of point.
pub fn point_from_json(s: &str) -> Result<AnyPoint> {
    let value: serde_json::Value = serde_json::from_str(s).map_err(parse_err)?;
    if value.get("labels").is_some() {
        w_from_json(s).map(AnyPoint::W)
    } else {
        fm_from_json(s).map(AnyPoint::Fm)
    }
}

/// Parses a JSON array of points (or one bare point), requiring a common
/// `rho0`.
pub fn points_from_json(s: &str) -> Result<Vec<AnyPoint>> {
    let value: serde_json::Value = serde_json::from_str(s).map_err(parse_err)?;
    let items = match value {
        serde_json::Value::Array(items) => items,
        other => vec![other],
    };
    let points = items
        .iter()
        .map(|v| point_from_json(&v.to_string()))
        .collect::<Result<Vec<_>>>()?;
    check_common_rho0(&points)?;
    Ok(points)
}

pub fn check_common_rho0(points: &[AnyPoint]) -> Result<()> {
    if let Some(first) = points.first() {
        if let Some(p) = points.iter().find(|p| p.rho0() != first.rho0()) {
            return Err(invariant(
                "common rho0",
                format!("records mix rho0 = {} and rho0 = {}", first.rho0(), p.rho0()),
            ));
        }
    }
    Ok(())
}
