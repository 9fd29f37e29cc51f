//! Exas feature vectors and the distances built on them.
//!
//! A graph is summarized by counting two kinds of features:
//!
//! * (p,q)-nodes: a node's label and type with its in-degree `p` and
//!   out-degree `q` (edges counted with multiplicity);
//! * n-paths: label sequences of simple directed paths visiting 2 to 4
//!   nodes, enumerated over edge instances.
//!
//! Two vectors are compared over the union of their features
//! ("super-vectors", zero-filled) or over the shared features only
//! ("sub-vectors").

use std::collections::BTreeMap;
use std::fmt;

use crate::graph::{split_by_api, Aug};
use crate::{clamp_unit, DistanceError};

/// Longest path feature, counted in nodes.
pub const MAX_PATH_NODES: usize = 4;

pub const DEFAULT_LAMBDA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    PqNode {
        label: String,
        node_type: String,
        p: usize,
        q: usize,
    },
    /// Alternating node and edge labels, starting and ending with a node.
    Path(Vec<String>),
}

impl Feature {
    pub fn path_nodes(&self) -> Option<usize> {
        match self {
            Feature::Path(items) => Some(items.len().div_ceil(2)),
            Feature::PqNode { .. } => None,
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Feature::PqNode { label, node_type, p, q } => write!(f, "pq({label},{node_type},{p},{q})"),
            Feature::Path(items) => {
                f.write_str("path(")?;
                for (i, item) in items.iter().enumerate() {
                    if i % 2 == 1 {
                        write!(f, " -[{item}]-> ")?;
                    } else {
                        f.write_str(item)?;
                    }
                }
                f.write_str(")")
            }
        }
    }
}

/// Feature counts; absent features count zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureVector {
    counts: BTreeMap<Feature, u64>,
}

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, feature: Feature, count: u64) {
        if count > 0 {
            *self.counts.entry(feature).or_insert(0) += count;
        }
    }

    pub fn get(&self, feature: &Feature) -> u64 {
        self.counts.get(feature).copied().unwrap_or(0)
    }

    /// Number of distinct features.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Feature, u64)> {
        self.counts.iter().map(|(f, c)| (f, *c))
    }

    /// `feature<TAB>count` lines in feature order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (f, c) in self.iter() {
            out.push_str(&format!("{f}\t{c}\n"));
        }
        out
    }
}

impl FromIterator<(Feature, u64)> for FeatureVector {
    fn from_iter<T: IntoIterator<Item = (Feature, u64)>>(iter: T) -> Self {
        let mut v = FeatureVector::new();
        for (f, c) in iter {
            v.add(f, c);
        }
        v
    }
}

pub fn extract_features(g: &Aug) -> Result<FeatureVector, DistanceError> {
    if g.is_empty() {
        return Err(DistanceError::EmptyGraph(g.name().to_string()));
    }
    let n = g.node_count();
    let mut in_deg = vec![0usize; n];
    let mut out_deg = vec![0usize; n];
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in g.edges().iter().enumerate() {
        out_deg[e.source] += 1;
        in_deg[e.target] += 1;
        out_edges[e.source].push(i);
    }
    let mut v = FeatureVector::new();
    for (i, node) in g.nodes().iter().enumerate() {
        v.add(
            Feature::PqNode {
                label: node.label.clone(),
                node_type: node.node_type.clone(),
                p: in_deg[i],
                q: out_deg[i],
            },
            1,
        );
    }

    let mut on_path = vec![false; n];
    let mut labels = Vec::with_capacity(2 * MAX_PATH_NODES - 1);
    for start in 0..n {
        on_path[start] = true;
        labels.push(g.nodes()[start].label.clone());
        walk(g, &out_edges, start, 1, &mut on_path, &mut labels, &mut v);
        labels.pop();
        on_path[start] = false;
    }
    Ok(v)
}

fn walk(
    g: &Aug,
    out_edges: &[Vec<usize>],
    at: usize,
    depth: usize,
    on_path: &mut [bool],
    labels: &mut Vec<String>,
    v: &mut FeatureVector,
) {
    if depth == MAX_PATH_NODES {
        return;
    }
    for &e in &out_edges[at] {
        let edge = &g.edges()[e];
        if on_path[edge.target] {
            continue;
        }
        on_path[edge.target] = true;
        labels.push(edge.label.clone());
        labels.push(g.nodes()[edge.target].label.clone());
        v.add(Feature::Path(labels.clone()), 1);
        walk(g, out_edges, edge.target, depth + 1, on_path, labels, v);
        labels.truncate(labels.len() - 2);
        on_path[edge.target] = false;
    }
}

/// Sub- and super-vectors of a pair, as dense coordinates over a shared
/// feature order.
#[derive(Debug, Clone, PartialEq)]
pub struct SubSuper {
    pub sub_a: Vec<f64>,
    pub sub_b: Vec<f64>,
    pub super_a: Vec<f64>,
    pub super_b: Vec<f64>,
}

pub fn sub_super(v_a: &FeatureVector, v_b: &FeatureVector) -> SubSuper {
    let mut out = SubSuper { sub_a: Vec::new(), sub_b: Vec::new(), super_a: Vec::new(), super_b: Vec::new() };
    let mut ia = v_a.counts.iter().peekable();
    let mut ib = v_b.counts.iter().peekable();
    loop {
        let (ca, cb) = match (ia.peek(), ib.peek()) {
            (None, None) => break,
            (Some(_), None) => (ia.next().map(|(_, c)| *c).unwrap_or(0), 0),
            (None, Some(_)) => (0, ib.next().map(|(_, c)| *c).unwrap_or(0)),
            (Some((fa, _)), Some((fb, _))) => match fa.cmp(fb) {
                std::cmp::Ordering::Less => (ia.next().map(|(_, c)| *c).unwrap_or(0), 0),
                std::cmp::Ordering::Greater => (0, ib.next().map(|(_, c)| *c).unwrap_or(0)),
                std::cmp::Ordering::Equal => {
                    let ca = ia.next().map(|(_, c)| *c).unwrap_or(0);
                    let cb = ib.next().map(|(_, c)| *c).unwrap_or(0);
                    out.sub_a.push(ca as f64);
                    out.sub_b.push(cb as f64);
                    (ca, cb)
                }
            },
        };
        out.super_a.push(ca as f64);
        out.super_b.push(cb as f64);
    }
    out
}

/// Mean absolute entry of the super-vector difference after dividing by
/// max(1, largest absolute entry).
pub fn l1_distance(v_a: &FeatureVector, v_b: &FeatureVector) -> f64 {
    let s = sub_super(v_a, v_b);
    if s.super_a.is_empty() {
        return 0.0;
    }
    let diff: Vec<f64> = s.super_a.iter().zip(&s.super_b).map(|(x, y)| x - y).collect();
    let scale = diff.iter().fold(1.0f64, |m, d| m.max(d.abs()));
    let sum: f64 = diff.iter().map(|d| d.abs() / scale).sum();
    clamp_unit(sum / diff.len() as f64, "exas_l1")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CosineMode {
    /// Shared-feature term enters as `1 - shared/len`, so identical graphs
    /// are at distance 0.
    #[default]
    Corrected,
    /// Shared-feature term enters as `shared/len`.
    Literal,
}

fn cosine_similarity(x: &[f64], y: &[f64]) -> f64 {
    if x == y {
        return 1.0;
    }
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let ny = y.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        return 0.0;
    }
    (dot / (nx * ny)).clamp(0.0, 1.0)
}

/// Weighted mix of the shared-feature proportion of `v_a` (the reference
/// side) and the cosine distance of the shared sub-vectors. Asymmetric.
pub fn cosine_distance(v_a: &FeatureVector, v_b: &FeatureVector, lambda: f64, mode: CosineMode) -> f64 {
    let s = sub_super(v_a, v_b);
    let shared = if v_a.is_empty() { 0.0 } else { s.sub_a.len() as f64 / v_a.len() as f64 };
    let cosine_term = if s.sub_a.is_empty() { 1.0 } else { 1.0 - cosine_similarity(&s.sub_a, &s.sub_b) };
    let share_term = match mode {
        CosineMode::Corrected => 1.0 - shared,
        CosineMode::Literal => shared,
    };
    clamp_unit(lambda * share_term + (1.0 - lambda) * cosine_term, "exas_cosine")
}

fn check_lambda(lambda: f64) -> Result<(), DistanceError> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(DistanceError::InvalidParameter(format!("lambda must lie in [0, 1], got {lambda}")))
    }
}

pub fn dist_exas_l1(a: &Aug, b: &Aug) -> Result<f64, DistanceError> {
    Ok(l1_distance(&extract_features(a)?, &extract_features(b)?))
}

pub fn dist_exas_cosine(a: &Aug, b: &Aug, lambda: f64, mode: CosineMode) -> Result<f64, DistanceError> {
    check_lambda(lambda)?;
    Ok(cosine_distance(&extract_features(a)?, &extract_features(b)?, lambda, mode))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitBase {
    L1,
    Cosine,
}

/// Mean of the per-package base distances over packages present in both
/// graphs, ignoring sub-distances of exactly 1. Returns 1 when nothing is
/// left to average.
pub fn dist_exas_split(a: &Aug, b: &Aug, base: SplitBase, lambda: f64, mode: CosineMode) -> Result<f64, DistanceError> {
    check_lambda(lambda)?;
    let parts_a = split_by_api(a)?;
    let parts_b = split_by_api(b)?;
    let mut sub_distances = Vec::new();
    for (pkg, sub_a) in &parts_a {
        let Some(sub_b) = parts_b.get(pkg) else {
            continue;
        };
        let d = match base {
            SplitBase::L1 => dist_exas_l1(sub_a, sub_b)?,
            SplitBase::Cosine => dist_exas_cosine(sub_a, sub_b, lambda, mode)?,
        };
        sub_distances.push(d);
    }
    Ok(mean_excluding_one(&sub_distances))
}

/// Aggregation used by the split distances.
pub fn mean_excluding_one(sub_distances: &[f64]) -> f64 {
    let kept: Vec<f64> = sub_distances.iter().copied().filter(|d| *d != 1.0).collect();
    if kept.is_empty() {
        1.0
    } else {
        kept.iter().sum::<f64>() / kept.len() as f64
    }
}
