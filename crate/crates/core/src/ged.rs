//! Graph edit distance.
//!
//! Two variants share one cost model:
//!
//! * [`ged_astar`]: depth-first branch and bound over node mappings with an
//!   admissible lower bound and a wall-clock deadline. Exact when it
//!   completes, otherwise the best upper bound found so far.
//! * [`ged_hungarian`]: node-only edit cost from a bipartite assignment.
//!   Edge costs are ignored entirely.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::assignment::min_cost_assignment;
use crate::graph::{Aug, Node};
use crate::{clamp_unit, ensure_non_empty, DistanceError};

/// Default per-pair deadline for [`ged_astar`].
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(15);

/// Edit costs, tiered by how much two elements agree.
///
/// A node substitution costs `node_same_label` when label and type agree,
/// `node_same_type` when only the type agrees, and `node_other` otherwise.
/// An edge substitution costs `edge_same_label` for equal labels and
/// `edge_other` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub node_same_label: f64,
    pub node_same_type: f64,
    pub node_other: f64,
    pub node_delete: f64,
    pub node_insert: f64,
    pub edge_same_label: f64,
    pub edge_other: f64,
    pub edge_delete: f64,
    pub edge_insert: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::ged()
    }
}

impl CostModel {
    /// Substitutions 0/1/2 for label+type / type / neither, edge
    /// substitutions 0/2, every deletion and insertion 2.
    pub fn ged() -> Self {
        CostModel {
            node_same_label: 0.0,
            node_same_type: 1.0,
            node_other: 2.0,
            node_delete: 2.0,
            node_insert: 2.0,
            edge_same_label: 0.0,
            edge_other: 2.0,
            edge_delete: 2.0,
            edge_insert: 2.0,
        }
    }

    /// Maximum-common-subgraph costs: only identical elements may be
    /// substituted (for free); everything else is deleted and inserted at
    /// unit cost. `forbidden` stands in for an infinite cost.
    pub fn mcs(forbidden: f64) -> Self {
        CostModel {
            node_same_label: 0.0,
            node_same_type: forbidden,
            node_other: forbidden,
            node_delete: 1.0,
            node_insert: 1.0,
            edge_same_label: 0.0,
            edge_other: forbidden,
            edge_delete: 1.0,
            edge_insert: 1.0,
        }
    }

    pub fn node_substitute(&self, a: &Node, b: &Node) -> f64 {
        if a.node_type == b.node_type {
            if a.label == b.label {
                self.node_same_label
            } else {
                self.node_same_type
            }
        } else {
            self.node_other
        }
    }

    pub fn edge_substitute(&self, a: &str, b: &str) -> f64 {
        if a == b {
            self.edge_same_label
        } else {
            self.edge_other
        }
    }

    /// Largest cost any single node operation can incur.
    pub fn max_node_cost(&self) -> f64 {
        [self.node_same_label, self.node_same_type, self.node_other, self.node_delete, self.node_insert]
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// Largest cost any single edge operation can incur.
    pub fn max_edge_cost(&self) -> f64 {
        [self.edge_same_label, self.edge_other, self.edge_delete, self.edge_insert].into_iter().fold(0.0, f64::max)
    }

    /// Whether deleting and re-inserting is never cheaper than substituting.
    pub fn satisfies_triangle_inequality(&self) -> bool {
        let node = self.node_delete + self.node_insert;
        let edge = self.edge_delete + self.edge_insert;
        node >= self.node_same_label.max(self.node_same_type).max(self.node_other)
            && edge >= self.edge_same_label.max(self.edge_other)
    }

    /// The search needs finite, non-negative costs whose tiers grow with
    /// disagreement.
    pub fn validate(&self) -> Result<(), DistanceError> {
        let all = [
            self.node_same_label,
            self.node_same_type,
            self.node_other,
            self.node_delete,
            self.node_insert,
            self.edge_same_label,
            self.edge_other,
            self.edge_delete,
            self.edge_insert,
        ];
        if all.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(DistanceError::InvalidParameter("costs must be finite and non-negative".into()));
        }
        if !(self.node_same_label <= self.node_same_type && self.node_same_type <= self.node_other) {
            return Err(DistanceError::InvalidParameter("node substitution tiers must be non-decreasing".into()));
        }
        if self.edge_same_label > self.edge_other {
            return Err(DistanceError::InvalidParameter("edge substitution tiers must be non-decreasing".into()));
        }
        Ok(())
    }

    // Savings of substituting instead of delete + insert, per tier.
    fn node_savings(&self) -> [f64; 3] {
        let base = self.node_delete + self.node_insert;
        let s2 = (base - self.node_other).max(0.0);
        let s1 = (base - self.node_same_type).max(s2);
        let s0 = (base - self.node_same_label).max(s1);
        [s0, s1, s2]
    }

    fn edge_savings(&self) -> [f64; 2] {
        let base = self.edge_delete + self.edge_insert;
        let s1 = (base - self.edge_other).max(0.0);
        let s0 = (base - self.edge_same_label).max(s1);
        [s0, s1]
    }
}

/// Outcome of [`ged_astar`].
#[derive(Debug, Clone, PartialEq)]
pub struct GedResult {
    pub cost: f64,
    /// `false` when the deadline cut the search short.
    pub complete: bool,
    /// Image of each node of the first graph in the second (`None` =
    /// deleted).
    pub mapping: Vec<Option<usize>>,
    pub expansions: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EditOp {
    SubstituteNode { from: usize, to: usize, cost: f64 },
    DeleteNode { node: usize, cost: f64 },
    InsertNode { node: usize, cost: f64 },
    SubstituteEdge { from: usize, to: usize, cost: f64 },
    DeleteEdge { edge: usize, cost: f64 },
    InsertEdge { edge: usize, cost: f64 },
}

impl EditOp {
    pub fn cost(&self) -> f64 {
        match *self {
            EditOp::SubstituteNode { cost, .. }
            | EditOp::DeleteNode { cost, .. }
            | EditOp::InsertNode { cost, .. }
            | EditOp::SubstituteEdge { cost, .. }
            | EditOp::DeleteEdge { cost, .. }
            | EditOp::InsertEdge { cost, .. } => cost,
        }
    }
}

/// Edit operations turning one graph into another. Node and edge indices
/// refer to the source graph for substitutions and deletions, and to the
/// target graph for substitution targets and insertions.
#[derive(Debug, Clone, PartialEq)]
pub struct EditPath {
    pub ops: Vec<EditOp>,
    pub total_cost: f64,
}

impl EditPath {
    /// Cheapest edit path consistent with a node mapping from `a` to `b`.
    pub fn from_mapping(a: &Aug, b: &Aug, mapping: &[Option<usize>], cm: &CostModel) -> EditPath {
        assert_eq!(mapping.len(), a.node_count());
        let mut ops = Vec::new();
        let mut b_used = vec![false; b.node_count()];
        for (i, image) in mapping.iter().enumerate() {
            match image {
                Some(k) => {
                    b_used[*k] = true;
                    ops.push(EditOp::SubstituteNode {
                        from: i,
                        to: *k,
                        cost: cm.node_substitute(&a.nodes()[i], &b.nodes()[*k]),
                    });
                }
                None => ops.push(EditOp::DeleteNode { node: i, cost: cm.node_delete }),
            }
        }
        for (k, used) in b_used.iter().enumerate() {
            if !used {
                ops.push(EditOp::InsertNode { node: k, cost: cm.node_insert });
            }
        }

        // group edges of b by endpoint pair, then match a's edges against
        // the group of their image pair: equal labels first
        let mut b_groups: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (e, edge) in b.edges().iter().enumerate() {
            b_groups.entry((edge.source, edge.target)).or_default().push(e);
        }
        let mut b_edge_used = vec![false; b.edge_count()];
        let mut pending = Vec::new();
        for (e, edge) in a.edges().iter().enumerate() {
            let image = mapping[edge.source].zip(mapping[edge.target]);
            let matched = image.and_then(|pair| {
                b_groups.get(&pair).and_then(|group| {
                    group.iter().copied().find(|&f| !b_edge_used[f] && b.edges()[f].label == edge.label)
                })
            });
            match matched {
                Some(f) if cm.edge_same_label < cm.edge_delete + cm.edge_insert => {
                    b_edge_used[f] = true;
                    ops.push(EditOp::SubstituteEdge { from: e, to: f, cost: cm.edge_same_label });
                }
                _ => pending.push((e, image)),
            }
        }
        let relabel_pays = cm.edge_other < cm.edge_delete + cm.edge_insert;
        for (e, image) in pending {
            let other = image.filter(|_| relabel_pays).and_then(|pair| {
                b_groups.get(&pair).and_then(|group| group.iter().copied().find(|&f| !b_edge_used[f]))
            });
            match other {
                Some(f) => {
                    b_edge_used[f] = true;
                    ops.push(EditOp::SubstituteEdge {
                        from: e,
                        to: f,
                        cost: cm.edge_substitute(&a.edges()[e].label, &b.edges()[f].label),
                    });
                }
                None => ops.push(EditOp::DeleteEdge { edge: e, cost: cm.edge_delete }),
            }
        }
        for (f, used) in b_edge_used.iter().enumerate() {
            if !used {
                ops.push(EditOp::InsertEdge { edge: f, cost: cm.edge_insert });
            }
        }
        let total_cost = ops.iter().map(EditOp::cost).sum();
        EditPath { ops, total_cost }
    }

    /// Applies the path to `a`. The result uses `b`'s node ids, so a correct
    /// path yields a graph equal to `b` up to node and edge order.
    pub fn apply(&self, a: &Aug, b: &Aug) -> Aug {
        let mut node_map: Vec<Option<usize>> = vec![None; a.node_count()];
        let mut nodes = Vec::new();
        let mut inserted: HashMap<usize, usize> = HashMap::new();
        for op in &self.ops {
            match *op {
                EditOp::SubstituteNode { from, to, .. } => {
                    node_map[from] = Some(nodes.len());
                    inserted.insert(to, nodes.len());
                    nodes.push(b.nodes()[to].clone());
                }
                EditOp::InsertNode { node, .. } => {
                    inserted.insert(node, nodes.len());
                    nodes.push(b.nodes()[node].clone());
                }
                _ => {}
            }
        }
        let mut edges = Vec::new();
        for op in &self.ops {
            match *op {
                EditOp::SubstituteEdge { from, to, .. } => {
                    let ea = &a.edges()[from];
                    let s = node_map[ea.source].expect("substituted edge endpoint was deleted");
                    let t = node_map[ea.target].expect("substituted edge endpoint was deleted");
                    edges.push(crate::graph::Edge::new(s, t, b.edges()[to].label.clone()));
                }
                EditOp::InsertEdge { edge, .. } => {
                    let eb = &b.edges()[edge];
                    edges.push(crate::graph::Edge::new(inserted[&eb.source], inserted[&eb.target], eb.label.clone()));
                }
                _ => {}
            }
        }
        Aug::new(b.name(), nodes, edges).expect("edit path produced an invalid graph")
    }
}

// Interned view of both graphs for the search.
struct Prepared {
    na: usize,
    nb: usize,
    // node substitution cost, row-major na × nb
    node_sub: Vec<f64>,
    a_exact: Vec<usize>,
    b_exact: Vec<usize>,
    a_type: Vec<usize>,
    b_type: Vec<usize>,
    n_exact: usize,
    n_types: usize,
    // sorted label ids of the edges u -> v, indexed u * n + v
    a_pairs: Vec<Vec<u32>>,
    b_pairs: Vec<Vec<u32>>,
    // (label, other endpoint) per node; self-loops listed once
    a_adj: Vec<Vec<(u32, usize)>>,
    b_adj: Vec<Vec<(u32, usize)>>,
    a_edge_labels: Vec<u32>,
    b_edge_labels: Vec<u32>,
    n_labels: usize,
}

fn intern<'a>(table: &mut HashMap<&'a str, usize>, key: &'a str) -> usize {
    let next = table.len();
    *table.entry(key).or_insert(next)
}

impl Prepared {
    fn new<'g>(a: &'g Aug, b: &'g Aug, cm: &CostModel) -> Self {
        let (na, nb) = (a.node_count(), b.node_count());
        let mut node_sub = Vec::with_capacity(na * nb);
        for x in a.nodes() {
            for y in b.nodes() {
                node_sub.push(cm.node_substitute(x, y));
            }
        }
        let mut exact: HashMap<(&str, &str), usize> = HashMap::new();
        let mut types: HashMap<&str, usize> = HashMap::new();
        let mut classify = |nodes: &'g [Node]| -> (Vec<usize>, Vec<usize>) {
            nodes
                .iter()
                .map(|n| {
                    let next = exact.len();
                    let e = *exact.entry((n.label.as_str(), n.node_type.as_str())).or_insert(next);
                    (e, intern(&mut types, &n.node_type))
                })
                .unzip()
        };
        let (a_exact, a_type) = classify(a.nodes());
        let (b_exact, b_type) = classify(b.nodes());

        let mut labels: HashMap<&str, usize> = HashMap::new();
        let mut pairs_of = |g: &'g Aug| {
            let n = g.node_count();
            let mut pairs = vec![Vec::new(); n * n];
            let mut adj = vec![Vec::new(); n];
            let mut edge_labels = Vec::with_capacity(g.edge_count());
            for e in g.edges() {
                let l = intern(&mut labels, &e.label) as u32;
                edge_labels.push(l);
                pairs[e.source * n + e.target].push(l);
                adj[e.source].push((l, e.target));
                if e.source != e.target {
                    adj[e.target].push((l, e.source));
                }
            }
            pairs.iter_mut().for_each(|p: &mut Vec<u32>| p.sort_unstable());
            (pairs, adj, edge_labels)
        };
        let (a_pairs, a_adj, a_edge_labels) = pairs_of(a);
        let (b_pairs, b_adj, b_edge_labels) = pairs_of(b);

        Prepared {
            na,
            nb,
            node_sub,
            a_exact,
            b_exact,
            a_type,
            b_type,
            n_exact: exact.len(),
            n_types: types.len(),
            a_pairs,
            b_pairs,
            a_adj,
            b_adj,
            a_edge_labels,
            b_edge_labels,
            n_labels: labels.len(),
        }
    }
}

/// Remaining-element counters backing the lower bound. `c` tracks
/// Σ min(count_a, count_b) over classes.
#[derive(Clone)]
struct Bucket {
    a: Vec<u32>,
    b: Vec<u32>,
    common: u32,
}

impl Bucket {
    fn new(classes: usize, a: impl Iterator<Item = usize>, b: impl Iterator<Item = usize>) -> Self {
        let mut bucket = Bucket { a: vec![0; classes], b: vec![0; classes], common: 0 };
        for x in a {
            bucket.a[x] += 1;
        }
        for y in b {
            bucket.b[y] += 1;
        }
        bucket.common = bucket.a.iter().zip(&bucket.b).map(|(x, y)| x.min(y)).sum();
        bucket
    }

    fn take_a(&mut self, class: usize) {
        if self.a[class] <= self.b[class] {
            self.common -= 1;
        }
        self.a[class] -= 1;
    }

    fn put_a(&mut self, class: usize) {
        self.a[class] += 1;
        if self.a[class] <= self.b[class] {
            self.common += 1;
        }
    }

    fn take_b(&mut self, class: usize) {
        if self.b[class] <= self.a[class] {
            self.common -= 1;
        }
        self.b[class] -= 1;
    }

    fn put_b(&mut self, class: usize) {
        self.b[class] += 1;
        if self.b[class] <= self.a[class] {
            self.common += 1;
        }
    }
}

struct Search<'p> {
    p: &'p Prepared,
    cm: CostModel,
    node_savings: [f64; 3],
    edge_savings: [f64; 2],
    // a-node processing order
    order: Vec<usize>,
    processed: Vec<bool>,
    mapping: Vec<Option<usize>>,
    b_used: Vec<bool>,
    rem_a_nodes: usize,
    rem_b_nodes: usize,
    exact: Bucket,
    types: Bucket,
    rem_a_edges: usize,
    rem_b_edges: usize,
    edge_labels: Bucket,
    best: f64,
    best_mapping: Vec<Option<usize>>,
    deadline: Option<Instant>,
    timed_out: bool,
    expansions: u64,
}

impl<'p> Search<'p> {
    fn new(p: &'p Prepared, cm: CostModel, deadline: Option<Instant>) -> Self {
        let mut order: Vec<usize> = (0..p.na).collect();
        // most constrained first: high degree, then input order
        order.sort_by_key(|&u| std::cmp::Reverse(p.a_adj[u].len()));
        Search {
            p,
            node_savings: cm.node_savings(),
            edge_savings: cm.edge_savings(),
            cm,
            order,
            processed: vec![false; p.na],
            mapping: vec![None; p.na],
            b_used: vec![false; p.nb],
            rem_a_nodes: p.na,
            rem_b_nodes: p.nb,
            exact: Bucket::new(p.n_exact, p.a_exact.iter().copied(), p.b_exact.iter().copied()),
            types: Bucket::new(p.n_types, p.a_type.iter().copied(), p.b_type.iter().copied()),
            rem_a_edges: p.a_edge_labels.len(),
            rem_b_edges: p.b_edge_labels.len(),
            edge_labels: Bucket::new(
                p.n_labels,
                p.a_edge_labels.iter().map(|&l| l as usize),
                p.b_edge_labels.iter().map(|&l| l as usize),
            ),
            best: f64::INFINITY,
            best_mapping: vec![None; p.na],
            deadline,
            timed_out: false,
            expansions: 0,
        }
    }

    fn lower_bound(&self) -> f64 {
        let cm = &self.cm;
        let [s0, s1, s2] = self.node_savings;
        let (na, nb) = (self.rem_a_nodes as f64, self.rem_b_nodes as f64);
        let pairs = na.min(nb);
        let c0 = f64::from(self.exact.common);
        let t = f64::from(self.types.common).max(c0);
        let node = na * cm.node_delete + nb * cm.node_insert - (c0 * s0 + (t - c0) * s1 + (pairs - t) * s2);

        let [e0, e1] = self.edge_savings;
        let (ea, eb) = (self.rem_a_edges as f64, self.rem_b_edges as f64);
        let c = f64::from(self.edge_labels.common);
        let edge = ea * cm.edge_delete + eb * cm.edge_insert - (c * e0 + (ea.min(eb) - c) * e1);
        node.max(0.0) + edge.max(0.0)
    }

    // Optimal cost between two sorted label multisets of parallel edges.
    fn pair_cost(&self, x: &[u32], y: &[u32]) -> f64 {
        if x.is_empty() && y.is_empty() {
            return 0.0;
        }
        let (mut i, mut j, mut common) = (0, 0, 0usize);
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Equal => {
                    common += 1;
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
            }
        }
        let [e0, e1] = self.edge_savings;
        let others = x.len().min(y.len()) - common;
        x.len() as f64 * self.cm.edge_delete + y.len() as f64 * self.cm.edge_insert
            - common as f64 * e0
            - others as f64 * e1
    }

    // Edge cost incurred by fixing u's image, over all processed nodes.
    fn edge_increment(&self, u: usize, image: Option<usize>) -> f64 {
        let (na, nb) = (self.p.na, self.p.nb);
        let del = self.cm.edge_delete;
        let mut cost = 0.0;
        match image {
            None => {
                for &(_, w) in &self.p.a_adj[u] {
                    if w == u || self.processed[w] {
                        cost += del;
                    }
                }
            }
            Some(k) => {
                cost += self.pair_cost(&self.p.a_pairs[u * na + u], &self.p.b_pairs[k * nb + k]);
                for &w in &self.order {
                    if !self.processed[w] {
                        continue;
                    }
                    let uw = &self.p.a_pairs[u * na + w];
                    let wu = &self.p.a_pairs[w * na + u];
                    match self.mapping[w] {
                        Some(l) => {
                            cost += self.pair_cost(uw, &self.p.b_pairs[k * nb + l]);
                            cost += self.pair_cost(wu, &self.p.b_pairs[l * nb + k]);
                        }
                        None => cost += (uw.len() + wu.len()) as f64 * del,
                    }
                }
            }
        }
        cost
    }

    fn assign(&mut self, u: usize, image: Option<usize>) {
        self.exact.take_a(self.p.a_exact[u]);
        self.types.take_a(self.p.a_type[u]);
        self.rem_a_nodes -= 1;
        for &(l, w) in &self.p.a_adj[u] {
            if w == u || self.processed[w] {
                self.edge_labels.take_a(l as usize);
                self.rem_a_edges -= 1;
            }
        }
        self.processed[u] = true;
        self.mapping[u] = image;
        if let Some(k) = image {
            self.exact.take_b(self.p.b_exact[k]);
            self.types.take_b(self.p.b_type[k]);
            self.rem_b_nodes -= 1;
            for &(l, m) in &self.p.b_adj[k] {
                if m == k || self.b_used[m] {
                    self.edge_labels.take_b(l as usize);
                    self.rem_b_edges -= 1;
                }
            }
            self.b_used[k] = true;
        }
    }

    fn unassign(&mut self, u: usize) {
        if let Some(k) = self.mapping[u] {
            self.b_used[k] = false;
            for &(l, m) in &self.p.b_adj[k] {
                if m == k || self.b_used[m] {
                    self.edge_labels.put_b(l as usize);
                    self.rem_b_edges += 1;
                }
            }
            self.rem_b_nodes += 1;
            self.types.put_b(self.p.b_type[k]);
            self.exact.put_b(self.p.b_exact[k]);
        }
        self.mapping[u] = None;
        self.processed[u] = false;
        for &(l, w) in &self.p.a_adj[u] {
            if w == u || self.processed[w] {
                self.edge_labels.put_a(l as usize);
                self.rem_a_edges += 1;
            }
        }
        self.rem_a_nodes += 1;
        self.types.put_a(self.p.a_type[u]);
        self.exact.put_a(self.p.a_exact[u]);
    }

    fn out_of_time(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        if let Some(deadline) = self.deadline {
            if self.expansions.is_multiple_of(32) && Instant::now() >= deadline {
                self.timed_out = true;
            }
        }
        self.timed_out
    }

    // Full cost of a complete mapping.
    fn mapping_cost(&mut self, mapping: &[Option<usize>]) -> f64 {
        let mut cost = 0.0;
        let order = self.order.clone();
        for &u in &order {
            cost += match mapping[u] {
                Some(k) => self.p.node_sub[u * self.p.nb + k],
                None => self.cm.node_delete,
            };
            cost += self.edge_increment(u, mapping[u]);
            self.assign(u, mapping[u]);
        }
        // remaining b nodes and their edges are insertions
        cost += self.rem_b_nodes as f64 * self.cm.node_insert + self.rem_b_edges as f64 * self.cm.edge_insert;
        for &u in order.iter().rev() {
            self.unassign(u);
        }
        cost
    }

    fn offer(&mut self, cost: f64, mapping: Vec<Option<usize>>) {
        if cost < self.best {
            self.best = cost;
            self.best_mapping = mapping;
        }
    }

    fn dfs(&mut self, depth: usize, g: f64) {
        self.expansions += 1;
        if self.out_of_time() {
            return;
        }
        if depth == self.order.len() {
            let total =
                g + self.rem_b_nodes as f64 * self.cm.node_insert + self.rem_b_edges as f64 * self.cm.edge_insert;
            let mapping = self.mapping.clone();
            self.offer(total, mapping);
            return;
        }
        let u = self.order[depth];
        let mut children: Vec<(f64, f64, Option<usize>)> = Vec::with_capacity(self.rem_b_nodes + 1);
        for k in 0..self.p.nb {
            if self.b_used[k] {
                continue;
            }
            let step = self.p.node_sub[u * self.p.nb + k] + self.edge_increment(u, Some(k));
            self.assign(u, Some(k));
            let h = self.lower_bound();
            self.unassign(u);
            children.push((g + step + h, g + step, Some(k)));
        }
        let step = self.cm.node_delete + self.edge_increment(u, None);
        self.assign(u, None);
        let h = self.lower_bound();
        self.unassign(u);
        children.push((g + step + h, g + step, None));

        // stable: ties keep ascending candidate order, deletion last
        children.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (f, g_child, image) in children {
            if f >= self.best || self.timed_out {
                break;
            }
            self.assign(u, image);
            self.dfs(depth + 1, g_child);
            self.unassign(u);
        }
    }
}

fn check_inputs(a: &Aug, b: &Aug, cm: &CostModel) -> Result<(), DistanceError> {
    ensure_non_empty(a, b)?;
    cm.validate()
}

/// Edit cost of a complete node mapping (`mapping[i]` = image of node `i` of
/// `a`, `None` = deleted), edges matched optimally per node pair.
pub fn mapping_cost(a: &Aug, b: &Aug, mapping: &[Option<usize>], cm: &CostModel) -> f64 {
    let p = Prepared::new(a, b, cm);
    let mut search = Search::new(&p, *cm, None);
    search.mapping_cost(mapping)
}

/// Minimal edit cost by depth-first branch and bound.
///
/// The search is seeded with the node assignment of [`ged_hungarian`], so a
/// complete edit path exists from the start; `Timeout` is only returned when
/// the deadline is already spent before seeding.
pub fn ged_astar(a: &Aug, b: &Aug, cm: &CostModel, timeout: Duration) -> Result<GedResult, DistanceError> {
    check_inputs(a, b, cm)?;
    let start = Instant::now();
    let deadline = start.checked_add(timeout);
    if timeout.is_zero() {
        return Err(DistanceError::Timeout);
    }
    let p = Prepared::new(a, b, cm);
    let mut search = Search::new(&p, *cm, deadline);

    let seed = node_assignment(&p, cm);
    if deadline.is_some_and(|d| Instant::now() >= d) {
        return Err(DistanceError::Timeout);
    }
    let seed_cost = search.mapping_cost(&seed);
    search.offer(seed_cost, seed);

    if search.lower_bound() < search.best {
        search.dfs(0, 0.0);
    }
    Ok(GedResult {
        cost: search.best,
        complete: !search.timed_out,
        mapping: search.best_mapping,
        expansions: search.expansions,
    })
}

/// Normalized [`ged_astar`]: cost over max(|V|)·mcost_n + max(|E|)·mcost_e.
/// Falls back to 1 when no edit path could be found in time.
pub fn dist_ged_astar(a: &Aug, b: &Aug, cm: &CostModel, timeout: Duration) -> Result<f64, DistanceError> {
    let cost = match ged_astar(a, b, cm, timeout) {
        Ok(r) => {
            if !r.complete {
                log::debug!("ged between `{}` and `{}` timed out; using upper bound {}", a.name(), b.name(), r.cost);
            }
            r.cost
        }
        Err(DistanceError::Timeout) => return Ok(1.0),
        Err(e) => return Err(e),
    };
    let denom = a.node_count().max(b.node_count()) as f64 * cm.max_node_cost()
        + a.edge_count().max(b.edge_count()) as f64 * cm.max_edge_cost();
    Ok(clamp_unit(normalize(cost, denom), "ged_astar"))
}

fn normalize(cost: f64, denom: f64) -> f64 {
    if denom > 0.0 {
        cost / denom
    } else if cost > 0.0 {
        1.0
    } else {
        0.0
    }
}

// Padded (na + nb)² node assignment; returns the image of every a-node.
fn node_assignment(p: &Prepared, cm: &CostModel) -> Vec<Option<usize>> {
    node_assignment_raw(&p.node_sub, p.na, p.nb, cm)
}

fn node_assignment_raw(node_sub: &[f64], na: usize, nb: usize, cm: &CostModel) -> Vec<Option<usize>> {
    let n = na + nb;
    // larger than any complete assignment built from allowed entries
    let finite_max = node_sub.iter().copied().chain([cm.node_delete, cm.node_insert]).fold(0.0, f64::max);
    let blocked = finite_max * n as f64 + 1.0;
    let mut costs = vec![0.0; n * n];
    for i in 0..na {
        for k in 0..nb {
            costs[i * n + k] = node_sub[i * nb + k];
        }
        for j in 0..na {
            costs[i * n + nb + j] = if i == j { cm.node_delete } else { blocked };
        }
    }
    for k in 0..nb {
        for j in 0..nb {
            costs[(na + k) * n + j] = if k == j { cm.node_insert } else { blocked };
        }
    }
    let assignment = min_cost_assignment(&costs, n, n);
    (0..na).map(|i| assignment.row_to_col[i].filter(|&c| c < nb)).collect()
}

/// Node-only edit cost of an optimal node mapping, plus that mapping.
pub fn hungarian_node_mapping(a: &Aug, b: &Aug, cm: &CostModel) -> Result<(f64, Vec<Option<usize>>), DistanceError> {
    ensure_non_empty(a, b)?;
    let mut node_sub = Vec::with_capacity(a.node_count() * b.node_count());
    for x in a.nodes() {
        for y in b.nodes() {
            node_sub.push(cm.node_substitute(x, y));
        }
    }
    let mapping = node_assignment_raw(&node_sub, a.node_count(), b.node_count(), cm);
    let mut used = vec![false; b.node_count()];
    let mut cost = 0.0;
    for (i, image) in mapping.iter().enumerate() {
        match image {
            Some(k) => {
                used[*k] = true;
                cost += node_sub[i * b.node_count() + k];
            }
            None => cost += cm.node_delete,
        }
    }
    cost += used.iter().filter(|u| !**u).count() as f64 * cm.node_insert;
    Ok((cost, mapping))
}

/// Node-only edit cost from the bipartite assignment.
pub fn ged_hungarian(a: &Aug, b: &Aug, cm: &CostModel) -> Result<f64, DistanceError> {
    hungarian_node_mapping(a, b, cm).map(|(cost, _)| cost)
}

/// Normalized [`ged_hungarian`]: cost over max(|V|)·mcost_n.
pub fn dist_ged_hungarian(a: &Aug, b: &Aug, cm: &CostModel) -> Result<f64, DistanceError> {
    let cost = ged_hungarian(a, b, cm)?;
    let denom = a.node_count().max(b.node_count()) as f64 * cm.max_node_cost();
    Ok(clamp_unit(normalize(cost, denom), "ged_hungarian"))
}
