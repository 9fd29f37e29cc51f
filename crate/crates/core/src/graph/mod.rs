//! API usage graphs (AUGs), correction rules, and their DOT encoding.
//!
//! An AUG is a directed, labeled multigraph. Nodes carry a label, a node type
//! (`action`, `data`, ...) and the fully qualified declaring type of the API
//! they belong to. Edges carry a label (`para`, `recv`, `def`, `sel`,
//! `order`, ...). Parallel edges with identical endpoints and label are kept
//! with multiplicity.

pub mod dot;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

pub use dot::{parse_aug, parse_rule, serialize_aug, serialize_rule};

/// Node type of ε-nodes in correction rules.
pub const EMPTY_NODE_TYPE: &str = "empty";

/// Api value used by the AUG generator when a type cannot be resolved.
pub const UNKNOWN_API: &str = "UNKNOWN";

/// Package key for nodes without a resolvable package.
pub const MISC_PACKAGE: &str = "misc";

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub id: String,
    pub label: String,
    pub node_type: String,
    pub api: String,
}

impl Node {
    pub fn new(
        id: impl Into<String>,
        label: impl Into<String>,
        node_type: impl Into<String>,
        api: impl Into<String>,
    ) -> Self {
        Node { id: id.into(), label: label.into(), node_type: node_type.into(), api: api.into() }
    }

    pub fn is_empty_node(&self) -> bool {
        self.node_type == EMPTY_NODE_TYPE
    }

    /// Package prefix of the node's api, or [`MISC_PACKAGE`] when none can
    /// be determined.
    pub fn package(&self) -> &str {
        package_of(self)
    }
}

/// A directed edge between two nodes, referenced by index into
/// [`Aug::nodes`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub label: String,
}

impl Edge {
    pub fn new(source: usize, target: usize, label: impl Into<String>) -> Self {
        Edge { source, target, label: label.into() }
    }
}

/// An API usage graph. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aug {
    name: String,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

impl Aug {
    /// Builds a graph, checking id uniqueness, edge endpoints, and label
    /// presence. ε-nodes are rejected: they only exist inside rules.
    pub fn new(name: impl Into<String>, nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, ParseError> {
        let mut seen = HashSet::with_capacity(nodes.len());
        for node in &nodes {
            if !seen.insert(node.id.as_str()) {
                return Err(ParseError::Schema(format!("duplicate node id `{}`", node.id)));
            }
            if node.is_empty_node() {
                return Err(ParseError::Schema(format!(
                    "node `{}` is an empty node outside of a correction rule",
                    node.id
                )));
            }
            if node.label.is_empty() {
                return Err(ParseError::Schema(format!("node `{}` has an empty label", node.id)));
            }
        }
        for edge in &edges {
            if edge.source >= nodes.len() || edge.target >= nodes.len() {
                return Err(ParseError::Schema(format!(
                    "edge {} -> {} references a missing node",
                    edge.source, edge.target
                )));
            }
        }
        Ok(Aug { name: name.into(), nodes, edges })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Induced subgraph on the nodes for which `keep` holds. Edges survive
    /// only if both endpoints are kept.
    pub fn induced_subgraph(&self, name: impl Into<String>, keep: impl Fn(&Node) -> bool) -> Aug {
        let mut remap = vec![None; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if keep(node) {
                remap[i] = Some(nodes.len());
                nodes.push(node.clone());
            }
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|e| match (remap[e.source], remap[e.target]) {
                (Some(s), Some(t)) => Some(Edge::new(s, t, e.label.clone())),
                _ => None,
            })
            .collect();
        Aug { name: name.into(), nodes, edges }
    }

    /// Edge multiset keyed by (source id, target id, label).
    pub fn edge_multiset(&self) -> BTreeMap<(&str, &str, &str), usize> {
        let mut out = BTreeMap::new();
        for e in &self.edges {
            *out.entry((self.nodes[e.source].id.as_str(), self.nodes[e.target].id.as_str(), e.label.as_str()))
                .or_insert(0) += 1;
        }
        out
    }
}

impl fmt::Display for Aug {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_aug(self))
    }
}

/// One side of a correction-rule mapping; `None` stands for an ε-node.
pub type MappedNode = Option<String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mapping {
    pub misuse: MappedNode,
    pub fix: MappedNode,
}

impl Mapping {
    pub fn is_addition(&self) -> bool {
        self.misuse.is_none() && self.fix.is_some()
    }

    pub fn is_deletion(&self) -> bool {
        self.misuse.is_some() && self.fix.is_none()
    }
}

/// A misuse AUG, its fix, and the node correspondence between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectionRule {
    pub id: String,
    pub misuse: Aug,
    pub fix: Aug,
    pub mapping: Vec<Mapping>,
}

impl CorrectionRule {
    pub fn new(id: impl Into<String>, misuse: Aug, fix: Aug, mapping: Vec<Mapping>) -> Result<Self, ParseError> {
        // both parts live in one DOT graph, so their node ids must not clash
        if let Some(n) = fix.nodes().iter().find(|n| misuse.node_index(&n.id).is_some()) {
            return Err(ParseError::Schema(format!("node id `{}` used in both misuse and fix", n.id)));
        }
        let mut misuse_seen = HashSet::new();
        let mut fix_seen = HashSet::new();
        for m in &mapping {
            match (&m.misuse, &m.fix) {
                (None, None) => {
                    return Err(ParseError::Schema("mapping between two empty nodes".into()));
                }
                (misuse_id, fix_id) => {
                    if let Some(id) = misuse_id {
                        if misuse.node_index(id).is_none() {
                            return Err(ParseError::Schema(format!("mapping references unknown misuse node `{id}`")));
                        }
                        if !misuse_seen.insert(id.clone()) {
                            return Err(ParseError::Schema(format!("misuse node `{id}` mapped twice")));
                        }
                    }
                    if let Some(id) = fix_id {
                        if fix.node_index(id).is_none() {
                            return Err(ParseError::Schema(format!("mapping references unknown fix node `{id}`")));
                        }
                        if !fix_seen.insert(id.clone()) {
                            return Err(ParseError::Schema(format!("fix node `{id}` mapped twice")));
                        }
                    }
                }
            }
        }
        Ok(CorrectionRule { id: id.into(), misuse, fix, mapping })
    }
}

/// Package prefix of `node.api` (everything before the last `.`), or
/// `"misc"` when the api is empty, `UNKNOWN`, or an unqualified name.
pub fn package_of(node: &Node) -> &str {
    let api = node.api.as_str();
    if api.is_empty() || api == UNKNOWN_API {
        return MISC_PACKAGE;
    }
    match api.rfind('.') {
        Some(pos) if pos > 0 => &api[..pos],
        _ => MISC_PACKAGE,
    }
}

/// Splits a graph into one induced subgraph per package.
pub fn split_by_api(g: &Aug) -> Result<BTreeMap<String, Aug>, crate::DistanceError> {
    if g.is_empty() {
        return Err(crate::DistanceError::EmptyGraph(g.name().to_string()));
    }
    let mut packages: HashMap<&str, ()> = HashMap::new();
    for n in g.nodes() {
        packages.insert(package_of(n), ());
    }
    Ok(packages
        .into_keys()
        .map(|pkg| {
            let sub = g.induced_subgraph(format!("{}[{}]", g.name(), pkg), |n| package_of(n) == pkg);
            (pkg.to_string(), sub)
        })
        .collect())
}
