//! Random graph generators and brute-force oracles shared by the
//! integration tests. The oracles enumerate exhaustively and share no code
//! with the library beyond the graph types.

#![allow(dead_code)]

use std::collections::BTreeMap;

use augdist::{Aug, Edge, Node};
use proptest::prelude::*;
use rand::Rng;

pub const NODE_LABELS: [&str; 4] = ["A", "A.m()", "A.n()", "B.m()"];
pub const NODE_TYPES: [&str; 2] = ["data", "action"];
pub const EDGE_LABELS: [&str; 3] = ["order", "recv", "para"];
pub const APIS: [&str; 4] = ["p.A", "p.B", "q.C", ""];

pub fn build(name: &str, nodes: &[(usize, usize, usize)], edges: &[(usize, usize, usize)]) -> Aug {
    let nodes = nodes
        .iter()
        .enumerate()
        .map(|(i, &(l, t, a))| Node::new(format!("n{i}"), NODE_LABELS[l], NODE_TYPES[t], APIS[a]))
        .collect();
    let edges = edges.iter().map(|&(s, t, l)| Edge::new(s, t, EDGE_LABELS[l])).collect();
    Aug::new(name, nodes, edges).unwrap()
}

pub fn random_aug<R: Rng>(rng: &mut R, name: &str, min_nodes: usize, max_nodes: usize, max_edges: usize) -> Aug {
    let n = rng.gen_range(min_nodes..=max_nodes);
    let nodes: Vec<_> = (0..n)
        .map(|_| {
            (rng.gen_range(0..NODE_LABELS.len()), rng.gen_range(0..NODE_TYPES.len()), rng.gen_range(0..APIS.len()))
        })
        .collect();
    let m = rng.gen_range(0..=max_edges);
    let edges: Vec<_> =
        (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..EDGE_LABELS.len()))).collect();
    build(name, &nodes, &edges)
}

/// Random graph with node labels and types unique per node index, used for
/// larger timing fixtures.
pub fn random_large<R: Rng>(rng: &mut R, name: &str, n: usize, m: usize) -> Aug {
    let nodes = (0..n)
        .map(|i| {
            Node::new(
                format!("n{i}"),
                format!("T{}.m{}()", rng.gen_range(0..8), rng.gen_range(0..6)),
                NODE_TYPES[i % 2],
                format!("p{}.T", rng.gen_range(0..3)),
            )
        })
        .collect();
    let edges =
        (0..m).map(|_| Edge::new(rng.gen_range(0..n), rng.gen_range(0..n), EDGE_LABELS[rng.gen_range(0..3)])).collect();
    Aug::new(name, nodes, edges).unwrap()
}

pub fn aug_strategy(max_nodes: usize, max_edges: usize) -> impl Strategy<Value = Aug> {
    (1..=max_nodes).prop_flat_map(move |n| {
        let nodes = prop::collection::vec((0..NODE_LABELS.len(), 0..NODE_TYPES.len(), 0..APIS.len()), n);
        let edges = prop::collection::vec((0..n, 0..n, 0..EDGE_LABELS.len()), 0..=max_edges);
        (nodes, edges).prop_map(|(nodes, edges)| build("g", &nodes, &edges))
    })
}

/// Every partial injective map from `0..na` into `0..nb` (`None` = unmapped).
pub fn partial_injections(na: usize, nb: usize) -> Vec<Vec<Option<usize>>> {
    fn go(
        i: usize,
        na: usize,
        nb: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<Option<usize>>,
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        if i == na {
            out.push(cur.clone());
            return;
        }
        cur.push(None);
        go(i + 1, na, nb, used, cur, out);
        cur.pop();
        for k in 0..nb {
            if !used[k] {
                used[k] = true;
                cur.push(Some(k));
                go(i + 1, na, nb, used, cur, out);
                cur.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, na, nb, &mut vec![false; nb], &mut Vec::new(), &mut out);
    out
}

fn node_sub(a: &Node, b: &Node) -> f64 {
    match (a.node_type == b.node_type, a.label == b.label) {
        (true, true) => 0.0,
        (true, false) => 1.0,
        _ => 2.0,
    }
}

const DEL: f64 = 2.0;
const INS: f64 = 2.0;

/// Exact graph edit cost: every node mapping and, within it, every edge
/// matching between edges whose endpoints correspond.
pub fn brute_force_ged(a: &Aug, b: &Aug) -> f64 {
    let mut best = f64::INFINITY;
    for f in partial_injections(a.node_count(), b.node_count()) {
        let mut cost = 0.0;
        let mut hit = vec![false; b.node_count()];
        for (i, img) in f.iter().enumerate() {
            match img {
                Some(k) => {
                    hit[*k] = true;
                    cost += node_sub(&a.nodes()[i], &b.nodes()[*k]);
                }
                None => cost += DEL,
            }
        }
        cost += hit.iter().filter(|h| !**h).count() as f64 * INS;
        if cost >= best {
            continue;
        }
        // Edges of a whose endpoints both survive, grouped by image pair.
        let mut a_groups: BTreeMap<(usize, usize), Vec<&str>> = BTreeMap::new();
        for e in a.edges() {
            match (f[e.source], f[e.target]) {
                (Some(s), Some(t)) => a_groups.entry((s, t)).or_default().push(&e.label),
                _ => cost += DEL,
            }
        }
        let mut b_groups: BTreeMap<(usize, usize), Vec<&str>> = BTreeMap::new();
        for e in b.edges() {
            b_groups.entry((e.source, e.target)).or_default().push(&e.label);
        }
        let keys: std::collections::BTreeSet<(usize, usize)> =
            a_groups.keys().chain(b_groups.keys()).copied().collect();
        for key in keys {
            let ea = a_groups.get(&key).cloned().unwrap_or_default();
            let eb = b_groups.get(&key).cloned().unwrap_or_default();
            let mut group_best = f64::INFINITY;
            for g in partial_injections(ea.len(), eb.len()) {
                let matched = g.iter().filter(|x| x.is_some()).count();
                let mut c = (ea.len() - matched) as f64 * DEL + (eb.len() - matched) as f64 * INS;
                for (i, img) in g.iter().enumerate() {
                    if let Some(k) = img {
                        c += if ea[i] == eb[*k] { 0.0 } else { 2.0 };
                    }
                }
                group_best = group_best.min(c);
            }
            cost += group_best;
        }
        best = best.min(cost);
    }
    best
}

/// The normalizing denominator for edit distances: the larger graph priced
/// at the most expensive node and edge operation.
pub fn ged_denominator(a: &Aug, b: &Aug) -> f64 {
    a.node_count().max(b.node_count()) as f64 * 2.0 + a.edge_count().max(b.edge_count()) as f64 * 2.0
}

/// Exact node-only edit cost.
pub fn brute_force_node_ged(a: &Aug, b: &Aug) -> f64 {
    partial_injections(a.node_count(), b.node_count())
        .into_iter()
        .map(|f| {
            let mapped = f.iter().filter(|x| x.is_some()).count();
            let sub: f64 =
                f.iter().enumerate().filter_map(|(i, k)| k.map(|k| node_sub(&a.nodes()[i], &b.nodes()[k]))).sum();
            sub + (a.node_count() - mapped) as f64 * DEL + (b.node_count() - mapped) as f64 * INS
        })
        .fold(f64::INFINITY, f64::min)
}

/// Largest number of node pairs agreeing on label and type.
pub fn brute_force_common_nodes(a: &Aug, b: &Aug) -> usize {
    partial_injections(a.node_count(), b.node_count())
        .into_iter()
        .filter(|f| {
            f.iter().enumerate().all(|(i, k)| {
                k.is_none_or(|k| {
                    a.nodes()[i].label == b.nodes()[k].label && a.nodes()[i].node_type == b.nodes()[k].node_type
                })
            })
        })
        .map(|f| f.iter().filter(|x| x.is_some()).count())
        .max()
        .unwrap_or(0)
}

/// Simple directed paths with `nodes` vertices, counted per edge instance
/// and keyed by the alternating label sequence.
pub fn brute_force_paths(g: &Aug, nodes: usize) -> BTreeMap<Vec<String>, u64> {
    fn walk(
        g: &Aug,
        at: usize,
        left: usize,
        visited: &mut Vec<usize>,
        seq: &mut Vec<String>,
        out: &mut BTreeMap<Vec<String>, u64>,
    ) {
        if left == 0 {
            *out.entry(seq.clone()).or_insert(0) += 1;
            return;
        }
        for e in g.edges() {
            if e.source != at || visited.contains(&e.target) {
                continue;
            }
            visited.push(e.target);
            seq.push(e.label.clone());
            seq.push(g.nodes()[e.target].label.clone());
            walk(g, e.target, left - 1, visited, seq, out);
            seq.pop();
            seq.pop();
            visited.pop();
        }
    }
    let mut out = BTreeMap::new();
    for start in 0..g.node_count() {
        walk(g, start, nodes - 1, &mut vec![start], &mut vec![g.nodes()[start].label.clone()], &mut out);
    }
    out
}

/// Straight-line iteration of the node similarity update with explicit
/// loops, returning the matrix as rows of `b`'s nodes.
pub fn loop_similarity(a: &Aug, b: &Aug, tol: f64, max_iter: usize) -> Option<Vec<Vec<f64>>> {
    let (na, nb) = (a.node_count(), b.node_count());
    let adj = |g: &Aug| {
        let n = g.node_count();
        let mut m = vec![vec![0.0; n]; n];
        for e in g.edges() {
            m[e.source][e.target] = 1.0;
        }
        m
    };
    let (am, bm) = (adj(a), adj(b));
    let mut s = vec![vec![1.0; na]; nb];
    let mut prev = s.clone();
    for k in 1..=max_iter {
        let mut next = vec![vec![0.0; na]; nb];
        for i in 0..nb {
            for j in 0..na {
                let mut v = 0.0;
                for p in 0..nb {
                    for q in 0..na {
                        v += bm[i][p] * s[p][q] * am[j][q] + bm[p][i] * s[p][q] * am[q][j];
                    }
                }
                next[i][j] = v;
            }
        }
        let norm = next.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        s = next.into_iter().map(|r| r.into_iter().map(|x| x / norm).collect()).collect();
        if k % 2 == 0 {
            let delta =
                s.iter().flatten().zip(prev.iter().flatten()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            if delta < tol {
                return Some(s);
            }
            prev = s.clone();
        }
    }
    Some(s)
}
