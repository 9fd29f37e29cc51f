//! Node-node similarity between two graphs by normalized iteration
//! `S ← B·S·Aᵀ + Bᵀ·S·A` on binary adjacency matrices, reduced to a
//! distance through a maximum-weight assignment.
//!
//! Labels and edge multiplicities play no role here.

use nalgebra::DMatrix;

use crate::assignment::max_weight_assignment;
use crate::graph::Aug;
use crate::{clamp_unit, ensure_non_empty, DistanceError};

pub const DEFAULT_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    /// |V_b| × |V_a|: row = node of b, column = node of a.
    pub entries: DMatrix<f64>,
    pub iterations_run: usize,
    pub converged: bool,
}

/// Binary adjacency matrix: 1 iff at least one edge u → v.
pub fn adjacency(g: &Aug) -> DMatrix<f64> {
    let n = g.node_count();
    let mut m = DMatrix::zeros(n, n);
    for e in g.edges() {
        m[(e.source, e.target)] = 1.0;
    }
    m
}

pub fn similarity_matrix(a: &Aug, b: &Aug, tol: f64, max_iter: usize) -> Result<SimilarityMatrix, DistanceError> {
    ensure_non_empty(a, b)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(DistanceError::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if max_iter < 2 || !max_iter.is_multiple_of(2) {
        return Err(DistanceError::InvalidParameter(format!("max_iter must be even and at least 2, got {max_iter}")));
    }
    let adj_a = adjacency(a);
    let adj_b = adjacency(b);
    let adj_a_t = adj_a.transpose();
    let adj_b_t = adj_b.transpose();

    let mut prev_even = DMatrix::from_element(b.node_count(), a.node_count(), 1.0);
    let mut current = prev_even.clone();
    let mut last_delta = f64::INFINITY;
    for k in 1..=max_iter {
        let next = &adj_b * &current * &adj_a_t + &adj_b_t * &current * &adj_a;
        let norm = next.norm();
        if norm == 0.0 {
            return Err(DistanceError::DegenerateStructure(format!(
                "similarity update between `{}` and `{}` vanished",
                a.name(),
                b.name()
            )));
        }
        current = next / norm;
        if k % 2 == 0 {
            let delta = (&current - &prev_even).norm();
            if delta > last_delta * (1.0 + 1e-9) && k > 4 {
                log::debug!("node similarity: even-step change grew from {last_delta} to {delta} at step {k}");
            }
            last_delta = delta;
            if delta < tol {
                return Ok(SimilarityMatrix { entries: current, iterations_run: k, converged: true });
            }
            prev_even = current.clone();
        }
    }
    log::debug!("node similarity did not converge within {max_iter} iterations");
    Ok(SimilarityMatrix { entries: current, iterations_run: max_iter, converged: false })
}

/// One minus the mean similarity of the maximum-weight node assignment.
pub fn dist_node_sim(a: &Aug, b: &Aug, tol: f64, max_iter: usize) -> Result<f64, DistanceError> {
    let s = similarity_matrix(a, b, tol, max_iter)?;
    let (rows, cols) = s.entries.shape();
    let mut weights = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            weights.push(s.entries[(r, c)]);
        }
    }
    let assignment = max_weight_assignment(&weights, rows, cols);
    let assigned: Vec<f64> = assignment.pairs().map(|(r, c)| s.entries[(r, c)]).collect();
    let mean = assigned.iter().sum::<f64>() / assigned.len() as f64;
    Ok(clamp_unit(1.0 - mean, "node_similarity"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Node};

    fn graph(n: usize, edges: &[(usize, usize)]) -> Aug {
        let nodes = (0..n).map(|i| Node::new(format!("n{i}"), format!("L{i}"), "action", "")).collect();
        let edges = edges.iter().map(|&(s, t)| Edge::new(s, t, "order")).collect();
        Aug::new("g", nodes, edges).unwrap()
    }

    #[test]
    fn single_edge_fixed_point() {
        let g = graph(2, &[(0, 1)]);
        let s = similarity_matrix(&g, &g, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        assert!(s.converged);
        assert_eq!(s.iterations_run % 2, 0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.entries[(0, 0)] - h).abs() < 1e-12);
        assert!((s.entries[(1, 1)] - h).abs() < 1e-12);
        assert!(s.entries[(0, 1)].abs() < 1e-12);
        assert!(s.entries[(1, 0)].abs() < 1e-12);
        let d = dist_node_sim(&g, &g, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        assert!((d - (1.0 - h)).abs() < 1e-12);
    }

    #[test]
    fn edgeless_is_degenerate() {
        let g = graph(2, &[(0, 1)]);
        let e = graph(3, &[]);
        assert!(matches!(
            dist_node_sim(&g, &e, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER),
            Err(DistanceError::DegenerateStructure(_))
        ));
        assert!(matches!(
            dist_node_sim(&e, &g, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER),
            Err(DistanceError::DegenerateStructure(_))
        ));
    }

    #[test]
    fn symmetric_for_same_adjacency() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]);
        let s = similarity_matrix(&g, &g, 1e-8, 200).unwrap();
        let diff = (&s.entries - s.entries.transpose()).norm();
        assert!(diff < 1e-9);
        assert!((s.entries.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bad_parameters() {
        let g = graph(2, &[(0, 1)]);
        assert!(matches!(similarity_matrix(&g, &g, 0.0, 10), Err(DistanceError::InvalidParameter(_))));
        assert!(matches!(similarity_matrix(&g, &g, 1e-4, 7), Err(DistanceError::InvalidParameter(_))));
        assert!(matches!(similarity_matrix(&g, &g, 1e-4, 0), Err(DistanceError::InvalidParameter(_))));
    }

    #[test]
    fn rectangular_inputs() {
        let a = graph(2, &[(0, 1)]);
        let b = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let s = similarity_matrix(&a, &b, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(s.entries.shape(), (4, 2));
        let d1 = dist_node_sim(&a, &b, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        assert!((0.0..=1.0).contains(&d1));
    }
}
