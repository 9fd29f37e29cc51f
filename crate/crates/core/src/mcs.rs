//! Maximum-common-subgraph distance, computed as a node-only edit distance
//! under MCS costs.

use crate::ged::{hungarian_node_mapping, CostModel};
use crate::graph::Aug;
use crate::{ensure_non_empty, DistanceError};

/// MCS cost model for a pair: the forbidden cost exceeds deleting and
/// inserting every element of both graphs.
pub fn mcs_cost_model(a: &Aug, b: &Aug) -> CostModel {
    let forbidden = (a.node_count() + b.node_count() + a.edge_count() + b.edge_count() + 1) as f64;
    CostModel::mcs(forbidden)
}

#[derive(Debug, Clone, PartialEq)]
pub struct McsMatching {
    pub cost: f64,
    /// Matched (a, b) node pairs; every pair agrees on label and type.
    pub pairs: Vec<(usize, usize)>,
}

pub fn mcs_hungarian(a: &Aug, b: &Aug) -> Result<McsMatching, DistanceError> {
    ensure_non_empty(a, b)?;
    let cm = mcs_cost_model(a, b);
    let (cost, mapping) = hungarian_node_mapping(a, b, &cm)?;
    let pairs: Vec<(usize, usize)> = mapping.iter().enumerate().filter_map(|(i, k)| k.map(|k| (i, k))).collect();
    debug_assert!(
        pairs.iter().all(|&(i, k)| cm.node_substitute(&a.nodes()[i], &b.nodes()[k]) == 0.0),
        "forbidden substitution selected"
    );
    Ok(McsMatching { cost, pairs })
}

/// MCS assignment cost over max(|V_a|, |V_b|), clamped to [0, 1].
pub fn dist_mcs_hungarian(a: &Aug, b: &Aug) -> Result<f64, DistanceError> {
    let m = mcs_hungarian(a, b)?;
    let denom = a.node_count().max(b.node_count()) as f64;
    let raw = m.cost / denom;
    // the node-count denominator is routinely exceeded, so this is not a warning
    if raw > 1.0 {
        log::debug!("mcs_hungarian: normalized distance {raw} clamped to 1");
    }
    Ok(raw.min(1.0))
}
