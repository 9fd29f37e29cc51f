//! Graph distances for API usage graphs (AUGs).
//!
//! The crate implements eight distance algorithms over AUGs (two graph edit
//! distance variants, a maximum-common-subgraph distance, node-node
//! similarity, and four Exas feature-vector distances), the correction-rule
//! model, and an evaluation harness that checks rule applicability and
//! misuse-detection precision/recall.

pub mod assignment;
pub mod cli;
pub mod evaluation;
pub mod exas;
pub mod ged;
pub mod graph;
pub mod mcs;
pub mod node_similarity;

pub use evaluation::{Algorithm, Metric, Options};
pub use exas::CosineMode;
pub use graph::{Aug, CorrectionRule, Edge, Node, ParseError};

/// Errors raised by the distance algorithms.
#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum DistanceError {
    #[error("graph `{0}` is empty")]
    EmptyGraph(String),
    #[error("no complete edit path found before the deadline")]
    Timeout,
    #[error("degenerate structure: {0}")]
    DegenerateStructure(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl DistanceError {
    /// Errors that mark a pair as incomputable rather than aborting a run.
    pub fn is_incomputable(&self) -> bool {
        matches!(self, DistanceError::Timeout | DistanceError::DegenerateStructure(_))
    }
}

pub(crate) fn ensure_non_empty(a: &Aug, b: &Aug) -> Result<(), DistanceError> {
    for g in [a, b] {
        if g.is_empty() {
            return Err(DistanceError::EmptyGraph(g.name().to_string()));
        }
    }
    Ok(())
}

/// Clamps a normalized distance into [0, 1], logging when the raw value
/// falls outside.
pub(crate) fn clamp_unit(value: f64, what: &str) -> f64 {
    if !(0.0..=1.0).contains(&value) {
        log::warn!("{what}: normalized distance {value} clamped to [0, 1]");
    }
    value.clamp(0.0, 1.0)
}
