//! Conditional uniform graph null model.
//!
//! Every observed edge `a → P_b` at time `t` is redrawn as `a → P_k`, where
//! `P_k` comes from the projects live at `t` (plus `P_b` itself if its own
//! lifespan excludes `t`) with probability `s_k / Σ s`, `s` being observed
//! popularity. Sources and timestamps are untouched, so every backer keeps
//! its out-degree.

mod cug;
mod rewire;
mod sampler;

use num_rational::Ratio;

use crate::graph::{Backing, ProjectIdx, TemporalBipartiteGraph, Timestamp};

pub use cug::{
    cug_test, monte_carlo_p_value, ratio_histogram, trial_seed, CugConfig, CugError, CugResult,
};
pub use rewire::{
    check_rewiring, rewire_graph, rewire_graph_by_candidate_sets, NullModel, SimulatedGraph,
};
pub use sampler::CategoricalSampler;

/// Legal rewiring targets for one edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub edge_time: Timestamp,
    /// Live projects ascending by index, then the force-included original
    /// target if it was not live.
    pub members: Vec<ProjectIdx>,
    /// Observed popularity of each member.
    pub weights: Vec<u64>,
    pub total_weight: u64,
    /// Set when the original target was appended despite its lifespan.
    pub forced: Option<ProjectIdx>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `Cat(d | μ)` with `μ_k = s_k / Σ s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceDistribution {
    weights: Vec<u64>,
    total: u64,
}

impl ChoiceDistribution {
    /// `None` when the weights sum to zero.
    pub fn from_weights(weights: &[u64]) -> Option<Self> {
        let total = weights.iter().try_fold(0u64, |a, &w| a.checked_add(w))?;
        (total > 0).then(|| ChoiceDistribution {
            weights: weights.to_vec(),
            total,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Exact `μ_k`.
    pub fn probability(&self, k: usize) -> Ratio<u64> {
        Ratio::new(self.weights[k], self.total)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.weights
            .iter()
            .map(|&w| w as f64 / self.total as f64)
            .collect()
    }

    pub fn sampler(&self) -> CategoricalSampler {
        CategoricalSampler::new(&self.weights).expect("total > 0 by construction")
    }
}

/// Projects live at `edge.time`, weighted by observed popularity. The
/// edge's own target is appended when its lifespan excludes the edge time,
/// which keeps `total_weight >= 1` for every observed edge.
pub fn candidate_set(graph: &TemporalBipartiteGraph, edge: &Backing) -> CandidateSet {
    let mut members = graph.live_at(edge.time);
    let forced = if graph.project(edge.project).is_live_at(edge.time) {
        None
    } else {
        members.push(edge.project);
        Some(edge.project)
    };
    let weights: Vec<u64> = members
        .iter()
        .map(|&p| graph.project(p).popularity)
        .collect();
    let total_weight = weights.iter().sum();
    CandidateSet {
        edge_time: edge.time,
        members,
        weights,
        total_weight,
        forced,
    }
}

/// # Panics
///
/// If `cs.total_weight == 0`. Candidate sets built from observed edges always
/// contain their original target with weight at least one, so this signals a
/// broken invariant rather than bad input.
pub fn choice_distribution(cs: &CandidateSet) -> ChoiceDistribution {
    ChoiceDistribution::from_weights(&cs.weights)
        .expect("candidate set with zero total weight: original target missing")
}
