//! Degree-distribution summaries and histograms.
//!
//! Conventions: population standard deviation, nearest-rank quantiles, and
//! mode ties broken toward the smallest degree.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::TemporalBipartiteGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeSide {
    /// In-degree of every project, zero-degree projects included.
    ProjectIn,
    /// Out-degree of every user with at least one backing.
    BackerOut,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("no nodes on the {0:?} side")]
    EmptyInput(DegreeSide),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeSummary {
    pub side: DegreeSide,
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
    pub mode: u64,
    pub zero_count: usize,
}

/// Degree multiset of one side, in node order.
pub fn degrees(graph: &TemporalBipartiteGraph, side: DegreeSide) -> Vec<u64> {
    match side {
        DegreeSide::ProjectIn => graph
            .project_indices()
            .map(|p| graph.in_degree(p) as u64)
            .collect(),
        DegreeSide::BackerOut => graph
            .backers()
            .map(|u| graph.out_degree(u) as u64)
            .collect(),
    }
}

/// Nearest-rank quantile of sorted data: element at rank `ceil(q * n)`, 1-based.
fn nearest_rank(sorted: &[u64], q: f64) -> u64 {
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

/// Summary of an arbitrary degree list.
pub fn summarize(side: DegreeSide, mut values: Vec<u64>) -> Result<DegreeSummary, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput(side));
    }
    values.sort_unstable();
    let n = values.len();
    let sum: u128 = values.iter().map(|&v| v as u128).sum();
    let mean = sum as f64 / n as f64;
    let var = values
        .iter()
        .map(|&v| {
            let d = v as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n as f64;

    // Runs in sorted data; strict `>` keeps the smallest degree on ties.
    let mut mode = values[0];
    let mut best = 0usize;
    let mut i = 0;
    while i < n {
        let j = i + values[i..].partition_point(|&v| v == values[i]);
        if j - i > best {
            best = j - i;
            mode = values[i];
        }
        i = j;
    }

    Ok(DegreeSummary {
        side,
        count: n,
        mean,
        std: var.sqrt(),
        min: values[0] as f64,
        q25: nearest_rank(&values, 0.25) as f64,
        median: nearest_rank(&values, 0.5) as f64,
        q75: nearest_rank(&values, 0.75) as f64,
        max: values[n - 1] as f64,
        mode,
        zero_count: values.partition_point(|&v| v == 0),
    })
}

pub fn degree_summary(
    graph: &TemporalBipartiteGraph,
    side: DegreeSide,
) -> Result<DegreeSummary, StatsError> {
    summarize(side, degrees(graph, side))
}

/// `(degree, count)` pairs ascending by degree.
pub fn degree_histogram(
    graph: &TemporalBipartiteGraph,
    side: DegreeSide,
) -> Result<Vec<(u64, u64)>, StatsError> {
    histogram(side, degrees(graph, side))
}

pub fn histogram(side: DegreeSide, mut values: Vec<u64>) -> Result<Vec<(u64, u64)>, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput(side));
    }
    values.sort_unstable();
    let mut out: Vec<(u64, u64)> = Vec::new();
    for v in values {
        match out.last_mut() {
            Some((d, c)) if *d == v => *c += 1,
            _ => out.push((v, 1)),
        }
    }
    Ok(out)
}
