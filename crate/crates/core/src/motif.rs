//! Buddy-relation census.
//!
//! A case is a triple `(x, P_z, w)` where `x` founded at least one project,
//! `x` and `w` (distinct users) both backed `P_z`, and `P_z` was not founded
//! by `x`. The case is *satisfied* when `w` backed some project `P_x` founded
//! by `x` strictly after both co-backings:
//! `t_back > max(t_x, t_w)`.
//!
//! Repeated backings of the same project by the same user collapse to the
//! earliest one before any of this is evaluated.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ProjectIdx, TemporalBipartiteGraph, Timestamp, UserIdx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioMode {
    /// `numerator / denominator` over all cases.
    #[default]
    Pooled,
    /// Mean over `(x, P_z)` pairs with at least one co-backer of
    /// `satisfied / co-backers`.
    PerPairMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CensusOptions {
    /// Drop co-backers `w` who founded a project themselves.
    pub exclude_founder_w: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MotifError {
    #[error("buddy ratio ({0:?}) is undefined: no co-backing cases")]
    UndefinedRatio(RatioMode),
    #[error("no (founder, project) pair has a co-backer")]
    NoQualifyingPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BuddyCase {
    pub founder_x: UserIdx,
    pub shared_project: ProjectIdx,
    pub cobacker_w: UserIdx,
    pub t_x: Timestamp,
    pub t_w: Timestamp,
    pub satisfied: bool,
    /// Earliest qualifying `P_x` (ties broken by project index).
    pub witness_project: Option<ProjectIdx>,
    pub t_back: Option<Timestamp>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairTally {
    pub founder: UserIdx,
    pub project: ProjectIdx,
    pub cobackers: u64,
    pub satisfied: u64,
}

/// Aggregate counts of a census without the per-case list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BuddyTally {
    /// Every `(x, P_z)` pair where `x` backed `P_z`, including pairs with no
    /// co-backer; ordered by founder, then project.
    pub pairs: Vec<PairTally>,
    pub denominator: u64,
    pub numerator: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BuddyCensus {
    /// Ordered by founder, then shared project, then co-backer.
    pub cases: Vec<BuddyCase>,
    pub tally: BuddyTally,
}

impl BuddyTally {
    pub fn ratio(&self, mode: RatioMode) -> Result<f64, MotifError> {
        buddy_ratio(self, mode)
    }

    pub fn cobacker_stats(&self) -> Result<(f64, f64), MotifError> {
        cobacker_stats(self)
    }
}

impl AsRef<BuddyTally> for BuddyTally {
    fn as_ref(&self) -> &BuddyTally {
        self
    }
}

impl AsRef<BuddyTally> for BuddyCensus {
    fn as_ref(&self) -> &BuddyTally {
        &self.tally
    }
}

/// Per-project backers with earliest times, sorted by user.
struct CollapsedBackers {
    offsets: Vec<usize>,
    entries: Vec<(UserIdx, Timestamp)>,
}

impl CollapsedBackers {
    fn new(graph: &TemporalBipartiteGraph) -> Self {
        let mut seen = vec![u32::MAX; graph.user_count()];
        let mut offsets = Vec::with_capacity(graph.project_count() + 1);
        let mut entries = Vec::with_capacity(graph.edge_count());
        offsets.push(0);
        for p in graph.project_indices() {
            let begin = entries.len();
            // Edges are in time order, so the first sighting is the earliest.
            for e in graph.edges_of_project(p) {
                if seen[e.backer.index()] != p.0 {
                    seen[e.backer.index()] = p.0;
                    entries.push((e.backer, e.time));
                }
            }
            entries[begin..].sort_unstable_by_key(|&(u, _)| u);
            offsets.push(entries.len());
        }
        CollapsedBackers { offsets, entries }
    }

    fn of(&self, p: ProjectIdx) -> &[(UserIdx, Timestamp)] {
        &self.entries[self.offsets[p.index()]..self.offsets[p.index() + 1]]
    }
}

fn scan(
    graph: &TemporalBipartiteGraph,
    opts: CensusOptions,
    mut on_case: impl FnMut(BuddyCase),
) -> BuddyTally {
    let backers = CollapsedBackers::new(graph);
    let mut tally = BuddyTally::default();
    let mut seen_project = vec![u32::MAX; graph.project_count()];
    let mut own_backings: Vec<(ProjectIdx, Timestamp)> = Vec::new();
    // (w, t_back, P_x) for every collapsed backing into x's projects.
    let mut witnesses: Vec<(UserIdx, Timestamp, ProjectIdx)> = Vec::new();

    for x in graph.users() {
        if !graph.is_founder(x) || graph.out_degree(x) == 0 {
            continue;
        }

        own_backings.clear();
        for e in graph.edges_of_backer(x) {
            if seen_project[e.project.index()] != x.0 {
                seen_project[e.project.index()] = x.0;
                if graph.founder_of(e.project) != x {
                    own_backings.push((e.project, e.time));
                }
            }
        }
        if own_backings.is_empty() {
            continue;
        }
        own_backings.sort_unstable_by_key(|&(p, _)| p);

        witnesses.clear();
        for px in graph.founded_by(x) {
            witnesses.extend(backers.of(px).iter().map(|&(w, t)| (w, t, px)));
        }
        witnesses.sort_unstable();

        for &(pz, t_x) in &own_backings {
            let mut pair = PairTally {
                founder: x,
                project: pz,
                cobackers: 0,
                satisfied: 0,
            };
            for &(w, t_w) in backers.of(pz) {
                if w == x || (opts.exclude_founder_w && graph.is_founder(w)) {
                    continue;
                }
                let after = t_x.max(t_w);
                let lo = witnesses.partition_point(|&(u, _, _)| u < w);
                let hi = lo + witnesses[lo..].partition_point(|&(u, _, _)| u == w);
                let run = &witnesses[lo..hi];
                let first = run.partition_point(|&(_, t, _)| t <= after);
                // P_x != P_z holds because founder(P_z) != x.
                let witness = run.get(first);
                let satisfied = witness.is_some();

                pair.cobackers += 1;
                pair.satisfied += satisfied as u64;
                on_case(BuddyCase {
                    founder_x: x,
                    shared_project: pz,
                    cobacker_w: w,
                    t_x,
                    t_w,
                    satisfied,
                    witness_project: witness.map(|&(_, _, p)| p),
                    t_back: witness.map(|&(_, t, _)| t),
                });
            }
            tally.denominator += pair.cobackers;
            tally.numerator += pair.satisfied;
            tally.pairs.push(pair);
        }
    }
    tally
}

/// Full census including every case.
pub fn enumerate_buddy_cases(graph: &TemporalBipartiteGraph, opts: CensusOptions) -> BuddyCensus {
    let mut cases = Vec::new();
    let tally = scan(graph, opts, |c| cases.push(c));
    BuddyCensus { cases, tally }
}

/// Census counts only; what the Monte Carlo trials use.
pub fn tally_buddy_cases(graph: &TemporalBipartiteGraph, opts: CensusOptions) -> BuddyTally {
    scan(graph, opts, |_| {})
}

pub fn buddy_ratio(tally: &BuddyTally, mode: RatioMode) -> Result<f64, MotifError> {
    match mode {
        RatioMode::Pooled => {
            if tally.denominator == 0 {
                return Err(MotifError::UndefinedRatio(mode));
            }
            Ok(tally.numerator as f64 / tally.denominator as f64)
        }
        RatioMode::PerPairMean => {
            let (sum, n) = tally
                .pairs
                .iter()
                .filter(|p| p.cobackers > 0)
                .fold((0.0, 0usize), |(s, n), p| {
                    (s + p.satisfied as f64 / p.cobackers as f64, n + 1)
                });
            if n == 0 {
                return Err(MotifError::UndefinedRatio(mode));
            }
            Ok(sum / n as f64)
        }
    }
}

/// Means of co-backer count and satisfied count over pairs with at least one
/// co-backer.
pub fn cobacker_stats(tally: &BuddyTally) -> Result<(f64, f64), MotifError> {
    let (cob, sat, n) = tally
        .pairs
        .iter()
        .filter(|p| p.cobackers > 0)
        .fold((0u64, 0u64, 0u64), |(c, s, n), p| {
            (c + p.cobackers, s + p.satisfied, n + 1)
        });
    if n == 0 {
        return Err(MotifError::NoQualifyingPair);
    }
    Ok((cob as f64 / n as f64, sat as f64 / n as f64))
}
