//! Synthetic backing networks with a tunable planted buddy effect.
//!
//! Generative process, all driven by one ChaCha8 stream seeded from
//! [`SynthConfig::seed`]:
//!
//! 1. Each project gets a founder, a duration, a start uniform in
//!    `[0, horizon - duration]`, and a base attractiveness drawn from a
//!    Pareto law with shape `popularity_exponent` (scale 1).
//!    `round(founder_backer_fraction · n_projects)` founders are picked from
//!    the backer pool; the rest are founders who never back.
//! 2. Each backer gets one event plus a share of the remaining events drawn
//!    in proportion to a Pareto(`activity_exponent`) activity weight, so most
//!    backers act once and a few act very often. The actor sequence is
//!    shuffled. Event times have density proportional to the total
//!    attractiveness of the projects live at that time, so every project
//!    collects backings at a rate proportional to its own attractiveness.
//! 3. At each event, with probability `buddy_boost` the actor `w` picks
//!    uniformly among live projects `P_x` it has not backed yet whose founder
//!    `x` co-backed an earlier project `P_z` with `w` (`x` not the founder of
//!    `P_z`); this planted completion is logged. Otherwise, or when no such
//!    project exists, the target is a live project drawn in proportion to
//!    base attractiveness.
//!
//! With `buddy_boost = 0` the graph is a pure popularity-driven process. With
//! a fixed project duration the expected in-degree of a project is
//! proportional to its attractiveness, which is the weighting the null model
//! uses; a duration range breaks that proportionality.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Pareto;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    BackerId, BackingRow, GraphError, ProjectId, ProjectSpec, TemporalBipartiteGraph, Timestamp,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProjectDuration {
    Fixed(i64),
    /// Uniform over the inclusive range.
    Range([i64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_backers: usize,
    pub n_projects: usize,
    pub n_events: usize,
    /// Length of the observation window in seconds.
    pub horizon: i64,
    pub project_duration: ProjectDuration,
    pub founder_backer_fraction: f64,
    pub popularity_exponent: f64,
    pub activity_exponent: f64,
    pub buddy_boost: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_backers: 2_000,
            n_projects: 100,
            n_events: 10_000,
            horizon: 1_000_000,
            project_duration: ProjectDuration::Fixed(200_000),
            founder_backer_fraction: 0.5,
            popularity_exponent: 1.5,
            activity_exponent: 1.5,
            buddy_boost: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synth config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidConfig(m.to_owned()));
        if self.n_backers == 0 || self.n_projects == 0 || self.n_events == 0 {
            return bad("n_backers, n_projects and n_events must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.buddy_boost) {
            return bad("buddy_boost must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.founder_backer_fraction) {
            return bad("founder_backer_fraction must lie in [0, 1]");
        }
        if !(self.popularity_exponent > 0.0 && self.popularity_exponent.is_finite())
            || !(self.activity_exponent > 0.0 && self.activity_exponent.is_finite())
        {
            return bad("exponents must be positive and finite");
        }
        let (lo, hi) = self.duration_bounds();
        if lo < 0 || lo > hi || hi > self.horizon {
            return bad("project_duration must lie within [0, horizon]");
        }
        if self.founder_backers() > self.n_backers {
            return bad("more founder-backers than backers");
        }
        Ok(())
    }

    fn duration_bounds(&self) -> (i64, i64) {
        match self.project_duration {
            ProjectDuration::Fixed(d) => (d, d),
            ProjectDuration::Range([a, b]) => (a, b),
        }
    }

    fn founder_backers(&self) -> usize {
        (self.founder_backer_fraction * self.n_projects as f64).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedCompletion {
    pub cobacker_w: BackerId,
    pub founder_x: BackerId,
    /// First project `x` and `w` were seen co-backing.
    pub shared_project: ProjectId,
    pub target_project: ProjectId,
    pub time: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GroundTruthLog {
    pub config: Option<SynthConfig>,
    pub planted: Vec<PlantedCompletion>,
    /// Events that found no live project. Event times are drawn inside
    /// lifespans, so this stays 0 unless that sampling changes.
    pub skipped_events: usize,
    pub edges: usize,
}

struct Project {
    founder: u32,
    start: i64,
    deadline: i64,
    attractiveness: f64,
}

/// Mutable simulation state; user and project ids are dense indices.
struct World {
    projects: Vec<Project>,
    /// Project founded by each user, if any (one project per founder).
    founded: Vec<Option<u32>>,
    backed: Vec<Vec<u32>>,
    backers_of: Vec<Vec<u32>>,
    founder_backers_of: Vec<Vec<u32>>,
    /// For each user `w`: founders `x` that co-backed with `w`, mapped to the
    /// first shared project.
    cofounders: Vec<BTreeMap<u32, u32>>,
}

impl World {
    fn new(n_users: usize, projects: Vec<Project>) -> Self {
        let mut founded = vec![None; n_users];
        for (k, p) in projects.iter().enumerate() {
            founded[p.founder as usize] = Some(k as u32);
        }
        let n_projects = projects.len();
        World {
            projects,
            founded,
            backed: vec![Vec::new(); n_users],
            backers_of: vec![Vec::new(); n_projects],
            founder_backers_of: vec![Vec::new(); n_projects],
            cofounders: vec![BTreeMap::new(); n_users],
        }
    }

    fn has_backed(&self, u: u32, p: u32) -> bool {
        self.backed[u as usize].contains(&p)
    }

    /// Live projects `w` could back as a buddy completion, with their founder.
    fn buddy_targets(&self, w: u32, live: &[u32]) -> Vec<(u32, u32)> {
        self.cofounders[w as usize]
            .keys()
            .filter_map(|&x| self.founded[x as usize].map(|px| (x, px)))
            .filter(|&(_, px)| live.contains(&px) && !self.has_backed(w, px))
            .collect()
    }

    fn record(&mut self, u: u32, p: u32) {
        if self.has_backed(u, p) {
            return;
        }
        let owner = self.projects[p as usize].founder;
        for &v in &self.founder_backers_of[p as usize] {
            if v != u && v != owner {
                self.cofounders[u as usize].entry(v).or_insert(p);
            }
        }
        if self.founded[u as usize].is_some() && u != owner {
            for &v in &self.backers_of[p as usize] {
                if v != u {
                    self.cofounders[v as usize].entry(u).or_insert(p);
                }
            }
            self.founder_backers_of[p as usize].push(u);
        }
        self.backers_of[p as usize].push(u);
        self.backed[u as usize].push(p);
    }
}

/// Event times over `[0, horizon]` with density proportional to the total
/// attractiveness of the live projects, sorted.
fn event_times(rng: &mut ChaCha8Rng, projects: &[Project], n: usize) -> Vec<i64> {
    // (time, live-count delta, attractiveness delta); lifespans are inclusive
    let mut changes: Vec<(i64, i64, f64)> = projects
        .iter()
        .flat_map(|p| {
            [
                (p.start, 1, p.attractiveness),
                (p.deadline + 1, -1, -p.attractiveness),
            ]
        })
        .collect();
    changes.sort_by_key(|c| c.0);
    let mut segments = Vec::new();
    let mut weights = Vec::new();
    let (mut live, mut level) = (0i64, 0.0f64);
    for (i, &(t, dn, da)) in changes.iter().enumerate() {
        live += dn;
        level += da;
        let end = changes.get(i + 1).map_or(t, |c| c.0);
        if live > 0 && end > t {
            segments.push((t, end));
            weights.push(level.max(0.0) * (end - t) as f64);
        }
    }
    let pick = WeightedIndex::new(&weights).expect("some project is live");
    let mut times: Vec<i64> = (0..n)
        .map(|_| {
            let (a, b) = segments[pick.sample(rng)];
            rng.random_range(a..b)
        })
        .collect();
    times.sort_unstable();
    times
}

fn pick_weighted(rng: &mut ChaCha8Rng, live: &[u32], projects: &[Project]) -> u32 {
    let total: f64 = live
        .iter()
        .map(|&p| projects[p as usize].attractiveness)
        .sum();
    let mut u = rng.random::<f64>() * total;
    for &p in live {
        u -= projects[p as usize].attractiveness;
        if u < 0.0 {
            return p;
        }
    }
    *live.last().expect("live set is non-empty")
}

/// Generates a dataset. The graph is built with explicit project starts.
pub fn generate(
    config: &SynthConfig,
) -> Result<(TemporalBipartiteGraph, GroundTruthLog), SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_backers = config.n_backers;
    let n_projects = config.n_projects;

    // Users 0..n_backers back; founder-only users follow.
    let mut founder_pool: Vec<u32> = (0..n_backers as u32).collect();
    founder_pool.shuffle(&mut rng);
    let founder_backers = config.founder_backers();
    let mut next_user = n_backers as u32;
    let (dmin, dmax) = config.duration_bounds();
    let pareto = Pareto::new(1.0, config.popularity_exponent)
        .map_err(|e| SynthError::InvalidConfig(e.to_string()))?;
    let projects: Vec<Project> = (0..n_projects)
        .map(|k| {
            let founder = if k < founder_backers {
                founder_pool[k]
            } else {
                next_user += 1;
                next_user - 1
            };
            let duration = rng.random_range(dmin..=dmax);
            let start = rng.random_range(0..=config.horizon - duration);
            Project {
                founder,
                start,
                deadline: start + duration,
                attractiveness: pareto.sample(&mut rng),
            }
        })
        .collect();
    let n_users = next_user as usize;
    let user_name = |u: u32| {
        if (u as usize) < n_backers {
            BackerId(format!("b{u}"))
        } else {
            BackerId(format!("f{}", u as usize - n_backers))
        }
    };

    // Actor sequence.
    let mut actors: Vec<u32> = if config.n_events >= n_backers {
        (0..n_backers as u32).collect()
    } else {
        rand::seq::index::sample(&mut rng, n_backers, config.n_events)
            .into_iter()
            .map(|i| i as u32)
            .collect()
    };
    if config.n_events > n_backers {
        let activity = Pareto::new(1.0, config.activity_exponent)
            .map_err(|e| SynthError::InvalidConfig(e.to_string()))?;
        let weights: Vec<f64> = (0..n_backers).map(|_| activity.sample(&mut rng)).collect();
        let pick =
            WeightedIndex::new(&weights).map_err(|e| SynthError::InvalidConfig(e.to_string()))?;
        actors.extend((n_backers..config.n_events).map(|_| pick.sample(&mut rng) as u32));
    }
    actors.shuffle(&mut rng);
    let times = event_times(&mut rng, &projects, config.n_events);

    let mut by_start: Vec<u32> = (0..n_projects as u32).collect();
    by_start.sort_by_key(|&p| projects[p as usize].start);
    let mut world = World::new(n_users, projects);
    let mut live: Vec<u32> = Vec::new();
    let mut opened = 0;

    let mut rows = Vec::with_capacity(config.n_events);
    let mut truth = GroundTruthLog {
        config: Some(config.clone()),
        ..GroundTruthLog::default()
    };

    for (&t, &w) in times.iter().zip(&actors) {
        while opened < by_start.len() && world.projects[by_start[opened] as usize].start <= t {
            live.push(by_start[opened]);
            opened += 1;
        }
        live.retain(|&p| world.projects[p as usize].deadline >= t);
        if live.is_empty() {
            truth.skipped_events += 1;
            continue;
        }
        // Keep the live list in index order so draws do not depend on
        // insertion history.
        live.sort_unstable();

        let mut target = None;
        if config.buddy_boost > 0.0 && rng.random::<f64>() < config.buddy_boost {
            let options = world.buddy_targets(w, &live);
            if let Some(&(x, px)) = options.choose(&mut rng) {
                let pz = world.cofounders[w as usize][&x];
                truth.planted.push(PlantedCompletion {
                    cobacker_w: user_name(w),
                    founder_x: user_name(x),
                    shared_project: ProjectId(format!("p{pz}")),
                    target_project: ProjectId(format!("p{px}")),
                    time: Timestamp(t),
                });
                target = Some(px);
            }
        }
        let p = target.unwrap_or_else(|| pick_weighted(&mut rng, &live, &world.projects));
        world.record(w, p);
        rows.push(BackingRow {
            backer: user_name(w),
            project: ProjectId(format!("p{p}")),
            time: Timestamp(t),
        });
    }
    truth.edges = rows.len();

    let specs = world
        .projects
        .iter()
        .enumerate()
        .map(|(k, p)| ProjectSpec {
            id: ProjectId(format!("p{k}")),
            founder: user_name(p.founder),
            deadline: Timestamp(p.deadline),
            start: Some(Timestamp(p.start)),
        })
        .collect();
    let graph = TemporalBipartiteGraph::from_parts(specs, rows)?;
    Ok((graph, truth))
}
