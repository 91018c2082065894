//! Independent oracles and random inputs shared by the integration tests.
//! Nothing here goes through the library's indexes or census code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use buddynet::graph::{BackingRow, ProjectSpec};
use buddynet::{TemporalBipartiteGraph, Timestamp};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// (founder_x, shared_project, cobacker_w, satisfied)
pub type CaseKey = (String, String, String, bool);

/// Brute-force census over raw rows: every (user, project, user) triple and
/// every candidate witness project is checked directly.
pub fn brute_force_cases(projects: &[ProjectSpec], rows: &[BackingRow]) -> BTreeSet<CaseKey> {
    let mut earliest: HashMap<(&str, &str), i64> = HashMap::new();
    for r in rows {
        let e = earliest
            .entry((r.backer.as_str(), r.project.as_str()))
            .or_insert(r.time.0);
        *e = (*e).min(r.time.0);
    }
    let founder: HashMap<&str, &str> = projects
        .iter()
        .map(|p| (p.id.as_str(), p.founder.as_str()))
        .collect();
    let users: BTreeSet<&str> = projects
        .iter()
        .map(|p| p.founder.as_str())
        .chain(rows.iter().map(|r| r.backer.as_str()))
        .collect();

    let mut cases = BTreeSet::new();
    for &x in &users {
        if !projects.iter().any(|p| p.founder.as_str() == x) {
            continue;
        }
        for pz in projects {
            let pz = pz.id.as_str();
            if founder[pz] == x {
                continue;
            }
            let Some(&tx) = earliest.get(&(x, pz)) else {
                continue;
            };
            for &w in &users {
                if w == x {
                    continue;
                }
                let Some(&tw) = earliest.get(&(w, pz)) else {
                    continue;
                };
                let satisfied = projects.iter().any(|px| {
                    let px = px.id.as_str();
                    founder[px] == x
                        && px != pz
                        && earliest.get(&(w, px)).is_some_and(|&tb| tb > tx.max(tw))
                });
                cases.insert((x.to_owned(), pz.to_owned(), w.to_owned(), satisfied));
            }
        }
    }
    cases
}

pub fn census_keys(
    graph: &TemporalBipartiteGraph,
    census: &buddynet::BuddyCensus,
) -> BTreeSet<CaseKey> {
    census
        .cases
        .iter()
        .map(|c| {
            (
                graph.user_id(c.founder_x).to_string(),
                graph.project(c.shared_project).id.to_string(),
                graph.user_id(c.cobacker_w).to_string(),
                c.satisfied,
            )
        })
        .collect()
}

/// Small random dataset: up to `max_users` users, `max_projects` projects
/// (founders drawn from the same users), `max_edges` edges with times in a
/// narrow range so ties are common.
pub fn random_small(
    seed: u64,
    max_users: usize,
    max_projects: usize,
    max_edges: usize,
) -> (Vec<ProjectSpec>, Vec<BackingRow>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_users = rng.random_range(2..=max_users);
    let n_projects = rng.random_range(1..=max_projects);
    let n_edges = rng.random_range(0..=max_edges);
    let projects: Vec<ProjectSpec> = (0..n_projects)
        .map(|k| ProjectSpec {
            id: format!("p{k}").as_str().into(),
            founder: format!("u{}", rng.random_range(0..n_users)).as_str().into(),
            deadline: Timestamp(rng.random_range(10..30)),
            start: if rng.random_bool(0.5) {
                Some(Timestamp(rng.random_range(0..10)))
            } else {
                None
            },
        })
        .collect();
    let rows = (0..n_edges)
        .map(|_| BackingRow {
            backer: format!("u{}", rng.random_range(0..n_users)).as_str().into(),
            project: format!("p{}", rng.random_range(0..n_projects))
                .as_str()
                .into(),
            time: Timestamp(rng.random_range(0..25)),
        })
        .collect();
    (projects, rows)
}

/// Naive degree statistics from a raw list.
pub struct NaiveSummary {
    pub mean: f64,
    pub std: f64,
    pub min: u64,
    pub q25: u64,
    pub median: u64,
    pub q75: u64,
    pub max: u64,
    pub mode: u64,
    pub zeros: usize,
}

pub fn naive_summary(values: &[u64]) -> NaiveSummary {
    let n = values.len();
    let mut sorted = values.to_vec();
    // insertion sort, deliberately unrelated to the library's path
    for i in 1..n {
        let mut j = i;
        while j > 0 && sorted[j - 1] > sorted[j] {
            sorted.swap(j - 1, j);
            j -= 1;
        }
    }
    let mut total = 0.0;
    for &v in values {
        total += v as f64;
    }
    let mean = total / n as f64;
    let mut ss = 0.0;
    for &v in values {
        ss += (v as f64 - mean).powi(2);
    }
    // smallest k (1-based) with k / n >= q
    let rank = |q: f64| {
        let mut k = 1;
        while (k as f64) < q * n as f64 {
            k += 1;
        }
        sorted[k - 1]
    };
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for &v in values {
        *counts.entry(v).or_default() += 1;
    }
    let top = *counts.values().max().unwrap();
    let mode = *counts.iter().find(|(_, &c)| c == top).unwrap().0;
    NaiveSummary {
        mean,
        std: (ss / n as f64).sqrt(),
        min: sorted[0],
        q25: rank(0.25),
        median: rank(0.5),
        q75: rank(0.75),
        max: sorted[n - 1],
        mode,
        zeros: values.iter().filter(|&&v| v == 0).count(),
    }
}

/// Prints one acceptance line and fails the test when `ok` is false. The
/// line goes straight to the stdout handle so it shows without `--nocapture`.
pub fn verdict(id: &str, ok: bool, detail: String) {
    let line = format!("[{}] {id}: {detail}\n", if ok { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(ok, "{id} failed: {detail}");
}
