mod common;

use std::collections::BTreeSet;

use buddynet::graph::{validate, write_backings, write_projects, FindingClass, StartSource};
use buddynet::{load_graph, TemporalBipartiteGraph};
use common::random_small;
use proptest::prelude::*;

type EdgeKey = (String, String, i64);

fn edge_multiset(g: &TemporalBipartiteGraph) -> Vec<EdgeKey> {
    let mut v: Vec<EdgeKey> = g
        .edges()
        .iter()
        .map(|e| {
            (
                g.user_id(e.backer).to_string(),
                g.project(e.project).id.to_string(),
                e.time.0,
            )
        })
        .collect();
    v.sort();
    v
}

fn project_keys(g: &TemporalBipartiteGraph) -> Vec<(String, String, i64, i64, u64)> {
    g.projects()
        .iter()
        .map(|p| {
            (
                p.id.to_string(),
                p.founder.to_string(),
                p.start.0,
                p.deadline.0,
                p.popularity,
            )
        })
        .collect()
}

fn roundtrip(g: &TemporalBipartiteGraph) -> TemporalBipartiteGraph {
    let mut b = Vec::new();
    let mut p = Vec::new();
    write_backings(g, &mut b).unwrap();
    write_projects(g, &mut p).unwrap();
    load_graph(b.as_slice(), p.as_slice()).unwrap()
}

proptest! {
    #[test]
    fn write_then_load_preserves_the_graph(seed in any::<u64>()) {
        let (projects, rows) = random_small(seed, 15, 8, 60);
        let g = TemporalBipartiteGraph::from_parts(projects, rows).unwrap();
        let h = roundtrip(&g);
        let users = |g: &TemporalBipartiteGraph| -> BTreeSet<String> {
            g.users().map(|u| g.user_id(u).to_string()).collect()
        };
        prop_assert_eq!(users(&g), users(&h));
        prop_assert_eq!(project_keys(&g), project_keys(&h));
        prop_assert_eq!(edge_multiset(&g), edge_multiset(&h));
        prop_assert!(h.projects().iter().all(|p| p.start_source == StartSource::Explicit));
    }

    #[test]
    fn popularity_is_in_degree(seed in any::<u64>()) {
        let (projects, rows) = random_small(seed, 15, 8, 60);
        let g = TemporalBipartiteGraph::from_parts(projects, rows).unwrap();
        for p in g.project_indices() {
            let by_scan = g.edges().iter().filter(|e| e.project == p).count();
            prop_assert_eq!(g.project(p).popularity as usize, by_scan);
            prop_assert_eq!(g.in_degree(p), by_scan);
        }
        for u in g.users() {
            let by_scan = g.edges().iter().filter(|e| e.backer == u).count();
            prop_assert_eq!(g.out_degree(u), by_scan);
        }
    }

    #[test]
    fn live_set_matches_linear_scan(seed in any::<u64>(), t in 0i64..35) {
        let (projects, rows) = random_small(seed, 10, 40, 80);
        let g = TemporalBipartiteGraph::from_parts(projects, rows).unwrap();
        let scan: Vec<_> = g
            .project_indices()
            .filter(|&p| {
                let r = g.project(p);
                r.start.0 <= t && t <= r.deadline.0
            })
            .collect();
        prop_assert_eq!(g.live_at(buddynet::Timestamp(t)), scan);
    }
}

#[test]
fn edges_are_time_ordered_and_stable() {
    let backings = "backer_id,project_id,timestamp\nb,p,5\na,p,3\nc,p,5\na,q,1\n";
    let projects = "project_id,founder_id,deadline\np,f,10\nq,f,10\n";
    let g = load_graph(backings.as_bytes(), projects.as_bytes()).unwrap();
    let order: Vec<(&str, i64)> = g
        .edges()
        .iter()
        .map(|e| (g.user_id(e.backer).as_str(), e.time.0))
        .collect();
    assert_eq!(order, [("a", 1), ("a", 3), ("b", 5), ("c", 5)]);
}

#[test]
fn validation_counts_every_inconsistency_class() {
    let backings = "backer_id,project_id,timestamp\n\
                    a,p,1\n\
                    a,p,15\n\
                    b,q,7\n\
                    f,q,8\n";
    let projects = "project_id,founder_id,deadline,start\n\
                    p,f,10,2\n\
                    q,g,20,9\n\
                    r,g,30,\n\
                    s,h,5,6\n";
    let g = load_graph(backings.as_bytes(), projects.as_bytes()).unwrap();
    let report = validate(&g);
    assert_eq!(report.count(FindingClass::EdgeBeforeStart), 3);
    assert_eq!(report.count(FindingClass::EdgeAfterDeadline), 1);
    assert_eq!(report.count(FindingClass::StartAfterDeadline), 1);
    assert_eq!(report.count(FindingClass::ZeroBackingProject), 2);
    assert_eq!(report.count(FindingClass::StartImputedNoBacking), 1);
    assert_eq!(report.count(FindingClass::BackerIsFounder), 1);
    assert!(!report.ok);
}
