mod common;

use buddynet::graph::{BackingRow, ProjectSpec};
use buddynet::nullmodel::{check_rewiring, rewire_graph_by_candidate_sets};
use buddynet::*;
use common::random_small;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn candidate_set_matches_linear_scan(seed in any::<u64>()) {
        let (projects, rows) = random_small(seed, 10, 30, 60);
        let g = TemporalBipartiteGraph::from_parts(projects, rows).unwrap();
        for e in g.edges() {
            let cs = candidate_set(&g, e);
            let mut scan: Vec<ProjectIdx> = g
                .project_indices()
                .filter(|&p| g.project(p).start <= e.time && e.time <= g.project(p).deadline)
                .collect();
            let original_live = scan.contains(&e.project);
            if !original_live {
                scan.push(e.project);
            }
            prop_assert_eq!(&cs.members, &scan);
            prop_assert_eq!(cs.forced, (!original_live).then_some(e.project));
            let weights: Vec<u64> = scan.iter().map(|&p| g.in_degree(p) as u64).collect();
            prop_assert_eq!(&cs.weights, &weights);
            prop_assert_eq!(cs.total_weight, weights.iter().sum::<u64>());
        }
    }

    #[test]
    fn sweep_and_reference_routes_agree(seed in any::<u64>(), rng_seed in any::<u64>()) {
        let (projects, rows) = random_small(seed, 10, 8, 60);
        let g = TemporalBipartiteGraph::from_parts(projects, rows).unwrap();
        let a = rewire_graph(&g, &mut ChaCha8Rng::seed_from_u64(rng_seed));
        let b = rewire_graph_by_candidate_sets(&g, &mut ChaCha8Rng::seed_from_u64(rng_seed));
        prop_assert_eq!(a.graph.edges(), b.graph.edges());
        prop_assert_eq!(&a.forced_edges, &b.forced_edges);
        prop_assert!(check_rewiring(&g, &a).is_ok());
    }
}

#[test]
fn single_live_candidate_leaves_the_graph_unchanged() {
    let g = TemporalBipartiteGraph::from_parts(
        vec![
            ProjectSpec {
                id: "p".into(),
                founder: "f".into(),
                deadline: Timestamp(10),
                start: Some(Timestamp(0)),
            },
            ProjectSpec {
                id: "q".into(),
                founder: "g".into(),
                deadline: Timestamp(30),
                start: Some(Timestamp(20)),
            },
        ],
        vec![BackingRow {
            backer: "a".into(),
            project: "p".into(),
            time: Timestamp(5),
        }],
    )
    .unwrap();
    for seed in 0..20 {
        let sim = rewire_graph(&g, &mut ChaCha8Rng::seed_from_u64(seed));
        assert_eq!(sim.graph.edges(), g.edges());
        assert!(sim.forced_edges.is_empty());
    }
}

#[test]
fn zero_numerator_gives_p_value_one() {
    // x backs only q; the single co-backer never returns to x's project
    let g = TemporalBipartiteGraph::from_parts(
        vec![
            ProjectSpec {
                id: "px".into(),
                founder: "x".into(),
                deadline: Timestamp(10),
                start: Some(Timestamp(0)),
            },
            ProjectSpec {
                id: "q".into(),
                founder: "z".into(),
                deadline: Timestamp(10),
                start: Some(Timestamp(0)),
            },
        ],
        vec![
            BackingRow {
                backer: "x".into(),
                project: "q".into(),
                time: Timestamp(1),
            },
            BackingRow {
                backer: "w".into(),
                project: "q".into(),
                time: Timestamp(2),
            },
        ],
    )
    .unwrap();
    let result = cug_test(
        &g,
        &CugConfig {
            trials: 30,
            master_seed: 1,
            ..CugConfig::default()
        },
    )
    .unwrap();
    assert_eq!(result.observed_ratio, 0.0);
    assert_eq!(result.p_value, 1.0);
}
