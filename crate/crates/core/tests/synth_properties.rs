use buddynet::*;

fn config(beta: f64, seed: u64) -> SynthConfig {
    SynthConfig {
        n_backers: 2000,
        n_projects: 100,
        n_events: 10_000,
        buddy_boost: beta,
        seed,
        ..SynthConfig::default()
    }
}

fn skewness(values: &[u64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<u64>() as f64 / n;
    let m2 = values
        .iter()
        .map(|&v| (v as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    let m3 = values
        .iter()
        .map(|&v| (v as f64 - mean).powi(3))
        .sum::<f64>()
        / n;
    m3 / m2.powf(1.5)
}

#[test]
fn planted_effect_raises_the_mean_ratio() {
    let mean_ratio = |beta: f64| {
        (1..=20u64)
            .map(|seed| {
                let (g, _) = generate(&config(beta, seed)).unwrap();
                tally_buddy_cases(&g, CensusOptions::default())
                    .ratio(RatioMode::Pooled)
                    .unwrap()
            })
            .sum::<f64>()
            / 20.0
    };
    let (null, planted) = (mean_ratio(0.0), mean_ratio(0.5));
    assert!(
        planted > null,
        "beta 0.5 mean {planted} vs beta 0 mean {null}"
    );
}

#[test]
fn degree_distributions_are_right_skewed() {
    for seed in 1..=5 {
        let (g, _) = generate(&config(0.0, seed)).unwrap();
        for side in [DegreeSide::ProjectIn, DegreeSide::BackerOut] {
            let s = skewness(&stats::degrees(&g, side));
            assert!(s > 0.0, "seed {seed} {side:?}: skewness {s}");
        }
    }
}

#[test]
fn every_event_becomes_an_edge_inside_a_lifespan() {
    let (g, truth) = generate(&config(0.5, 8)).unwrap();
    assert_eq!(truth.skipped_events, 0);
    assert_eq!(g.edge_count(), 10_000);
    assert!(g
        .edges()
        .iter()
        .all(|e| g.project(e.project).is_live_at(e.time)));
    assert_eq!(g.backer_count(), 2000);
}

#[test]
fn truth_log_round_trips_through_json() {
    let (_, truth) = generate(&config(0.5, 2)).unwrap();
    let text = serde_json::to_string(&truth).unwrap();
    let back: GroundTruthLog = serde_json::from_str(&text).unwrap();
    assert_eq!(back, truth);
}
