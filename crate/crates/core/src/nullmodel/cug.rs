//! Monte Carlo conditional uniform graph test.
//!
//! Trial `i` seeds a ChaCha8 generator with [`trial_seed`]`(master_seed, i)`,
//! rewires the observed graph once, and recomputes the buddy ratio. Trials
//! share nothing but the read-only observed graph, and results are collected
//! in trial order, so the output does not depend on the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rewire::{check_rewiring, NullModel};
use crate::graph::TemporalBipartiteGraph;
use crate::motif::{buddy_ratio, tally_buddy_cases, CensusOptions, MotifError, RatioMode};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial`: output number `trial + 1` of a SplitMix64 stream
/// started at `master_seed`.
pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(trial.wrapping_add(1))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CugConfig {
    pub trials: usize,
    pub master_seed: u64,
    pub ratio_mode: RatioMode,
    pub census: CensusOptions,
    /// Worker threads; `0` uses the rayon default.
    pub parallelism: usize,
}

impl Default for CugConfig {
    fn default() -> Self {
        CugConfig {
            trials: 100,
            master_seed: 0,
            ratio_mode: RatioMode::Pooled,
            census: CensusOptions::default(),
            parallelism: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum CugError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("observed statistic: {0}")]
    UndefinedObserved(#[from] MotifError),
    #[error("trial {trial}: rewiring invariant violated: {message}")]
    Invariant { trial: usize, message: String },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CugResult {
    pub observed_ratio: f64,
    pub ratio_mode: RatioMode,
    pub trials: usize,
    pub master_seed: u64,
    pub simulated_ratios: Vec<f64>,
    pub mean_simulated: f64,
    pub p_value: f64,
    /// Trials whose simulated census had no case; their ratio is recorded as 0.
    pub degenerate_trials: Vec<usize>,
    /// Observed edges whose target lifespan excludes the edge time; their
    /// candidate sets force-include the original target.
    pub forced_candidate_edges: usize,
}

/// Add-one Monte Carlo estimate `(1 + #{sim >= observed}) / (1 + n)`.
pub fn monte_carlo_p_value(observed: f64, simulated: &[f64]) -> f64 {
    let extreme = simulated.iter().filter(|&&r| r >= observed).count();
    (1 + extreme) as f64 / (1 + simulated.len()) as f64
}

/// Equal-width histogram over `[min, max]` of `values`; rows are
/// `(lower, upper, count)`. The last bin is closed on the right.
pub fn ratio_histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, u64)> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return vec![(lo, hi, values.len() as u64)];
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (lo + width * i as f64, lo + width * (i + 1) as f64, c))
        .collect()
}

struct TrialOutcome {
    ratio: f64,
    degenerate: bool,
}

fn run_trial(
    model: &NullModel<'_>,
    config: &CugConfig,
    trial: usize,
) -> Result<TrialOutcome, CugError> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.master_seed, trial as u64));
    let sim = model.rewire(&mut rng);
    check_rewiring(model.observed(), &sim)
        .map_err(|message| CugError::Invariant { trial, message })?;
    let tally = tally_buddy_cases(&sim.graph, config.census);
    Ok(match buddy_ratio(&tally, config.ratio_mode) {
        Ok(ratio) => TrialOutcome {
            ratio,
            degenerate: false,
        },
        Err(_) => TrialOutcome {
            ratio: 0.0,
            degenerate: true,
        },
    })
}

/// Runs the conditional uniform graph test.
///
/// Fails before any trial when the observed ratio is undefined.
pub fn cug_test(graph: &TemporalBipartiteGraph, config: &CugConfig) -> Result<CugResult, CugError> {
    if config.trials == 0 {
        return Err(CugError::NoTrials);
    }
    let observed = buddy_ratio(&tally_buddy_cases(graph, config.census), config.ratio_mode)?;
    let model = NullModel::new(graph);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| CugError::ThreadPool(e.to_string()))?;
    let outcomes: Vec<TrialOutcome> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|i| run_trial(&model, config, i))
            .collect::<Result<_, _>>()
    })?;

    let simulated_ratios: Vec<f64> = outcomes.iter().map(|o| o.ratio).collect();
    let degenerate_trials = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.degenerate)
        .map(|(i, _)| i)
        .collect();
    let forced_candidate_edges = graph
        .edges()
        .iter()
        .filter(|e| !graph.project(e.project).is_live_at(e.time))
        .count();

    Ok(CugResult {
        observed_ratio: observed,
        ratio_mode: config.ratio_mode,
        trials: config.trials,
        master_seed: config.master_seed,
        mean_simulated: simulated_ratios.iter().sum::<f64>() / simulated_ratios.len() as f64,
        p_value: monte_carlo_p_value(observed, &simulated_ratios),
        simulated_ratios,
        degenerate_trials,
        forced_candidate_edges,
    })
}
