//! Buddy-relation motif detection on timestamped backer → project networks.
//!
//! A *buddy relation* is the ordered triad where founder `x` and backer `w`
//! both back some project `P_z` (founded by a third user), and `w` later backs
//! a project `P_x` founded by `x`. The crate counts these cases, reports the
//! buddy ratio, and tests it against a conditional uniform graph null model
//! that keeps backer out-degrees fixed, restricts every rewired edge to the
//! projects live at its timestamp and draws targets in proportion to their
//! observed popularity.
//!
//! Layout:
//!
//! * [`graph`]: data model, CSV ingestion, lifespan index, validation.
//! * [`stats`]: degree summaries and histograms.
//! * [`motif`]: buddy-case enumeration and ratios.
//! * [`nullmodel`]: candidate sets, categorical rewiring, Monte Carlo test.
//! * [`synth`]: synthetic datasets with a planted buddy effect.
//! * [`cli`]: the `buddynet` command-line driver.

pub mod cli;
pub mod graph;
pub mod motif;
pub mod nullmodel;
pub mod stats;
pub mod synth;

pub use graph::{
    load_graph, load_graph_files, BackerId, Backing, GraphError, ProjectId, ProjectIdx,
    ProjectRecord, TemporalBipartiteGraph, Timestamp, UserIdx,
};
pub use motif::{
    buddy_ratio, cobacker_stats, enumerate_buddy_cases, tally_buddy_cases, BuddyCase, BuddyCensus,
    BuddyTally, CensusOptions, MotifError, RatioMode,
};
pub use nullmodel::{
    candidate_set, choice_distribution, cug_test, rewire_graph, CandidateSet, ChoiceDistribution,
    CugConfig, CugError, CugResult, NullModel,
};
pub use stats::{degree_histogram, degree_summary, DegreeSide, DegreeSummary, StatsError};
pub use synth::{generate, GroundTruthLog, SynthConfig, SynthError};
