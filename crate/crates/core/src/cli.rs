//! `buddynet` command-line driver.
//!
//! Exit codes: 0 success, 1 input or parse error, 2 usage error. Statistical
//! verdicts never affect the exit code.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::graph::{
    self, load_graph_files, write_backings, write_projects, TemporalBipartiteGraph,
};
use crate::motif::{self, CensusOptions, RatioMode};
use crate::nullmodel::{self, CugConfig};
use crate::stats::{self, DegreeSide};
use crate::synth::{self, SynthConfig};

#[derive(Debug, Parser)]
#[command(
    name = "buddynet",
    version,
    about = "Buddy-relation census and CUG testing for backing networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a dataset for lifespan violations and other findings.
    Validate(InputArgs),
    /// Degree summaries and histograms.
    Stats(StatsArgs),
    /// Buddy-relation census of the observed graph.
    Buddy(BuddyArgs),
    /// Conditional uniform graph test of the buddy ratio.
    Cug(CugArgs),
    /// Generate a synthetic dataset with a planted buddy effect.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    #[arg(long)]
    backings: PathBuf,
    #[arg(long)]
    projects: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Project,
    Backer,
}

impl From<SideArg> for DegreeSide {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Project => DegreeSide::ProjectIn,
            SideArg::Backer => DegreeSide::BackerOut,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RatioModeArg {
    Pooled,
    Mean,
}

impl From<RatioModeArg> for RatioMode {
    fn from(m: RatioModeArg) -> Self {
        match m {
            RatioModeArg::Pooled => RatioMode::Pooled,
            RatioModeArg::Mean => RatioMode::PerPairMean,
        }
    }
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Side to summarize; both when omitted.
    #[arg(long, value_enum)]
    side: Option<SideArg>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Two-column `degree,count` CSV (requires --side).
    #[arg(long, requires = "side")]
    hist_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BuddyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    exclude_founder_w: bool,
    /// Per-case CSV dump.
    #[arg(long)]
    cases_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CugArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Master seed; a random one is generated and reported when omitted.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "pooled")]
    ratio_mode: RatioModeArg,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "BUDDYNET_THREADS", default_value_t = 0)]
    parallel: usize,
    #[arg(long)]
    exclude_founder_w: bool,
    /// CSV histogram of the simulated ratios.
    #[arg(long)]
    hist_out: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    hist_bins: usize,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// JSON config; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_prefix: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Self-describing output of one invocation.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub parameters: Value,
    pub outputs: Value,
    pub wall_time: f64,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn digest(path: &Path) -> Result<InputDigest, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

fn load(input: &InputArgs) -> Result<(TemporalBipartiteGraph, Vec<InputDigest>), Failure> {
    let digests = vec![digest(&input.backings)?, digest(&input.projects)?];
    let graph = load_graph_files(&input.backings, &input.projects)?;
    Ok((graph, digests))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, body: &str) -> Result<(), Failure> {
    match out {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(body.as_bytes())?;
            w.flush()?;
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
        }
    }
    Ok(())
}

fn json_report(report: &RunReport) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

fn opt_f64(r: Result<f64, motif::MotifError>) -> Value {
    r.map_or(Value::Null, |v| json!(v))
}

fn run_validate(args: InputArgs, started: Instant) -> Result<(), Failure> {
    let (graph, inputs) = load(&args)?;
    let report = graph::validate(&graph);
    let run = RunReport {
        command: "validate".into(),
        inputs,
        parameters: json!({}),
        outputs: serde_json::to_value(&report)?,
        wall_time: started.elapsed().as_secs_f64(),
    };
    emit(args.out.as_deref(), &json_report(&run)?)
}

fn summary_csv(summaries: &[stats::DegreeSummary]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in summaries {
        w.serialize(s)?;
    }
    Ok(String::from_utf8(
        w.into_inner().map_err(|e| Failure(e.to_string()))?,
    )?)
}

fn run_stats(args: StatsArgs, started: Instant) -> Result<(), Failure> {
    let (graph, inputs) = load(&args.input)?;
    let sides: Vec<DegreeSide> = match args.side {
        Some(s) => vec![s.into()],
        None => vec![DegreeSide::ProjectIn, DegreeSide::BackerOut],
    };
    let summaries = sides
        .iter()
        .map(|&s| stats::degree_summary(&graph, s))
        .collect::<Result<Vec<_>, _>>()?;
    if let (Some(path), Some(side)) = (&args.hist_out, args.side) {
        let mut w = csv::Writer::from_writer(create(path)?);
        w.write_record(["degree", "count"])?;
        for (d, c) in stats::degree_histogram(&graph, side.into())? {
            w.write_record([d.to_string(), c.to_string()])?;
        }
        w.flush()?;
    }
    let body = match args.format {
        Format::Csv => summary_csv(&summaries)?,
        Format::Json => json_report(&RunReport {
            command: "stats".into(),
            inputs,
            parameters: json!({ "sides": sides }),
            outputs: serde_json::to_value(&summaries)?,
            wall_time: started.elapsed().as_secs_f64(),
        })?,
    };
    emit(args.input.out.as_deref(), &body)
}

fn run_buddy(args: BuddyArgs, started: Instant) -> Result<(), Failure> {
    let (graph, inputs) = load(&args.input)?;
    let opts = CensusOptions {
        exclude_founder_w: args.exclude_founder_w,
    };
    let census = motif::enumerate_buddy_cases(&graph, opts);
    let tally = &census.tally;
    let means = motif::cobacker_stats(tally).ok();
    if let Some(path) = &args.cases_out {
        let mut w = csv::Writer::from_writer(create(path)?);
        w.write_record([
            "founder_x",
            "shared_project",
            "cobacker_w",
            "t_x",
            "t_w",
            "satisfied",
            "witness_project",
            "t_back",
        ])?;
        for c in &census.cases {
            w.write_record([
                graph.user_id(c.founder_x).as_str(),
                graph.project(c.shared_project).id.as_str(),
                graph.user_id(c.cobacker_w).as_str(),
                &c.t_x.to_string(),
                &c.t_w.to_string(),
                if c.satisfied { "true" } else { "false" },
                c.witness_project
                    .map_or("", |p| graph.project(p).id.as_str()),
                &c.t_back.map_or(String::new(), |t| t.to_string()),
            ])?;
        }
        w.flush()?;
    }
    let outputs = json!({
        "denominator": tally.denominator,
        "numerator": tally.numerator,
        "pooled_ratio": opt_f64(tally.ratio(RatioMode::Pooled)),
        "per_pair_mean": opt_f64(tally.ratio(RatioMode::PerPairMean)),
        "mean_cobackers": means.map(|m| m.0),
        "mean_satisfied": means.map(|m| m.1),
        "pairs": tally.pairs.len(),
    });
    let run = RunReport {
        command: "buddy".into(),
        inputs,
        parameters: serde_json::to_value(opts)?,
        outputs,
        wall_time: started.elapsed().as_secs_f64(),
    };
    emit(args.input.out.as_deref(), &json_report(&run)?)
}

fn run_cug(args: CugArgs, started: Instant) -> Result<(), Failure> {
    let (graph, inputs) = load(&args.input)?;
    let master_seed = args.seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("buddynet: no --seed given, using generated seed {s}");
        s
    });
    let config = CugConfig {
        trials: args.trials,
        master_seed,
        ratio_mode: args.ratio_mode.into(),
        census: CensusOptions {
            exclude_founder_w: args.exclude_founder_w,
        },
        parallelism: args.parallel,
    };
    let result = nullmodel::cug_test(&graph, &config)?;
    if let Some(path) = &args.hist_out {
        let mut w = csv::Writer::from_writer(create(path)?);
        w.write_record(["bin_lower", "bin_upper", "count"])?;
        for (lo, hi, c) in nullmodel::ratio_histogram(&result.simulated_ratios, args.hist_bins) {
            w.write_record([lo.to_string(), hi.to_string(), c.to_string()])?;
        }
        w.flush()?;
    }
    // Worker count does not change results, so it is not a parameter.
    let parameters = json!({
        "trials": config.trials,
        "master_seed": config.master_seed,
        "ratio_mode": config.ratio_mode,
        "census": config.census,
        "rng": "ChaCha8, per-trial seed = SplitMix64(master_seed, trial)",
    });
    let run = RunReport {
        command: "cug".into(),
        inputs,
        parameters,
        outputs: serde_json::to_value(&result)?,
        wall_time: started.elapsed().as_secs_f64(),
    };
    emit(args.input.out.as_deref(), &json_report(&run)?)
}

fn run_synth(args: SynthArgs, started: Instant) -> Result<(), Failure> {
    let (mut config, inputs) = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            let config: SynthConfig = serde_json::from_str(&text)
                .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            (config, vec![digest(path)?])
        }
        None => (SynthConfig::default(), Vec::new()),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let (graph, truth) = synth::generate(&config)?;

    let prefix = args.out_prefix.display().to_string();
    let backings = PathBuf::from(format!("{prefix}.backings.csv"));
    let projects = PathBuf::from(format!("{prefix}.projects.csv"));
    let truth_path = PathBuf::from(format!("{prefix}.truth.json"));
    write_backings(&graph, create(&backings)?)?;
    write_projects(&graph, create(&projects)?)?;
    let mut w = create(&truth_path)?;
    serde_json::to_writer_pretty(&mut w, &truth)?;
    w.flush()?;

    let run = RunReport {
        command: "synth".into(),
        inputs,
        parameters: serde_json::to_value(&config)?,
        outputs: json!({
            "backings": backings.display().to_string(),
            "projects": projects.display().to_string(),
            "truth": truth_path.display().to_string(),
            "edges": graph.edge_count(),
            "backers": graph.backer_count(),
            "projects_count": graph.project_count(),
            "planted": truth.planted.len(),
            "skipped_events": truth.skipped_events,
        }),
        wall_time: started.elapsed().as_secs_f64(),
    };
    emit(args.out.as_deref(), &json_report(&run)?)
}

/// Parses `argv` (including the program name) and runs one subcommand.
/// Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let started = Instant::now();
    let outcome = match cli.command {
        Command::Validate(a) => run_validate(a, started),
        Command::Stats(a) => run_stats(a, started),
        Command::Buddy(a) => run_buddy(a, started),
        Command::Cug(a) => run_cug(a, started),
        Command::Synth(a) => run_synth(a, started),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure(msg)) => {
            eprintln!("buddynet: {msg}");
            1
        }
    }
}
