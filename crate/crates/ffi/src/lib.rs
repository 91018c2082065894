//! C ABI for `buddynet`.
//!
//! Graphs and CUG results are opaque heap handles released with their
//! `*_free` function. Every fallible call returns a [`BuddynetStatus`]; on
//! failure a message is kept per thread and can be read with
//! [`buddynet_last_error_message`]. Panics never cross the boundary; they
//! surface as [`BuddynetStatus::Internal`].
//!
//! The header `include/buddynet.h` is generated by cbindgen at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use buddynet::graph::{load_graph, load_graph_files, validate, GraphError};
use buddynet::motif::{tally_buddy_cases, CensusOptions, RatioMode};
use buddynet::nullmodel::{cug_test, ChoiceDistribution, CugConfig, CugError, CugResult};
use buddynet::stats::{degree_summary, DegreeSide};
use buddynet::TemporalBipartiteGraph;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuddynetStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    UndefinedRatio = 5,
    InvalidArgument = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuddynetSide {
    ProjectIn = 0,
    BackerOut = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuddynetRatioMode {
    Pooled = 0,
    PerPairMean = 1,
}

/// Opaque graph handle.
pub struct BuddynetGraph {
    inner: TemporalBipartiteGraph,
}

/// Opaque CUG result handle.
pub struct BuddynetCugResult {
    inner: CugResult,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BuddynetGraphCounts {
    pub users: usize,
    pub backers: usize,
    pub projects: usize,
    pub edges: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BuddynetDegreeSummary {
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

/// Ratios and means are NaN when undefined.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BuddynetCensusSummary {
    pub denominator: u64,
    pub numerator: u64,
    pub pooled_ratio: f64,
    pub per_pair_mean: f64,
    pub mean_cobackers: f64,
    pub mean_satisfied: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BuddynetCugOptions {
    pub trials: usize,
    pub master_seed: u64,
    pub ratio_mode: BuddynetRatioMode,
    pub exclude_founder_w: bool,
    /// 0 = all cores.
    pub parallelism: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BuddynetCugSummary {
    pub observed_ratio: f64,
    pub p_value: f64,
    pub mean_simulated: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub degenerate_trials: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

type Failure = (BuddynetStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BuddynetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BuddynetStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            set_last_error(format!("internal error: {msg}"));
            BuddynetStatus::Internal
        }
    }
}

fn graph_failure(e: GraphError) -> Failure {
    let status = match e {
        GraphError::Io { .. } => BuddynetStatus::Io,
        _ => BuddynetStatus::Parse,
    };
    (status, e.to_string())
}

fn null(what: &str) -> Failure {
    (BuddynetStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (BuddynetStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

unsafe fn bytes<'a>(p: *const u8, len: usize, what: &str) -> Result<&'a [u8], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn graph_ref<'a>(g: *const BuddynetGraph) -> Result<&'a TemporalBipartiteGraph, Failure> {
    g.as_ref().map(|g| &g.inner).ok_or_else(|| null("graph"))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn buddynet_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the buffer size needed for the
/// whole message including the NUL, or 0 when there is no message.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn buddynet_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = (bytes.len() - 1).min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Loads a graph from `backings.csv` and `projects.csv` paths.
///
/// # Safety
/// Both paths must be valid NUL-terminated strings; `out` must be a valid
/// pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn buddynet_graph_load_files(
    backings_path: *const c_char,
    projects_path: *const c_char,
    out: *mut *mut BuddynetGraph,
) -> BuddynetStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let b = c_str(backings_path, "backings_path")?;
        let p = c_str(projects_path, "projects_path")?;
        let inner = load_graph_files(b, p).map_err(graph_failure)?;
        *out = Box::into_raw(Box::new(BuddynetGraph { inner }));
        Ok(())
    })
}

/// Loads a graph from in-memory CSV contents.
///
/// # Safety
/// Each buffer must be valid for its length (or the length must be 0);
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn buddynet_graph_load_buffers(
    backings: *const u8,
    backings_len: usize,
    projects: *const u8,
    projects_len: usize,
    out: *mut *mut BuddynetGraph,
) -> BuddynetStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let b = bytes(backings, backings_len, "backings")?;
        let p = bytes(projects, projects_len, "projects")?;
        let inner = load_graph(b, p).map_err(graph_failure)?;
        *out = Box::into_raw(Box::new(BuddynetGraph { inner }));
        Ok(())
    })
}

/// # Safety
/// `graph` must be null or a handle from a `buddynet_graph_load_*` call that
/// has not been freed.
#[no_mangle]
pub unsafe extern "C" fn buddynet_graph_free(graph: *mut BuddynetGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn buddynet_graph_counts(
    graph: *const BuddynetGraph,
    out: *mut BuddynetGraphCounts,
) -> BuddynetStatus {
    guard(|| {
        let g = graph_ref(graph)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = BuddynetGraphCounts {
            users: g.user_count(),
            backers: g.backer_count(),
            projects: g.project_count(),
            edges: g.edge_count(),
        };
        Ok(())
    })
}

/// # Safety
/// `graph` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn buddynet_degree_summary(
    graph: *const BuddynetGraph,
    side: BuddynetSide,
    out: *mut BuddynetDegreeSummary,
) -> BuddynetStatus {
    guard(|| {
        let g = graph_ref(graph)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let side = match side {
            BuddynetSide::ProjectIn => DegreeSide::ProjectIn,
            BuddynetSide::BackerOut => DegreeSide::BackerOut,
        };
        let s = degree_summary(g, side)
            .map_err(|e| (BuddynetStatus::InvalidArgument, e.to_string()))?;
        *out = BuddynetDegreeSummary {
            count: s.count,
            mean: s.mean,
            std: s.std,
            min: s.min,
            q25: s.q25,
            median: s.median,
            q75: s.q75,
            max: s.max,
            mode: s.mode,
            zero_count: s.zero_count,
        };
        Ok(())
    })
}

/// # Safety
/// `graph` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn buddynet_buddy_census(
    graph: *const BuddynetGraph,
    exclude_founder_w: bool,
    out: *mut BuddynetCensusSummary,
) -> BuddynetStatus {
    guard(|| {
        let g = graph_ref(graph)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let tally = tally_buddy_cases(g, CensusOptions { exclude_founder_w });
        let (mean_cobackers, mean_satisfied) =
            tally.cobacker_stats().unwrap_or((f64::NAN, f64::NAN));
        *out = BuddynetCensusSummary {
            denominator: tally.denominator,
            numerator: tally.numerator,
            pooled_ratio: tally.ratio(RatioMode::Pooled).unwrap_or(f64::NAN),
            per_pair_mean: tally.ratio(RatioMode::PerPairMean).unwrap_or(f64::NAN),
            mean_cobackers,
            mean_satisfied,
        };
        Ok(())
    })
}

/// Runs the conditional uniform graph test.
///
/// # Safety
/// `graph` must be a live handle; `options` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn buddynet_cug_test(
    graph: *const BuddynetGraph,
    options: *const BuddynetCugOptions,
    out: *mut *mut BuddynetCugResult,
) -> BuddynetStatus {
    guard(|| {
        let g = graph_ref(graph)?;
        let opts = options.as_ref().ok_or_else(|| null("options"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let config = CugConfig {
            trials: opts.trials,
            master_seed: opts.master_seed,
            ratio_mode: match opts.ratio_mode {
                BuddynetRatioMode::Pooled => RatioMode::Pooled,
                BuddynetRatioMode::PerPairMean => RatioMode::PerPairMean,
            },
            census: CensusOptions {
                exclude_founder_w: opts.exclude_founder_w,
            },
            parallelism: opts.parallelism,
        };
        let inner = cug_test(g, &config).map_err(|e| {
            let status = match e {
                CugError::NoTrials => BuddynetStatus::InvalidArgument,
                CugError::UndefinedObserved(_) => BuddynetStatus::UndefinedRatio,
                CugError::Invariant { .. } | CugError::ThreadPool(_) => BuddynetStatus::Internal,
            };
            (status, e.to_string())
        })?;
        *out = Box::into_raw(Box::new(BuddynetCugResult { inner }));
        Ok(())
    })
}

/// # Safety
/// `result` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn buddynet_cug_result_summary(
    result: *const BuddynetCugResult,
    out: *mut BuddynetCugSummary,
) -> BuddynetStatus {
    guard(|| {
        let r = &result.as_ref().ok_or_else(|| null("result"))?.inner;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = BuddynetCugSummary {
            observed_ratio: r.observed_ratio,
            p_value: r.p_value,
            mean_simulated: r.mean_simulated,
            trials: r.trials,
            master_seed: r.master_seed,
            degenerate_trials: r.degenerate_trials.len(),
        };
        Ok(())
    })
}

/// Copies the per-trial simulated ratios (in trial order) into `buf`.
/// `*needed` receives the trial count. Returns `BufferTooSmall` without
/// copying when `len` is smaller than that.
///
/// # Safety
/// `result` must be a live handle; `buf` must point to `len` writable
/// doubles (or be null with `len == 0`); `needed` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn buddynet_cug_result_simulated_ratios(
    result: *const BuddynetCugResult,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> BuddynetStatus {
    guard(|| {
        let r = &result.as_ref().ok_or_else(|| null("result"))?.inner;
        let needed = needed.as_mut().ok_or_else(|| null("needed"))?;
        let ratios = &r.simulated_ratios;
        *needed = ratios.len();
        if len < ratios.len() {
            return Err((
                BuddynetStatus::BufferTooSmall,
                format!("need {} doubles, got {len}", ratios.len()),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(ratios.as_ptr(), buf, ratios.len());
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a handle from [`buddynet_cug_test`] that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn buddynet_cug_result_free(result: *mut BuddynetCugResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Full CUG result as a JSON string; free it with [`buddynet_string_free`].
///
/// # Safety
/// `result` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn buddynet_cug_result_json(
    result: *const BuddynetCugResult,
    out: *mut *mut c_char,
) -> BuddynetStatus {
    guard(|| {
        let r = &result.as_ref().ok_or_else(|| null("result"))?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = to_c_json(r)?;
        Ok(())
    })
}

/// Validation report as JSON (`{findings: [...], ok}`); free it with
/// [`buddynet_string_free`].
///
/// # Safety
/// `graph` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn buddynet_validate_json(
    graph: *const BuddynetGraph,
    out: *mut *mut c_char,
) -> BuddynetStatus {
    guard(|| {
        let g = graph_ref(graph)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = to_c_json(&validate(g))?;
        Ok(())
    })
}

fn to_c_json(value: &impl serde::Serialize) -> Result<*mut c_char, Failure> {
    let s = serde_json::to_string(value).map_err(|e| (BuddynetStatus::Internal, e.to_string()))?;
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| (BuddynetStatus::Internal, e.to_string()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn buddynet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Rewiring probabilities `w_k / Σ w` for `n` candidate weights.
///
/// # Safety
/// `weights` and `out` must each point to `n` elements.
#[no_mangle]
pub unsafe extern "C" fn buddynet_choice_probabilities(
    weights: *const u64,
    n: usize,
    out: *mut f64,
) -> BuddynetStatus {
    guard(|| {
        if n == 0 {
            return Err((BuddynetStatus::InvalidArgument, "no candidates".into()));
        }
        if weights.is_null() || out.is_null() {
            return Err(null("weights/out"));
        }
        let w = std::slice::from_raw_parts(weights, n);
        let d = ChoiceDistribution::from_weights(w).ok_or_else(|| {
            (
                BuddynetStatus::InvalidArgument,
                "weights sum to zero".to_owned(),
            )
        })?;
        let out = std::slice::from_raw_parts_mut(out, n);
        out.copy_from_slice(&d.probabilities());
        Ok(())
    })
}
