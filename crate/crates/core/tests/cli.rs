use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn buddynet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_buddynet"))
        .args(args)
        .env_remove("BUDDYNET_THREADS")
        .output()
        .unwrap()
}

fn report(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn without_wall_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time");
    v
}

fn synth(dir: &Path, config: &str, seed: &str) -> (String, String, Value) {
    let cfg = dir.join("c.json");
    fs::write(&cfg, config).unwrap();
    let prefix = dir.join("t");
    let out = buddynet(&[
        "synth",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        seed,
        "--out-prefix",
        prefix.to_str().unwrap(),
    ]);
    let manifest = report(&out);
    let p = prefix.to_str().unwrap();
    (
        format!("{p}.backings.csv"),
        format!("{p}.projects.csv"),
        manifest,
    )
}

const SMALL: &str = r#"{"n_backers": 300, "n_projects": 30, "n_events": 1500, "buddy_boost": 0.5}"#;

#[test]
fn cug_report_has_p_value_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (b, p, _) = synth(dir.path(), SMALL, "3");
    let args = [
        "cug",
        "--backings",
        &b,
        "--projects",
        &p,
        "--trials",
        "100",
        "--seed",
        "7",
    ];
    let first = report(&buddynet(&args));
    let p_value = first["outputs"]["p_value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p_value));
    assert_eq!(
        first["outputs"]["simulated_ratios"]
            .as_array()
            .unwrap()
            .len(),
        100
    );
    assert_eq!(first["parameters"]["master_seed"], 7);
    assert_eq!(first["inputs"].as_array().unwrap().len(), 2);

    let mut parallel = args.to_vec();
    parallel.extend(["--parallel", "3"]);
    let second = report(&buddynet(&parallel));
    assert_eq!(without_wall_time(first), without_wall_time(second));
}

#[test]
fn generated_seed_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let (b, p, _) = synth(dir.path(), SMALL, "4");
    let out = buddynet(&["cug", "--backings", &b, "--projects", &p, "--trials", "5"]);
    let r = report(&out);
    let seed = r["parameters"]["master_seed"].as_u64().unwrap();
    assert_eq!(r["outputs"]["master_seed"].as_u64(), Some(seed));
    assert!(String::from_utf8_lossy(&out.stderr).contains(&seed.to_string()));
}

#[test]
fn stats_on_edge_free_file_counts_every_project_as_zero() {
    let dir = tempfile::tempdir().unwrap();
    let b = dir.path().join("b.csv");
    let p = dir.path().join("p.csv");
    fs::write(&b, "backer_id,project_id,timestamp\n").unwrap();
    fs::write(
        &p,
        "project_id,founder_id,deadline,start\np1,f,10,0\np2,g,20,5\np3,f,30,\n",
    )
    .unwrap();
    let r = report(&buddynet(&[
        "stats",
        "--backings",
        b.to_str().unwrap(),
        "--projects",
        p.to_str().unwrap(),
        "--side",
        "project",
    ]));
    let s = &r["outputs"][0];
    assert_eq!(s["zero_count"], 3);
    assert_eq!(s["count"], 3);
    assert_eq!(s["mode"], 0);
}

#[test]
fn stats_csv_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let (b, p, _) = synth(dir.path(), SMALL, "5");
    let hist = dir.path().join("h.csv");
    let out = buddynet(&[
        "stats",
        "--backings",
        &b,
        "--projects",
        &p,
        "--side",
        "backer",
        "--format",
        "csv",
        "--hist-out",
        hist.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("side,count,mean,std"));
    let total: u64 = fs::read_to_string(&hist)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 300);
}

#[test]
fn buddy_numerator_covers_planted_triples() {
    let dir = tempfile::tempdir().unwrap();
    let (b, p, manifest) = synth(dir.path(), SMALL, "1");
    let truth: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("t.truth.json")).unwrap())
            .unwrap();
    let triples: BTreeSet<(String, String, String)> = truth["planted"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            let s = |k: &str| c[k].as_str().unwrap().to_owned();
            (s("founder_x"), s("shared_project"), s("cobacker_w"))
        })
        .collect();
    assert!(!triples.is_empty());
    assert_eq!(
        manifest["outputs"]["planted"].as_u64().unwrap() as usize,
        truth["planted"].as_array().unwrap().len()
    );

    let cases = dir.path().join("cases.csv");
    let r = report(&buddynet(&[
        "buddy",
        "--backings",
        &b,
        "--projects",
        &p,
        "--cases-out",
        cases.to_str().unwrap(),
    ]));
    let numerator = r["outputs"]["numerator"].as_u64().unwrap();
    assert!(numerator as usize >= triples.len());
    let satisfied: BTreeSet<(String, String, String)> = fs::read_to_string(&cases)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect::<Vec<_>>())
        .filter(|f| f[5] == "true")
        .map(|f| (f[0].clone(), f[1].clone(), f[2].clone()))
        .collect();
    assert_eq!(satisfied.len() as u64, numerator);
    assert!(triples.is_subset(&satisfied));
}

#[test]
fn validate_reports_inconsistencies_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let b = dir.path().join("b.csv");
    let p = dir.path().join("p.csv");
    fs::write(&b, "backer_id,project_id,timestamp\na,p1,15\n").unwrap();
    fs::write(&p, "project_id,founder_id,deadline,start\np1,f,10,0\n").unwrap();
    let out = dir.path().join("v.json");
    let o = buddynet(&[
        "validate",
        "--backings",
        b.to_str().unwrap(),
        "--projects",
        p.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(r["outputs"]["ok"], false);
    assert_eq!(r["outputs"]["findings"][0]["class"], "edge_after_deadline");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(buddynet(&["cug", "--bogus"]).status.code(), Some(2));
    assert_eq!(buddynet(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        buddynet(&["stats", "--backings", "x.csv"]).status.code(),
        Some(2)
    );

    let missing = buddynet(&[
        "stats",
        "--backings",
        "/nonexistent/b.csv",
        "--projects",
        "/nonexistent/p.csv",
    ]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/b.csv"));

    let b = dir.path().join("b.csv");
    let p = dir.path().join("p.csv");
    fs::write(
        &b,
        "backer_id,project_id,timestamp\na,p1,3\na,p1,notatime\n",
    )
    .unwrap();
    fs::write(&p, "project_id,founder_id,deadline\np1,f,10\n").unwrap();
    let bad = buddynet(&[
        "buddy",
        "--backings",
        b.to_str().unwrap(),
        "--projects",
        p.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let err = String::from_utf8_lossy(&bad.stderr);
    assert!(err.contains(&format!("{}:3:", b.display())), "{err}");

    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"n_backers": "many"}"#).unwrap();
    let prefix = dir.path().join("t");
    let o = buddynet(&[
        "synth",
        "--config",
        cfg.to_str().unwrap(),
        "--out-prefix",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn undefined_observed_ratio_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let b = dir.path().join("b.csv");
    let p = dir.path().join("p.csv");
    fs::write(&b, "backer_id,project_id,timestamp\na,p1,3\n").unwrap();
    fs::write(&p, "project_id,founder_id,deadline\np1,f,10\n").unwrap();
    let o = buddynet(&[
        "cug",
        "--backings",
        b.to_str().unwrap(),
        "--projects",
        p.to_str().unwrap(),
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("undefined"));
}
