//! End-to-end tests for the binary: exit codes, report shape,
//! determinism, caching, and the config-file workflow.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chabauty"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

/// Report text with the timing block blanked, for byte comparisons.
fn strip_timing(raw: &[u8]) -> String {
    let text = String::from_utf8(raw.to_vec()).unwrap();
    text.lines()
        .filter(|l| !l.contains("\"elapsed_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn no_subgroup_exit_codes() {
    let pass = run(&["verify", "no-subgroup", "--field", "Q", "--q", "5", "--alpha", "2"]);
    assert_eq!(pass.status.code(), Some(0));
    let report = stdout_json(&pass);
    assert_eq!(report["results"]["verdict"], "NoSubgroupObstruction");
    assert_eq!(report["results"]["classes"][0]["margin"], 2);

    let fail = run(&["verify", "no-subgroup", "--field", "Q", "--q", "3", "--alpha", "2"]);
    assert_eq!(fail.status.code(), Some(1));
    let report = stdout_json(&fail);
    let verdict = report["results"]["verdict"].as_str().unwrap();
    assert!(verdict.contains("Inconclusive"), "{verdict}");
}

#[test]
fn errors_exit_with_two() {
    let missing = run(&["field", "--poly", "1,0,1", "--config", "/nonexistent/x.cfg"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&missing.stderr).is_empty());

    let usage = run(&["no-such-subcommand"]);
    assert_eq!(usage.status.code(), Some(2));

    let composite_q = run(&["verify", "no-subgroup", "--q", "9", "--alpha", "2"]);
    assert_eq!(composite_q.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_modulo_timing() {
    let args = [
        "jacobian",
        "--field",
        "2,0,0,1",
        "--s0",
        "5,7",
        "--divisor=-2,0,0,1",
        "--include-infinity",
        "--no-cache",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(strip_timing(&a.stdout), strip_timing(&b.stdout));
    let report = stdout_json(&a);
    let profile = &report["results"]["profiles"][0];
    assert_eq!(profile["dim"], 3);
    assert!(profile["orbits"].as_array().unwrap().len() == 3);
    for orbit in profile["orbits"].as_array().unwrap() {
        assert!(orbit["residue_signature"].as_array().unwrap().len() == 2);
        assert!(orbit.get("places_above_S").is_some());
    }
}

#[test]
fn cache_reuses_corrupts_and_heals() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = |cache: &str| {
        vec![
            "jacobian".to_string(),
            "--field".into(),
            "2,0,0,1".into(),
            "--s0".into(),
            "5,7".into(),
            "--divisor=-2,0,0,1".into(),
            "--include-infinity".into(),
            "--cache-dir".into(),
            cache.into(),
        ]
    };

    let first = bin().args(args(cache)).output().unwrap();
    assert_eq!(first.status.code(), Some(0));
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1, "one cache entry after one instance");
    let entry = entries[0].as_ref().unwrap().path();

    let second = bin().args(args(cache)).output().unwrap();
    assert_eq!(strip_timing(&first.stdout), strip_timing(&second.stdout));

    // corrupt the entry: the run must warn, recompute, and heal the file
    std::fs::write(&entry, "{ not json").unwrap();
    let healed = bin().args(args(cache)).output().unwrap();
    assert_eq!(healed.status.code(), Some(0));
    let report = stdout_json(&healed);
    assert!(
        report["warnings"]
            .as_array()
            .unwrap()
            .iter()
            .any(|w| w.as_str().unwrap().contains("corrupt")),
        "corruption surfaces as a warning"
    );
    assert_eq!(
        report["results"],
        stdout_json(&first)["results"],
        "recomputation matches the original"
    );
    let back: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&entry).unwrap()).unwrap();
    assert!(back.get("check").is_some() && back.get("payload").is_some());

    // disabling the cache changes nothing but the cache traffic
    let mut no_cache = args(cache);
    no_cache.push("--no-cache".into());
    let plain = bin().args(&no_cache).output().unwrap();
    assert_eq!(stdout_json(&plain)["results"], stdout_json(&first)["results"]);
}

fn write_table1_config(dir: &Path) -> String {
    let path = dir.join("table1.cfg");
    std::fs::write(
        &path,
        "[member]\n\
         poly = -2, 0, 1\n\
         label = Q(sqrt2)\n\
         \n\
         [member]\n\
         poly = -2, 0, 0, 0, 1\n\
         label = Q(4rt2)\n\
         embed = 0, 0, 1\n\
         \n\
         [curve]\n\
         divisor = 0, 2, -3, 1\n\
         infinity = true\n\
         label = four rational punctures\n\
         \n\
         [bcp]\n\
         depth = 4\n",
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn bcp_config_file_runs_the_tower_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_table1_config(dir.path());

    let out = run(&["bcp", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["results"]["count"], 10);
    assert_eq!(report["results"]["grouping_by_minimal_n"], "1/2/4/2/1");
    let classes = report["results"]["classes"].as_array().unwrap();
    assert_eq!(classes[0]["minimal_n"], 0);
    assert_eq!(classes[0]["dim"], 12);
    assert_eq!(classes[0]["rank"], 6);

    let table = run(&["bcp", "--config", &cfg, "--format", "table"]);
    let text = String::from_utf8(table.stdout).unwrap();
    assert!(text.contains("classes: 10"));
    assert!(text.contains("minimal_n"));

    let csv = run(&["bcp", "--config", &cfg, "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("minimal_n,class,dim,rank"));
    assert_eq!(lines.count(), 10, "one row per class");
}

#[test]
fn sieve_only_report_shape() {
    let out = run(&["sunit", "--sieve-only"]);
    assert_eq!(out.status.code(), Some(0), "empty S0 sieve is decisive");
    let report = stdout_json(&out);
    let r = &report["results"];
    assert_eq!(r["decisive"], true);
    assert_eq!(r["confirmed"].as_array().unwrap().len(), 0);
    assert_eq!(r["surviving_unconfirmed"], 0);
    for key in ["field", "s0", "p", "n", "box_radius", "generators"] {
        assert!(r["parameters"].get(key).is_some(), "parameters.{key}");
    }

    let undecided = run(&["sunit", "--sieve-only", "--s0", "2", "--n", "8"]);
    assert_eq!(undecided.status.code(), Some(1));
    let report = stdout_json(&undecided);
    assert_eq!(report["results"]["surviving_classes"], 2187);
    assert_eq!(report["results"]["surviving_unconfirmed"], 2184);
}

#[test]
fn desk_solver_partitions_solutions() {
    let out = run(&["sunit", "--s0", "2"]);
    assert_eq!(out.status.code(), Some(1), "one unconfirmed coset pair");
    let report = stdout_json(&out);
    assert_eq!(report["results"]["status"], "CANDIDATE");
    let confirmed = report["results"]["confirmed"].as_array().unwrap();
    let pairs: Vec<(String, String)> = confirmed
        .iter()
        .map(|p| {
            (
                p[0].as_str().unwrap().to_string(),
                p[1].as_str().unwrap().to_string(),
            )
        })
        .collect();
    assert_eq!(
        pairs,
        vec![
            ("-1".to_string(), "2".to_string()),
            ("1/2".to_string(), "1/2".to_string()),
            ("2".to_string(), "-1".to_string()),
        ]
    );

    let csv = run(&["sunit", "--s0", "2", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,coset_alpha"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn precision_env_feeds_default() {
    let out = bin()
        .args(["sunit", "--sieve-only", "--s0", "2"])
        .env("CHABAUTY_PRECISION", "8")
        .output()
        .unwrap();
    let report = stdout_json(&out);
    assert_eq!(report["results"]["parameters"]["n"], 8);

    let flag_wins = bin()
        .args(["sunit", "--sieve-only", "--s0", "2", "--n", "6"])
        .env("CHABAUTY_PRECISION", "8")
        .output()
        .unwrap();
    let report = stdout_json(&flag_wins);
    assert_eq!(report["results"]["parameters"]["n"], 6);

    let bad = bin()
        .args(["sunit", "--sieve-only", "--s0", "2"])
        .env("CHABAUTY_PRECISION", "junk")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn output_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "obstruction",
        "--alpha",
        "1",
        "--q",
        "5",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["results"]["verdict"]["verdict"], "NoObstruction");
    assert_eq!(report["results"]["ledger"]["lower_bound"], 2);
}
