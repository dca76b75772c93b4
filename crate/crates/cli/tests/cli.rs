use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tailstat_cli::input::parse_values;

fn tailstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailstat"))
        .args(args)
        .env_remove("TAILSTAT_SEED")
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("schema/{name}.schema.json"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&doc).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn assert_valid(name: &str, doc: &serde_json::Value) {
    let v = schema(name);
    let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

fn write_tmp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn reports_match_their_schemas() {
    let data = fixture("splice_2000.csv");
    let data = data.to_str().unwrap();
    let runs: Vec<(&str, Vec<&str>)> = vec![
        (
            "gof",
            vec![
                "gof",
                data,
                "--model",
                "gpd",
                "--shape",
                "0.3",
                "--scale",
                "0.42",
                "--threshold",
                "0",
                "--stat",
                "cvm,ad,lower,upper",
                "--a",
                "1/2",
            ],
        ),
        (
            "gof",
            vec![
                "gof", data, "--model", "normal", "--mean", "1", "--sd", "0.8",
            ],
        ),
        ("risk", vec!["risk", "--grid", "0:3:1/4"]),
        ("risk", vec!["risk", "--named", "cvm"]),
        (
            "simulate",
            vec!["simulate", "--a", "0.5", "--n", "20", "--trials", "500"],
        ),
        (
            "simulate",
            vec![
                "simulate", "--a", "2", "--n", "10", "--trials", "100", "--probe", "50,100",
            ],
        ),
        (
            "osd",
            vec![
                "osd",
                "--n",
                "12",
                "--nu",
                "2",
                "--moments",
                "4",
                "--table",
                "--sample",
                "5",
            ],
        ),
        (
            "select-threshold",
            vec![
                "select-threshold",
                data,
                "--candidates",
                "1,2",
                "--reps",
                "99",
            ],
        ),
    ];
    for (name, args) in runs {
        assert_valid(name, &json(&tailstat(&args)));
    }
}

#[test]
fn scan_matches_the_golden_file() {
    let data = fixture("splice_2000.csv");
    let out = tailstat(&[
        "select-threshold",
        data.to_str().unwrap(),
        "--grid",
        "0.5:3:0.25",
        "--seed",
        "42",
    ]);
    assert!(out.status.success());
    let golden = std::fs::read(fixture("splice_2000_scan.json")).unwrap();
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&golden)
    );
}

#[test]
fn output_is_identical_across_runs_and_worker_counts() {
    let data = fixture("splice_2000.csv");
    let data = data.to_str().unwrap();
    let base = [
        "select-threshold",
        data,
        "--grid",
        "1:2.5:0.5",
        "--reps",
        "99",
        "--seed",
        "9",
    ];
    let reference = tailstat(&base).stdout;
    for threads in ["1", "3", "8"] {
        let mut args = vec!["--threads", threads];
        args.extend_from_slice(&base);
        assert_eq!(tailstat(&args).stdout, reference, "threads {threads}");
    }
    let sim = [
        "simulate", "--a", "1", "--n", "30", "--trials", "3000", "--seed", "5",
    ];
    let a = tailstat(&sim).stdout;
    assert_eq!(a, tailstat(&sim).stdout);
    assert_eq!(
        a,
        tailstat(&[&["--threads", "1"][..], &sim[..]].concat()).stdout
    );
}

#[test]
fn seed_comes_from_the_environment_or_the_flag() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_tailstat"));
        cmd.env_remove("TAILSTAT_SEED");
        if let Some(s) = env {
            cmd.env("TAILSTAT_SEED", s);
        }
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        cmd.args(["simulate", "--n", "10", "--trials", "200"])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(Some("17"), None), run(None, Some("17")));
    assert_eq!(run(Some("3"), Some("17")), run(None, Some("17")));
    assert_ne!(run(None, Some("17")), run(None, None));
    assert_eq!(run(None, Some("0")), run(None, None));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_tmp(&dir, "empty.csv", "\n\n");
    let bad = write_tmp(&dir, "bad.csv", "x\n1\nfoo\n");
    let small = write_tmp(&dir, "small.csv", "0.1\n0.2\n0.3\n");
    let cases: &[(&[&str], i32)] = &[
        (&["risk", "--a", "1"], 0),
        (&["risk", "--a", "2"], 0),
        (&["risk", "--grid", "-1:5:1"], 2),
        (&["risk", "--a", "-0.5"], 2),
        (&["osd", "--n", "5", "--nu", "-1"], 2),
        (&["osd", "--n", "0", "--nu", "1"], 2),
        (&["simulate", "--a", "3"], 3),
        (&["gof", "--pit", "--a", "3", "--stat", "lower", &small], 3),
        (&["gof", "--pit", &empty], 2),
        (&["gof", "--pit", &bad], 2),
        (&["gof", "--pit", "/no/such/file.csv"], 2),
        (&["gof", "--pit", "--stat", "nope", &small], 2),
        (
            &[
                "select-threshold",
                &small,
                "--grid",
                "5:6:1",
                "--reps",
                "99",
            ],
            3,
        ),
        (&["frobnicate"], 2),
        (&["--help"], 0),
    ];
    for (args, code) in cases {
        let out = tailstat(args);
        assert_eq!(
            out.status.code(),
            Some(*code),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        if *code != 0 {
            assert!(!out.stderr.is_empty(), "{args:?}");
        }
    }
    let out = tailstat(&["gof", "--pit", &bad]);
    assert!(
        String::from_utf8_lossy(&out.stderr).contains(":3:"),
        "line number is reported"
    );
}

#[test]
fn stress_two_threshold_selection_warns_but_runs() {
    let data = fixture("splice_2000.csv");
    let out = tailstat(&[
        "select-threshold",
        data.to_str().unwrap(),
        "--candidates",
        "1.5,2",
        "--reps",
        "99",
        "--stat-a",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("warning:") && stderr.contains("should not be used"),
        "{stderr}"
    );
    let doc = json(&out);
    assert_eq!(doc["scan"]["spec_risk"]["kind"], "divergent");
    assert!(doc["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w.as_str().unwrap().contains("divergent")));
}

#[test]
fn risk_grid_marks_poles() {
    let out = tailstat(&["--format", "csv", "risk", "--grid", "0:3:0.5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 7);
    let poles: Vec<&str> = rows
        .iter()
        .filter(|r| r[4] == "true")
        .map(|r| r[0])
        .collect();
    assert_eq!(poles, ["2", "3"]);
    let marked: Vec<&str> = rows
        .iter()
        .filter(|r| r[5] == "true")
        .map(|r| r[0])
        .collect();
    assert_eq!(marked, ["0", "1", "2", "3"]);
    let doc = json(&tailstat(&["risk", "--grid", "0:3:0.5"]));
    let at = |i: usize| &doc["rows"][i];
    assert_eq!(at(0)["risk_exact"], "1/6");
    assert_eq!(at(5)["risk_exact"], "-4");
    assert_eq!(at(5)["risk"]["value"], -4.0);
    assert_eq!(at(4)["risk"]["kind"], "divergent");
}

#[test]
fn csv_output_round_trips_through_the_reader() {
    let out = tailstat(&[
        "--format", "csv", "osd", "--n", "40", "--nu", "0.5", "--table",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let pmf_col: String = text
        .lines()
        .map(|l| l.split(',').nth(1).unwrap().to_string() + "\n")
        .collect();
    let pmf = parse_values(&pmf_col, "table").unwrap();
    assert_eq!(pmf.len(), 40);
    assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    let doc = json(&tailstat(&["osd", "--n", "40", "--nu", "0.5", "--table"]));
    let from_json: Vec<f64> = doc["table"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["pmf"].as_f64().unwrap())
        .collect();
    assert_eq!(pmf, from_json);
    let last_cdf = doc["table"][39]["cdf"].as_f64().unwrap();
    assert!((last_cdf - 1.0).abs() < 1e-12);
}

#[test]
fn output_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("risk.json");
    let out = tailstat(&["--output", path.to_str().unwrap(), "risk", "--named", "ad"]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert_eq!(
        std::fs::read(&path).unwrap(),
        tailstat(&["risk", "--named", "ad"]).stdout
    );
}

#[test]
fn single_point_statistics_are_exact() {
    let dir = tempfile::tempdir().unwrap();
    let half = write_tmp(&dir, "half.csv", "0.5\n");
    let doc = json(&tailstat(&["gof", "--pit", "--stat", "cvm", &half]));
    assert_eq!(doc["results"][0]["value"].as_f64().unwrap(), 1.0 / 12.0);
    let text =
        String::from_utf8(tailstat(&["gof", "--pit", "--stat", "cvm", &half]).stdout).unwrap();
    assert!(text.contains("\"value\":0.083333333333333329"), "{text}");
}
