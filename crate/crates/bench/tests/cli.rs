use std::path::Path;
use std::process::{Command, Output};

use submax_bench::{run_config_file, Algorithm, CSV_HEADER};
use submax_core::{parse, random_instance, serialize, InstanceKind, RandomParams};

const P3: &str = r#"{"kind":"cut","m":3,"edges":[[0,1,1.0],[1,2,1.0]]}"#;

fn submax(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_submax"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn p3_config_gives_one_optimal_row() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("p3.json"), P3).unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"instances": [{"file": "p3.json"}], "algorithms": ["alg@2"], "epsilons": [0.05], "verify": true}"#,
    )
    .unwrap();

    let out = submax(dir.path(), &["run", "--config", "cfg.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, [CSV_HEADER, "p3,3,alg@2,0.05,2,2,2,1,21,0,true"]);

    // Relative paths resolve against the config file, not the working directory.
    let (_, report) = run_config_file(&dir.path().join("cfg.json")).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].ratio, Some(1.0));
    assert_eq!(report.rows[0].algorithm, Algorithm::Alg(2));
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("empty.json"),
        r#"{"instances": [], "algorithms": ["alg@2"]}"#,
    )
    .unwrap();
    let out = submax(dir.path(), &["run", "--config", "empty.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("at least one instance"), "{}", stderr(&out));

    std::fs::write(dir.path().join("broken.json"), "{\"kind\":\"cut\",\n\"m\":").unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"instances": [{"file": "broken.json"}], "algorithms": ["ls"]}"#,
    )
    .unwrap();
    let out = submax(dir.path(), &["run", "--config", "cfg.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("broken.json"), "{}", stderr(&out));

    let out = submax(dir.path(), &["solve", "--instance", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = submax(dir.path(), &["gen", "--kind", "hypergraph", "--m", "4", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = submax(
        dir.path(),
        &["scale", "--family", "zero", "--sizes", "8", "--epsilon", "0.1"],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = submax(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_writes_the_library_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = submax(
        dir.path(),
        &[
            "gen",
            "--kind",
            "random-cut",
            "--m",
            "32",
            "--seed",
            "7",
            "--out",
            "rc.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("rc.json")).unwrap();
    let expected = random_instance(InstanceKind::RandomCut, 32, 7, &RandomParams::default()).unwrap();
    assert_eq!(parse(&text).unwrap(), expected);
    assert_eq!(text.trim_end(), serialize(&expected));

    let out = submax(
        dir.path(),
        &[
            "gen",
            "--kind",
            "random-coverage",
            "--m",
            "5",
            "--seed",
            "3",
            "--universe",
            "4",
            "--density",
            "1.0",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let inst = parse(&stdout(&out)).unwrap();
    assert_eq!(inst.m, 5);
}

#[test]
fn solve_and_verify_report_results() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("p3.json"), P3).unwrap();

    let out = submax(
        dir.path(),
        &[
            "solve",
            "--instance",
            "p3.json",
            "--algo",
            "alg",
            "--depth",
            "2",
            "--epsilon",
            "0.05",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["value"], 2.0);
    assert_eq!(v["set"], serde_json::json!([0, 2]));
    assert_eq!(v["algorithm"], "alg@2");

    for algo in ["ls", "dg-det", "dg-rand", "brute"] {
        let out = submax(dir.path(), &["solve", "--instance", "p3.json", "--algo", algo]);
        assert_eq!(out.status.code(), Some(0), "{algo}: {}", stderr(&out));
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(v["value"], 2.0, "{algo}");
    }

    let out = submax(dir.path(), &["solve", "--instance", "p3.json", "--trace"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["trace"]["ground_size"], 3);

    let out = submax(dir.path(), &["verify", "--instance", "p3.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("trace checks: ok"));
}

#[test]
fn brute_cap_override_blanks_ratios() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"instances": [{"generate": {"kind": "random-cut", "m": 6, "seed": 1}}], "algorithms": ["dg-det"]}"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_submax"))
        .args(["run", "--config", "cfg.json"])
        .current_dir(dir.path())
        .env("SUBMAX_MAX_BRUTE_M", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let row = stdout(&out).lines().nth(1).unwrap().to_owned();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "random-cut-m6-s1");
    assert_eq!((fields[6], fields[7]), ("", ""), "{row}");
}

#[test]
fn output_formats_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"instances": [{"id": "p3", "inline": {"kind":"cut","m":3,"edges":[[0,1,1.0],[1,2,1.0]]}}],
            "algorithms": ["alg@1", "dg-det"], "format": "markdown", "traces": true}"#,
    )
    .unwrap();
    let out = submax(dir.path(), &["run", "--config", "cfg.json"]);
    assert!(stdout(&out).starts_with("| instance | m | algorithm |"));

    let out = submax(
        dir.path(),
        &["run", "--config", "cfg.json", "--format", "json", "--out", "r.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert!(v["rows"][0]["trace"].is_object());
    assert!(v.get("timing").is_none());
}

#[test]
fn scale_zero_family_grows_linearly() {
    let dir = tempfile::tempdir().unwrap();
    let out = submax(
        dir.path(),
        &[
            "scale",
            "--family",
            "zero",
            "--sizes",
            "8,16,32,64",
            "--epsilon",
            "0.1",
            "--json",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let queries: Vec<u64> = v["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["queries"].as_u64().unwrap())
        .collect();
    // 2 endpoints + 2(m-1) double-greedy steps (it ends at M) + m neighbours of M + 1 final evaluation.
    assert_eq!(queries, [25, 49, 97, 193]);
    let slope = v["slope"].as_f64().unwrap();
    assert!((slope - 1.0).abs() < 0.05, "{slope}");
}
