use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).to_path_buf()
}

fn asset(name: &str) -> String {
    root()
        .join("../core/assets")
        .join(name)
        .display()
        .to_string()
}

fn golden(name: &str) -> PathBuf {
    root().join("tests/golden").join(name)
}

fn mlat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlat"))
        .args(args)
        .output()
        .expect("run mlat")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn golden_matching(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(golden(name)).unwrap()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mlat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn demos_match_golden_files() {
    for ex in ["example1", "example2"] {
        let text = mlat(&["demo", ex]);
        assert_eq!(text.status.code(), Some(0));
        let want = std::fs::read_to_string(golden(&format!("demo_{ex}.txt"))).unwrap();
        assert_eq!(stdout(&text), want, "{ex} text transcript");
        let json = mlat(&["--format", "json", "demo", ex]);
        let want = std::fs::read_to_string(golden(&format!("demo_{ex}.json"))).unwrap();
        assert_eq!(stdout(&json), want, "{ex} json transcript");
    }
}

#[test]
fn demo_output_is_deterministic() {
    let a = mlat(&["--format", "json", "demo", "example2"]);
    let b = mlat(&["--format", "json", "demo", "example2"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn demo_example1_names_the_displayed_matchings() {
    let v = json_of(&mlat(&["--format", "json", "demo", "example1"]));
    let r = &v["result"];
    assert_eq!(r["lambda"]["name"], "lambda");
    assert_eq!(r["gamma"]["name"], "gamma");
    assert_eq!(r["lambda"]["blocking_pairs"][0]["firm"], "f3");
    assert_eq!(r["lambda"]["blocking_pairs"][0]["worker"], "w1");
    assert_eq!(r["gamma"]["blocking_pairs"][0]["firm"], "f1");
    assert_eq!(r["gamma"]["blocking_pairs"][0]["worker"], "w5");
    assert_eq!(r["firm_operator"]["step_count"], 1);
    assert_eq!(r["worker_operator"]["step_count"], 1);
    assert_eq!(r["join"]["name"], "mu_star");
    assert_eq!(r["meet"]["name"], "mu_dagger");
    assert_eq!(r["lattice_verified"], true);
}

#[test]
fn demo_example2_reaches_mu_star() {
    let v = json_of(&mlat(&["--format", "json", "demo", "example2"]));
    let steps = &v["result"]["firm_operator"]["steps"];
    assert_eq!(steps[0]["name"], "circled");
    assert_eq!(steps[2]["name"], "mu_star");
    assert_eq!(v["result"]["join"]["name"], "mu_star");
}

#[test]
fn join_from_matching_files() {
    let e1 = asset("example1.json");
    let (a, b) = (
        golden("example1_mu_under.json"),
        golden("example1_mu_over.json"),
    );
    let o = mlat(&[
        "--format",
        "json",
        "join",
        "--side",
        "firms",
        &e1,
        a.to_str().unwrap(),
        b.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["ok"], true);
    assert_eq!(v["error"], Value::Null);
    assert_eq!(
        v["result"]["matching"],
        golden_matching("example1_mu_star.json")
    );
}

#[test]
fn join_and_meet_in_both_orders() {
    let e1 = asset("example1.json");
    let run = |op: &str, side: &str| {
        json_of(&mlat(&[
            "--format",
            "json",
            op,
            "--side",
            side,
            &e1,
            "@mu_under",
            "@mu_over",
        ]))["result"]["matching"]
            .clone()
    };
    let star = golden_matching("example1_mu_star.json");
    let dagger = golden_matching("example1_mu_dagger.json");
    assert_eq!(run("join", "firms"), star);
    assert_eq!(run("meet", "firms"), dagger);
    assert_eq!(run("join", "workers"), dagger);
    assert_eq!(run("meet", "workers"), star);
}

#[test]
fn trace_lists_candidate_and_steps() {
    let e1 = asset("example1.json");
    let v = json_of(&mlat(&[
        "--format",
        "json",
        "join",
        "--trace",
        &e1,
        "@mu_under",
        "@mu_over",
    ]));
    let r = &v["result"];
    assert_eq!(r["operator"], "firms");
    let trace = r["trace"].as_array().unwrap();
    assert_eq!(trace.len(), 2);
    assert_eq!(trace[0]["blocking_pairs"], 1);
    assert_eq!(trace[1]["stable"], true);
    assert_eq!(trace[1]["improves"], true);
    assert_eq!(r["candidate"], trace[0]["matching"]);
}

#[test]
fn unstable_input_is_a_domain_error() {
    let e1 = asset("example1.json");
    let o = mlat(&["--format", "json", "join", &e1, "@lambda", "@mu_over"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json_of(&o);
    assert_eq!(v["ok"], false);
    assert_eq!(v["error"]["kind"], "NotStable");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(mlat(&["join"]).status.code(), Some(2));
    assert_eq!(mlat(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mlat(&["demo", "example3"]).status.code(), Some(2));
    let e1 = asset("example1.json");
    assert_eq!(
        mlat(&["join", "--side", "both", &e1, "@mu_under", "@mu_over"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn validate_passes_bundled_markets() {
    for ex in ["example1.json", "example2.json"] {
        let o = mlat(&["--format", "json", "validate", &asset(ex)]);
        assert_eq!(o.status.code(), Some(0), "{ex}");
        assert_eq!(json_of(&o)["result"]["passed"], true);
    }
}

#[test]
fn validate_reports_a_witness() {
    let market = r#"{
        "variant": "many_to_one",
        "firms": {"f1": {"kind": "set_list", "list": [["a", "b"], ["a"]]}},
        "workers": {"a": {"kind": "linear", "order": ["f1"]}, "b": {"kind": "linear", "order": ["f1"]}}
    }"#;
    let path = temp_file("complements.json", market);
    let o = mlat(&["--format", "json", "validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = json_of(&o);
    assert_eq!(v["error"]["kind"], "ValidationFailed");
    let check = &v["result"]["agents"][0]["checks"][0];
    assert_eq!(check["axiom"], "substitutability");
    assert_eq!(check["witness"]["set"], serde_json::json!(["a", "b"]));
    assert_eq!(check["witness"]["other"], serde_json::json!(["b"]));
    assert_eq!(check["witness"]["agent"], "b");
}

#[test]
fn load_errors_are_classified() {
    let dangling = temp_file(
        "dangling.json",
        r#"{"variant": "many_to_one",
            "firms": {"f1": {"kind": "quota_linear", "order": ["w9"], "quota": 1}},
            "workers": {"w1": {"kind": "linear", "order": ["f1"]}}}"#,
    );
    let o = mlat(&["--format", "json", "validate", dangling.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_of(&o)["error"]["kind"], "ReferentialIntegrity");

    let broken = temp_file("broken.json", "{ not json");
    let o = mlat(&[
        "--format",
        "json",
        "stable-check",
        broken.to_str().unwrap(),
        "@x",
    ]);
    assert_eq!(json_of(&o)["error"]["kind"], "ParseError");

    let e1 = asset("example1.json");
    let twice = temp_file(
        "twice.json",
        r#"{"assignments": {"f1": ["w1"], "f2": ["w1"]}}"#,
    );
    let o = mlat(&[
        "--format",
        "json",
        "stable-check",
        &e1,
        twice.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_of(&o)["error"]["kind"], "SchemaError");

    let o = mlat(&[
        "--format",
        "json",
        "stable-check",
        "/nonexistent/market.json",
        "@x",
    ]);
    assert_eq!(json_of(&o)["error"]["kind"], "IoError");
}

#[test]
fn empty_assignments_give_the_empty_matching() {
    let e1 = asset("example1.json");
    let empty = temp_file("empty.json", r#"{"assignments": {}}"#);
    let v = json_of(&mlat(&[
        "--format",
        "json",
        "stable-check",
        &e1,
        empty.to_str().unwrap(),
    ]));
    assert_eq!(
        v["result"]["matching"]["assignments"],
        serde_json::json!({})
    );
    assert_eq!(v["result"]["individually_rational"], true);
    assert_eq!(v["result"]["stable"], false);
}

#[test]
fn stable_and_quasi_checks() {
    let e1 = asset("example1.json");
    let v = json_of(&mlat(&["--format", "json", "stable-check", &e1, "@lambda"]));
    assert_eq!(v["result"]["stable"], false);
    assert_eq!(v["result"]["blocking_pairs"][0]["firm"], "f3");
    let v = json_of(&mlat(&["--format", "json", "quasi-check", &e1, "@lambda"]));
    assert_eq!(v["result"]["worker_quasi_stable"], true);
    let v = json_of(&mlat(&[
        "--format",
        "json",
        "quasi-check",
        "--side",
        "firms",
        &e1,
        "@gamma",
    ]));
    assert_eq!(v["result"]["firm_quasi_stable"], true);
    assert!(v["result"].get("worker_quasi_stable").is_none());
}

#[test]
fn iterate_checks_its_precondition() {
    let e1 = asset("example1.json");
    let v = json_of(&mlat(&[
        "--format", "json", "iterate", "--side", "workers", &e1, "@gamma",
    ]));
    assert_eq!(v["result"]["steps"], 1);
    assert_eq!(
        v["result"]["matching"],
        golden_matching("example1_mu_dagger.json")
    );
    let o = mlat(&[
        "--format", "json", "iterate", "--side", "firms", &e1, "@gamma",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_of(&o)["error"]["kind"], "NotWorkerQuasiStable");
}

#[test]
fn extremal_and_lattice() {
    let e1 = asset("example1.json");
    let v = json_of(&mlat(&[
        "--format", "json", "extremal", "--side", "firms", &e1,
    ]));
    assert_eq!(v["result"]["optimality"], "verified");
    assert_eq!(
        v["result"]["matching"],
        golden_matching("example1_mu_star.json")
    );
    let v = json_of(&mlat(&["--format", "json", "verify-lattice", &e1]));
    assert_eq!(v["result"]["passed"], true);
    assert_eq!(v["result"]["stable_size"], 4);
}

#[test]
fn enumerate_emits_json_lines() {
    let e1 = asset("example1.json");
    let o = mlat(&["--format", "json", "enumerate", "--stable", &e1]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[..4]
        .iter()
        .all(|l| l["stable"] == true && l["worker_quasi_stable"] == true));
    assert_eq!(lines[4]["result"]["count"], 4);
    let o = mlat(&["--format", "json", "enumerate", "--budget", "10", &e1]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_of(&o)["error"]["kind"], "BudgetExceeded");
}

#[test]
fn replica_pipeline_round_trips() {
    let gen = mlat(&[
        "random",
        "--variant",
        "many-to-many-responsive",
        "--firms",
        "3",
        "--workers",
        "3",
        "--seed",
        "11",
        "--density",
        "1",
    ]);
    assert_eq!(gen.status.code(), Some(0));
    let market = temp_file("responsive.json", &stdout(&gen));
    let m = market.to_str().unwrap();

    let built = json_of(&mlat(&["--format", "json", "replica", "build", m]));
    assert_eq!(built["result"]["variant"], "many_to_one");

    let stable: Vec<Value> = stdout(&mlat(&["--format", "json", "enumerate", "--stable", m]))
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap())
        .filter(|l| l.get("matching").is_some())
        .map(|l| l["matching"].clone())
        .collect();
    assert!(!stable.is_empty());
    for (i, mu) in stable.iter().enumerate() {
        let path = temp_file(&format!("stable{i}.json"), &mu.to_string());
        let p = path.to_str().unwrap();
        let inv = json_of(&mlat(&["--format", "json", "replica", "phi-inverse", m, p]));
        assert!(inv["result"]["assignments"].to_string().contains('#'));
        let nu = temp_file(&format!("replica{i}.json"), &inv["result"].to_string());
        let back = json_of(&mlat(&[
            "--format",
            "json",
            "replica",
            "phi",
            m,
            nu.to_str().unwrap(),
        ]));
        assert_eq!(&back["result"], mu);
        let join = json_of(&mlat(&["--format", "json", "replica", "join", m, p, p]));
        assert_eq!(&join["result"], mu);
    }
}

#[test]
fn replica_needs_a_responsive_market() {
    let o = mlat(&[
        "--format",
        "json",
        "replica",
        "build",
        &asset("example1.json"),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_of(&o)["error"]["kind"], "VariantMismatch");
}

#[test]
fn random_markets_are_seeded() {
    let args = [
        "random",
        "--variant",
        "many-to-many-sub",
        "--firms",
        "3",
        "--workers",
        "3",
        "--seed",
        "5",
    ];
    assert_eq!(mlat(&args).stdout, mlat(&args).stdout);
}
