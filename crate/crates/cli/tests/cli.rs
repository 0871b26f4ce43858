use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nilrec::equid::{skew_pair, VerdictRecord};
use nilrec::{decide_well_distribution, Verdict};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nilrec"))
}

fn repo(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn nilrec")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

fn assert_schema(doc: &Value) {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(repo("schema/output-v1.schema.json")).unwrap()).unwrap();
    let v = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}

fn round_trip(records: &Value) -> Vec<Verdict> {
    records
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            let rec: VerdictRecord = serde_json::from_value(r.clone()).unwrap();
            let v = rec.to_verdict().unwrap();
            assert_eq!(VerdictRecord::from_verdict(&v, rec.component.clone()), rec);
            v
        })
        .collect()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("cfg.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn dependent_polynomials_exit_one_with_witness() {
    let o = run(&["check-independence", "n, 2n"]);
    assert_eq!(code(&o), 1);
    let doc = json(&o.stdout);
    assert_eq!(doc["result"]["verdict"], "dependent");
    let w: Vec<&str> = doc["result"]["witness"].as_array().unwrap().iter().map(|x| x["exact"].as_str().unwrap()).collect();
    assert_eq!(w, ["2", "-1"]);
    let err = json(&o.stderr);
    assert_eq!(err["error"]["kind"], "dependent");
    assert_eq!(err["error"]["exit_code"], 1);
}

#[test]
fn independent_polynomials_exit_zero() {
    let o = run(&["check-independence", "n, n^2, n^3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o.stdout)["result"]["verdict"], "independent");
}

#[test]
fn demo_reports_the_obstruction() {
    let o = run(&["demo-counterexample"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json(&o.stdout);
    assert_schema(&doc);
    let without = &doc["result"]["without_m"];
    let verdicts = round_trip(&without["verdicts"]);
    assert_eq!(verdicts[0].character().unwrap().l, vec![0, 1, -1, 0]);
    let library = decide_well_distribution(&skew_pair(false).unwrap()).unwrap();
    assert_eq!(library.global(), Some(&verdicts[0]));
    for s in without["sums"].as_array().unwrap() {
        let m: f64 = s["modulus"]["numeric"].as_str().unwrap().parse().unwrap();
        assert!((m - 1.0).abs() < 1e-9, "{m}");
    }
    let with = round_trip(&doc["result"]["with_m"]["verdicts"]);
    assert!(with.iter().all(|v| v.is_well_distributed()));
}

#[test]
fn decide_round_trips_and_validates() {
    let o = run(&["decide", repo("configs/decide.toml").to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let doc = json(&o.stdout);
    assert_schema(&doc);
    round_trip(&doc["result"]["verdicts"]);
}

#[test]
fn scan_writes_density_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo("configs/recurrence.toml");
    let o = run(&["scan", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(std::fs::read_to_string(dir.path().join("scan.csv")).unwrap(), text);
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "N,b,good,total,ratio");
    assert_eq!(body.len(), 4);
    for row in &body[1..] {
        let f: Vec<&str> = row.split(',').collect();
        let (good, total): (u64, u64) = (f[2].parse().unwrap(), f[3].parse().unwrap());
        let ratio: f64 = f[4].parse().unwrap();
        assert!(total > 0 && good <= total);
        assert_eq!(ratio, good as f64 / total as f64);
        assert!(ratio > 0.01);
    }
    assert!(text.lines().any(|l| l.starts_with("# config=")));
}

#[test]
fn scan_json_validates() {
    let o = run(&["scan", repo("configs/recurrence.toml").to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let doc = json(&o.stdout);
    assert_schema(&doc);
    assert_eq!(doc["result"]["threshold"]["exact"], "3/40");
    assert_eq!(doc["result"]["consistent"], true);
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let cfg = repo("configs/recurrence.toml");
    let mut outs = Vec::new();
    for threads in ["1", "4", "4"] {
        let dir = tempfile::tempdir().unwrap();
        let o = run(&["scan", cfg.to_str().unwrap(), "--threads", threads, "--format", "json", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        outs.push(std::fs::read(dir.path().join("scan.json")).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[1], outs[2]);
}

#[test]
fn project_validates_and_tags_numbers() {
    let o = run(&["project", repo("configs/project.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let doc = json(&o.stdout);
    assert_schema(&doc);
    assert_eq!(doc["result"]["period"]["exact"], "3");
    let dev: f64 = doc["result"]["deviation"]["numeric"].as_str().unwrap().parse().unwrap();
    assert!(dev < 0.05);
}

#[test]
fn precision_flag_overrides_config() {
    let o = run(&["decide", repo("configs/decide.toml").to_str().unwrap(), "--precision", "40"]);
    assert_eq!(code(&o), 0);
    let doc = json(&o.stdout);
    assert_eq!(doc["provenance"]["precision_digits"], 40);
    assert_eq!(doc["config"]["precision"], 40);
}

#[test]
fn offsets_on_a_non_ergodic_system_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[[system]]
name = "half"
translation = ["1/2", "0"]

[[observable]]
name = "f"
kind = "trig"
dim = 2
terms = [{ l = [1, 0] }]

[project]
system = "half"
observable = "f"
offsets = [0, 1]
"#,
    );
    let o = run(&["project", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = json(&o.stderr);
    assert_eq!(err["error"]["kind"], "not-ergodic");
    assert!(err["error"]["witness"]["l"].is_array());
}

#[test]
fn dependent_scan_polynomials_fail_the_hypothesis() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[[system]]
name = "r"
translation = ["1/3"]

[[polynomial]]
name = "a"
expr = "n"

[[polynomial]]
name = "b"
expr = "2n"

[[observable]]
name = "A"
kind = "box"
intervals = [["0", "1/2"]]

[scan]
systems = ["r", "r"]
polynomials = ["a", "b"]
set = "A"
epsilon = "1/20"
schedule = [50]
"#,
    );
    let o = run(&["scan", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o.stderr)["error"]["kind"], "hypothesis");
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        "[decide]\nfactors = []\nbogus = 1\n",
        "[[system]]\nname = \"s\"\ntranslation = [\"gamma\"]\n",
        "[[system]]\nname = \"s\"\ntranslation = [\"1/2\"]\n[[system]]\nname = \"s\"\ntranslation = [\"1/3\"]\n",
        "not toml at all [",
    ];
    for text in cases {
        let cfg = write_config(dir.path(), text);
        let o = run(&["decide", cfg.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{text}");
        assert_eq!(json(&o.stderr)["error"]["exit_code"], 2);
    }
    assert_eq!(code(&run(&["decide", "/nonexistent/config.toml"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["check-independence", "n +"])), 2);
    assert_eq!(code(&run(&["decide"])), 2);
}

#[test]
fn every_example_config_runs() {
    for (cmd, file) in [
        ("check-independence", "independence.toml"),
        ("decide", "decide.toml"),
        ("charsum", "charsum.toml"),
        ("average", "average.toml"),
        ("diagnostic", "average.toml"),
        ("seminorm", "seminorm.toml"),
        ("project", "project.toml"),
        ("demo-counterexample", "demo.toml"),
    ] {
        let o = run(&[cmd, "--config", repo(&format!("configs/{file}")).to_str().unwrap(), "--format", "json"]);
        assert_eq!(code(&o), 0, "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        assert_schema(&json(&o.stdout));
    }
}
