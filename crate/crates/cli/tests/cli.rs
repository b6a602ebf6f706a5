use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn eulerkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eulerkit"))
        .current_dir(fixtures())
        .env_remove("EULERKIT_CONFIG")
        .env_remove("EULERKIT_PRECISION")
        .args(args)
        .output()
        .expect("spawn eulerkit")
}

fn certificate(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn manifest(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(fixtures().join(name)).unwrap()).unwrap()
}

fn strs(v: &Value) -> Vec<&str> {
    v.as_array().unwrap().iter().map(|a| a.as_str().unwrap()).collect()
}

#[test]
fn passing_fixtures_exit_zero() {
    for args in manifest("passing.json").as_array().unwrap() {
        let mut a = vec!["--deterministic"];
        a.extend(strs(args));
        let out = eulerkit(&a);
        assert_eq!(out.status.code(), Some(0), "{a:?}: {}", String::from_utf8_lossy(&out.stdout));
        let c = certificate(&out);
        assert_eq!(c["result"], "pass");
        assert!(eulerkit::certificate::unknown_anchors(&c).is_empty());
        assert!(c.get("wall_time_ms").is_none());
    }
}

#[test]
fn corruption_fixtures_fail_with_witnesses() {
    for case in manifest("corruptions.json").as_array().unwrap() {
        let args = strs(&case["args"]);
        let out = eulerkit(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let c = certificate(&out);
        let prefix = case["failing_check"].as_str().unwrap();
        let failed: Vec<&Value> = c["checks"].as_array().unwrap().iter().filter(|k| k["passed"] == false).collect();
        assert!(failed.iter().any(|k| k["name"].as_str().unwrap().starts_with(prefix)), "{args:?}");
        assert!(failed.iter().all(|k| !k["witnesses"].as_array().unwrap().is_empty()));
        assert!(c.get("wall_time_ms").is_some());
    }
}

#[test]
fn empty_range_gives_empty_set() {
    let out = eulerkit(&["dist-check", "--system", "systems/epsilon.json", "--max-conductor", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(certificate(&out)["checks"].as_array().unwrap().is_empty());
}

#[test]
fn free_rank_two_is_member() {
    let out = eulerkit(&["bidual", "--lattice", "lattices/free_rank2.json", "--degree", "2", "--element", "lattices/free_rank2_element.json"]);
    assert_eq!(certificate(&out)["value"]["member"], true);
    let out = eulerkit(&["bidual", "--lattice", "lattices/free_rank2.json", "--degree", "1", "--element", "lattices/free_rank2_element.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lvalue_spot_values() {
    for (chi, s, v) in [("5:quadratic", "5", 0.481_211_825_059_6), ("12:quadratic", "2,3", 1.316_957_896_924_8)] {
        let c = certificate(&eulerkit(&["lvalue", "--chi", chi, "--S", s]));
        assert!((c["value"]["value"]["re"]["approx"].as_f64().unwrap() - v).abs() < 1e-12);
        assert!(c["checks"].as_array().unwrap().iter().any(|k| k["name"] == "oracle agreement" && k["passed"] == true));
    }
    let c = certificate(&eulerkit(&["lvalue", "--chi", "5:quadratic", "--S", "5,11"]));
    assert_eq!(c["value"]["exact_zero"], true);
    assert_eq!(c["value"]["order_jump"], 1);
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let all: Vec<Vec<String>> = manifest("passing.json")
        .as_array()
        .unwrap()
        .iter()
        .chain(manifest("corruptions.json").as_array().unwrap().iter().map(|c| &c["args"]))
        .map(|a| strs(a).into_iter().map(str::to_string).collect())
        .collect();
    for args in all {
        let mut a = vec!["--deterministic"];
        a.extend(args.iter().map(String::as_str));
        let first = eulerkit(&a).stdout;
        let mut seq = a.clone();
        seq.push("--sequential");
        assert_eq!(first, eulerkit(&seq).stdout, "{a:?}");
        assert!(!first.is_empty());
    }
}

#[test]
fn tool_errors_exit_two() {
    let dir = std::env::temp_dir().join(format!("eulerkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"flavor\": \"rational\",\n \"entries\": [}").unwrap();
    let out = eulerkit(&["dist-check", "--system", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
    let entry = dir.join("entry.json");
    std::fs::write(&entry, r#"{"flavor": "rational", "entries": [{"m": 5, "H": [1, 3], "value": {"m": 5, "num": [1]}}]}"#).unwrap();
    let err = String::from_utf8_lossy(&eulerkit(&["dist-check", "--system", entry.to_str().unwrap()]).stderr).to_string();
    assert!(err.contains("entries[0]"), "{err}");
    assert_eq!(eulerkit(&["theta", "--m", "6"]).status.code(), Some(2));
    assert_eq!(eulerkit(&["frobnicate"]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_precedence() {
    let dir = std::env::temp_dir().join(format!("eulerkit-conf-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let conf = dir.join("eulerkit.conf");
    std::fs::write(&conf, "precision = 96\ndeterministic = true\n").unwrap();
    let args = ["--config", conf.to_str().unwrap(), "lvalue", "--chi", "5:quadratic", "--S", "5"];
    let c = certificate(&eulerkit(&args));
    assert_eq!(c["precision"]["bits"], 96);
    assert!(c.get("wall_time_ms").is_none());
    let env = Command::new(env!("CARGO_BIN_EXE_eulerkit"))
        .current_dir(fixtures())
        .env("EULERKIT_PRECISION", "112")
        .args(args)
        .output()
        .unwrap();
    assert_eq!(certificate(&env)["precision"]["bits"], 112);
    let mut flag = vec!["--precision", "80"];
    flag.extend(args);
    assert_eq!(certificate(&eulerkit(&flag))["precision"]["bits"], 80);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn cache_round_trip() {
    let dir = std::env::temp_dir().join(format!("eulerkit-cache-{}", std::process::id()));
    let args = ["--deterministic", "--cache-dir", dir.to_str().unwrap(), "lvalue", "--chi", "13:quadratic", "--S", "13"];
    let first = eulerkit(&args).stdout;
    assert!(dir.join("lvalues-v1.jsonl").exists());
    assert_eq!(first, eulerkit(&args).stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}
