use std::process::{Command, Output};

use serde_json::Value;

fn dpw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpw")).args(args).env_remove("DPW_ELEMENT_CAP").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

#[test]
fn enumerate_outside_elements_have_small_rank() {
    let out = dpw(&["enumerate", "--graph", "wheel", "--n", "5", "--filter", "outside"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let els = v["result"]["elements"].as_array().unwrap();
    assert_eq!(v["result"]["count"], els.len());
    assert!(!els.is_empty());
    assert!(els.iter().all(|e| e["map"].as_array().unwrap().len() <= 4));
}

#[test]
fn factorize_e0_for_n_4() {
    let e0 = r#"{"map":[[0,0],[1,1],[2,2],[3,3]]}"#;
    let v = json(&dpw(&["factorize", "--n", "4", "--element", e0]));
    assert_eq!(v["result"]["word"], serde_json::json!(["G0", "G0", "G0", "Z", "Z", "G0"]));
    assert_eq!(v["result"]["evaluates"], true);
}

#[test]
fn shortest_words_evaluate() {
    let a = r#"{"map":[[0,1],[1,0]]}"#;
    let out = dpw(&["factorize", "--n", "5", "--element", a, "--style", "shortest"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["evaluates"], true);
    let constructive = json(&dpw(&["factorize", "--n", "5", "--element", a]));
    assert!(v["result"]["length"].as_u64() <= constructive["result"]["length"].as_u64());
}

#[test]
fn classify_and_jtype() {
    let v = json(&dpw(&["classify", "--n", "6", "--element", r#"{"map":[[0,0],[1,2]]}"#]));
    assert_eq!(v["result"]["classification"], "plus");
    let v = json(&dpw(&["jtype", "--n", "7", "--element", r#"{"ambient":7,"map":[[1,1],[2,2],[4,4]]}"#]));
    assert_eq!(v["result"]["jtype"], serde_json::json!([1, 2]));
}

#[test]
fn green_csv_has_one_row_per_jtype() {
    let dir = std::env::temp_dir().join(format!("dpw-green-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("classes.csv");
    let out = dpw(&["green", "--n", "6", "--monoid", "minus", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("class,size,rank,label,representative"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 12);
    let sizes: usize = rows.iter().map(|r| r.split(',').nth(1).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(sizes, 955);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn green_class_check_passes() {
    let out = dpw(&["green", "--n", "6", "--monoid", "full", "--check", "theorem-J"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rank2: Vec<&Value> = v["result"]["classes"].as_array().unwrap().iter().filter(|c| c["rank"] == 2).collect();
    assert_eq!(rank2.len(), 2);
}

#[test]
fn verify_generation_and_rank() {
    let out = dpw(&["verify", "--suite", "generation", "--n-min", "4", "--n-max", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "pass");
    let out = dpw(&["verify", "--suite", "rank", "--n-min", "4", "--n-max", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let out = dpw(&["verify", "--suite", "distances", "--n-min", "4", "--n-max", "9"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn rank_exact_and_bounds() {
    let v = json(&dpw(&["rank", "--n", "4", "--monoid", "full", "--method", "exact"]));
    assert_eq!(v["result"]["rank"], 4);
    let v = json(&dpw(&["rank", "--n", "6", "--monoid", "minus"]));
    assert_eq!((v["result"]["lower"].clone(), v["result"]["upper"].clone()), (4.into(), 4.into()));
}

#[test]
fn exit_codes() {
    // inconclusive
    let out = dpw(&["rank", "--n", "4", "--monoid", "full", "--method", "exact", "--budget", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "inconclusive");
    // not an isometry
    let out = dpw(&["classify", "--n", "5", "--element", r#"{"map":[[1,3],[2,4],[3,1]]}"#]);
    assert_eq!(out.status.code(), Some(1));
    // usage
    assert_eq!(dpw(&["verify", "--n-min", "3"]).status.code(), Some(3));
    assert_eq!(dpw(&["no-such-command"]).status.code(), Some(3));
    assert_eq!(dpw(&["classify", "--n", "5", "--element", "{"]).status.code(), Some(3));
    assert_eq!(dpw(&["rank", "--n", "4", "--monoid", "full"]).status.code(), Some(3));
}

#[test]
fn element_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_dpw"))
        .args(["close", "--n", "6", "--set", "full"])
        .env("DPW_ELEMENT_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("100"));
}

#[test]
fn payload_independent_of_workers() {
    let run = |w: &str| json(&dpw(&["--workers", w, "verify", "--suite", "factorization", "--n-min", "4", "--n-max", "5"]));
    let (a, b) = (run("1"), run("3"));
    assert_eq!(a["result"], b["result"]);
    assert!(a["timings"]["total"].is_number());
}

#[test]
fn close_reports_equality() {
    let v = json(&dpw(&["close", "--n", "7", "--set", "minus"]));
    assert_eq!(v["result"]["size"], 3396);
    assert_eq!(v["result"]["equals_enumerated"], true);
}
