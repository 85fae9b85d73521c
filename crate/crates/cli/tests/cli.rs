use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn gbs(stem: &str, extra: &[&str]) -> Output {
    let dir = fixtures();
    Command::new(env!("CARGO_BIN_EXE_gbs"))
        .arg("--graph")
        .arg(dir.join(format!("{stem}.graph.json")))
        .arg("--map")
        .arg(dir.join(format!("{stem}.map.json")))
        .args(extra)
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

#[test]
fn decided_runs_exit_zero() {
    let o = gbs("trib_p1", &["--mode", "all", "--recheck"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["verdict"]["atoroidal"], true);
    assert_eq!(v["verdict"]["fully_irreducible"], true);
    assert!(v["recheck"].as_array().unwrap().iter().all(|c| c["ok"] == true));

    let o = gbs("perm_p2", &["--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("reducible: transition matrix is the permutation"));
}

#[test]
fn json_is_deterministic_apart_from_timing() {
    let strip = |o: &Output| {
        let mut v = json(o);
        v.as_object_mut().unwrap().remove("timing_ms");
        serde_json::to_string(&v).unwrap()
    };
    let a = gbs("interior_p1", &[]);
    let b = gbs("interior_p1", &["--sequential"]);
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn family_and_override() {
    let fam = fixtures().join("restricted_v3.family.json");
    let o = gbs("trib_p2", &["--mode", "iwip", "--assume-atoroidal", "--family", fam.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["verdict"]["fully_irreducible"], true);
    let o = gbs("trib_p2", &["--mode", "iwip", "--assume-atoroidal"]);
    assert_eq!(json(&o)["verdict"]["fully_irreducible"], false);
}

#[test]
fn exit_codes() {
    let o = gbs("does_not_exist", &[]);
    assert_eq!(o.status.code(), Some(2));
    let dir = fixtures();
    // trib's map on fib's graph names unknown generators.
    let o = Command::new(env!("CARGO_BIN_EXE_gbs"))
        .arg("--graph")
        .arg(dir.join("fib_p1.graph.json"))
        .arg("--map")
        .arg(dir.join("trib_p1.map.json"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["error"]["stage"], "validate");
    let o = gbs("fib_p1", &["--mode", "atoroidal", "--max-l", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&o)["error"]["kind"], "bound_exhausted");
}

#[test]
fn writes_to_out() {
    let out = std::env::temp_dir().join(format!("gbs-cli-{}.json", std::process::id()));
    let o = gbs("fib2_p2", &["--mode", "validate", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["mode"], "validate");
    let _ = std::fs::remove_file(out);
}
