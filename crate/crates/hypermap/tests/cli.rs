//! End-to-end tests of the `hypermap` binary.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn hypermap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypermap"))
        .args(args)
        .env_remove("HYPERMAP_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("hypermap-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn tables_match_the_model() {
    let o = hypermap(&["tables", "--h", "0.125", "--pmax", "20"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "index,w,c,theta,pi,mu");
    assert_eq!(rows.len(), 22);
    let row2: Vec<f64> = rows[3].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row2[0], 2.0);
    assert!((row2[1] - 1.237_436_867_076_458).abs() < 1e-12);
    assert!((row2[3] - 0.021_484_375).abs() < 1e-15);
    assert!((row2[4] - 0.271_446_609_406_726_2).abs() < 1e-12);
    // The resolved configuration goes to stderr.
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"h\":0.125"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(hypermap(&["tables", "--h", "0.3"]).status.code(), Some(2));
    assert_eq!(hypermap(&["tables", "--h", "0.1", "--m", "0.2"]).status.code(), Some(2));
    assert_eq!(hypermap(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(hypermap(&["decode", "/nonexistent/forest"]).status.code(), Some(2));
}

#[test]
fn seed_determines_output() {
    let a = hypermap(&["sample-hull", "--radius", "3", "--seed", "17"]);
    let b = hypermap(&["sample-hull", "--radius", "3", "--seed", "17"]);
    let c = hypermap(&["sample-hull", "--radius", "3", "--seed", "18"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_hypermap"))
        .args(["sample-hull", "--radius", "3"])
        .env("HYPERMAP_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
}

#[test]
fn flags_override_the_config_file() {
    let dir = scratch("config");
    let cfg = dir.join("run.json");
    std::fs::write(&cfg, r#"{"h": 0.2, "seed": 5, "radius": 2}"#).unwrap();
    let o = hypermap(&["sample-tree", "--config", cfg.to_str().unwrap(), "--seed", "6"]);
    assert!(o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("\"h\":0.2") && err.contains("\"seed\":6") && err.contains("\"radius\":2"),
        "{err}"
    );
}

#[test]
fn strip_decode_then_encode_round_trips() {
    let dir = scratch("strip");
    let map = dir.join("strip.map");
    let sk = dir.join("sk");
    assert!(hypermap(&[
        "sample-strip",
        "--radius",
        "4",
        "--seed",
        "3",
        "--out",
        map.to_str().unwrap()
    ])
    .status
    .success());
    let enc = hypermap(&[
        "encode",
        map.to_str().unwrap(),
        "--strip-height",
        "4",
        "--out",
        sk.to_str().unwrap(),
    ]);
    assert!(enc.status.success());
    let forest = sk.join("skeleton.forest");
    let dec = hypermap(&["decode", forest.to_str().unwrap(), sk.to_str().unwrap()]);
    assert!(dec.status.success());
    assert_eq!(stdout(&dec), std::fs::read_to_string(&map).unwrap());
    // Pipe the decoded map back into the encoder.
    let mut child = Command::new(env!("CARGO_BIN_EXE_hypermap"))
        .args(["encode", "-", "--strip-height", "4"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&dec.stdout).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let original = std::fs::read_to_string(&forest).unwrap();
    assert!(original.ends_with(&stdout(&out)));
}

#[test]
fn hull_cylinder_round_trips_through_the_codec() {
    let dir = scratch("hull");
    let map = dir.join("hull.map");
    let sk = dir.join("hull.sk");
    let sample = hypermap(&[
        "sample-hull",
        "--cylinder",
        "--radius",
        "3",
        "--seed",
        "4",
        "--out",
        map.to_str().unwrap(),
    ]);
    assert!(sample.status.success());
    assert!(
        hypermap(&["encode", map.to_str().unwrap(), "--out", sk.to_str().unwrap()])
            .status
            .success()
    );
    let dec = hypermap(&["decode", sk.to_str().unwrap()]);
    assert!(dec.status.success());
    assert_eq!(stdout(&dec), std::fs::read_to_string(&map).unwrap());
    // The plane form has a single hole and is rejected by the cylinder codec.
    let plane = dir.join("plane.map");
    assert!(hypermap(&[
        "sample-hull",
        "--radius",
        "3",
        "--seed",
        "4",
        "--out",
        plane.to_str().unwrap()
    ])
    .status
    .success());
    assert_eq!(hypermap(&["encode", plane.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn geodesic_tree_agrees_with_the_skeleton() {
    let o = hypermap(&["geodesic-tree", "--radius", "3", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("isomorphic true"));
}

#[test]
fn verify_yule_reports_json() {
    let o = hypermap(&["verify", "yule", "--n", "16", "--samples", "5000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["name", "params", "seed", "statistic", "pvalue", "pass"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    assert_eq!(report["seed"], 7);
}

#[test]
fn failed_verification_exits_with_one() {
    // A significance level close to 1 rejects any p-value.
    let o = hypermap(&[
        "verify",
        "disk",
        "--samples",
        "2000",
        "--alpha",
        "0.999999",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}
