use std::path::Path;
use std::process::Command;

use troquad::feynman::generate;
use troquad::EstimateReport;

fn troquad(cache: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_troquad"))
        .args(args)
        .env("TROQUAD_CACHE_DIR", cache)
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn hepp_integrate_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("k4.json");
    generate::wheel3().save(&graph).unwrap();
    let graph = graph.to_str().unwrap();
    let cache = dir.path().join("cache");

    let (code, out) = troquad(&cache, &["hepp", graph]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["I_tr"].as_f64().unwrap() - 84.0).abs() < 1e-12);

    let args = ["integrate", graph, "-n", "20000", "--seed", "3", "--workers", "2"];
    let (code, first) = troquad(&cache, &args);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let (_, second) = troquad(&cache, &args);
    let a: EstimateReport = serde_json::from_str(&first).unwrap();
    let b: EstimateReport = serde_json::from_str(&second).unwrap();
    assert_eq!(a.estimate, b.estimate);
    assert_eq!(a.workers, 2);
    assert!((a.estimate[0] - 7.2123).abs() < 5.0 * a.std_error[0]);
}

#[test]
fn sample_lines_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("bubble.json");
    generate::bubble(1.0).save(&graph).unwrap();
    let (code, out) = troquad(dir.path(), &["sample", graph.to_str().unwrap(), "-n", "5"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 5);
    for line in out.lines() {
        let _: serde_json::Value = serde_json::from_str(line).unwrap();
    }
    let (code, out) = troquad(dir.path(), &["bench", "--sizes", "6,30", "-n", "1000"]);
    assert_eq!(code, 0);
    assert!(out.contains("skipped"));
}
