use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shrubflow")).args(args).output().expect("run shrubflow")
}

fn shrub(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", "shrubs", &format!("{name}.json")].iter().collect();
    p.display().to_string()
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("json output")
}

fn path(d: &Path, name: &str) -> String {
    d.join(name).display().to_string()
}

#[test]
fn implicitize_reports_and_rejects_small_k() {
    let o = bin(&["implicitize", "--k", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "k3.json");
    let o = bin(&["implicitize", "--k", "3", "--out", &out]);
    assert!(o.status.success());
    let r = json(&o.stdout);
    assert!(r["residual"]["max"].as_f64().unwrap() < 1e-12);
    assert_ne!(r["value_at_origin"], "0");
    let curve = json(&std::fs::read(&out).unwrap());
    assert_eq!(curve["k"], 3);
    assert!(!curve["polynomial"].as_str().unwrap().is_empty());

    let o = bin(&["implicitize", "--k", "4", "--check", "astroid"]);
    let r = json(&o.stdout);
    assert_eq!(r["astroid"]["zero_set_agrees"], true);
    assert_eq!(r["astroid"]["float_disagreements"], 0);
    assert_eq!(bin(&["implicitize", "--k", "5", "--check", "astroid"]).status.code(), Some(2));
}

#[test]
fn classify_puncture_sets() {
    for (name, t) in [("lone_leaf", 0), ("arc", 2), ("prickly_cactus", 2), ("star", 4)] {
        let o = bin(&["classify", &shrub(name)]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let r = json(&o.stdout);
        assert_eq!(r["punctures"].as_array().unwrap().len(), t, "{name}");
        assert_eq!(r["check"]["ok"], true);
    }
    let r = json(&bin(&["classify", &shrub("prickly_cactus")]).stdout);
    assert_eq!(r["very_simple"], false);
    assert_eq!(r["odd_cactuses"].as_array().unwrap().len(), 1);
}

#[test]
fn invalid_input_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.json");
    std::fs::write(&bad, r#"{"pieces":[{"sprig":{}}],"junctions":[{"bud":0,"at":[{"piece":3,"site":"end0"}]}]}"#).unwrap();
    assert_eq!(bin(&["classify", &bad]).status.code(), Some(2));
    assert_eq!(bin(&["classify", &path(dir.path(), "missing.json")]).status.code(), Some(2));
    let out = path(dir.path(), "b.json");
    // the canonical leaf covers the south pole
    let o = bin(&["synthesize", &shrub("lone_leaf"), "--root", "canonical", "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("south pole"));
    assert_eq!(bin(&["synthesize", "--builtin", "nothing", "--out", &out]).status.code(), Some(2));

    assert!(bin(&["synthesize", "--builtin", "equator", "--out", &out]).status.success());
    let cfg = path(dir.path(), "cfg.json");
    std::fs::write(&cfg, r#"{"horizon": -1}"#).unwrap();
    let o = bin(&["simulate", &out, "--config", &cfg, "--out-dir", &path(dir.path(), "run")]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&cfg, r#"{"horizon": 1, "typo": 3}"#).unwrap();
    let o = bin(&["simulate", &out, "--config", &cfg, "--out-dir", &path(dir.path(), "run")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn synthesize_the_equator_and_a_framed_deltoid() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "eq.json");
    let o = bin(&["synthesize", "--builtin", "equator", "--out", &out]);
    assert!(o.status.success());
    let r = json(&o.stdout);
    assert!(r["tangency"]["max_normalized"].as_f64().unwrap() < 1e-12);
    let b = json(&std::fs::read(&out).unwrap());
    assert_eq!(b["factors"][0]["coeffs"], serde_json::json!(["0", "0", "1", "0"]));

    // a lone leaf synthesizes to a multiple of z
    let out = path(dir.path(), "leaf.json");
    assert!(bin(&["synthesize", &shrub("lone_leaf"), "--out", &out]).status.success());
    let b = json(&std::fs::read(&out).unwrap());
    assert_eq!(b["factors"][0]["coeffs"], serde_json::json!(["0", "0", "2", "0"]));

    let out = path(dir.path(), "deltoid.json");
    assert!(bin(&["synthesize", "--frame", "3", "--out", &out]).status.success());
    let o = bin(&["report", &out]);
    assert!(o.status.success());
    let r = json(&o.stdout);
    assert!(r["tangency"]["max_normalized"].as_f64().unwrap() < 1e-10);
    assert!(r["south_pole"]["relative_error"].as_f64().unwrap() < 1e-4);
    assert!(r["zero_set"]["max_field_norm"].as_f64().unwrap() < 1e-8);
}

#[test]
fn simulate_writes_per_seed_files_and_a_merged_report() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = path(dir.path(), "eq.json");
    assert!(bin(&["synthesize", "--builtin", "equator", "--out", &bundle]).status.success());
    let run = dir.path().join("run");
    let o = bin(&["simulate", &bundle, "--out-dir", &run.display().to_string(), "--seeds", "3", "--horizon", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&std::fs::read(run.join("report.json")).unwrap());
    assert_eq!(r["runs"].as_array().unwrap().len(), 3);
    assert_eq!(r["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(r["config"]["horizon"], 5.0);
    for s in 0..3 {
        let csv = std::fs::read_to_string(run.join(format!("seed_{s}.csv"))).unwrap();
        assert!(csv.starts_with("t,x,y,z,theta,w,step,err\n"));
        assert!(run.join(format!("seed_{s}.omega.json")).exists());
        let svg = std::fs::read_to_string(run.join(format!("seed_{s}.svg"))).unwrap();
        assert!(svg.contains("<polyline") && svg.contains("<circle"));
    }
    // a different config gives a different hash
    let run2 = dir.path().join("run2");
    assert!(bin(&["simulate", &bundle, "--out-dir", &run2.display().to_string(), "--horizon", "6", "--no-plot"]).status.success());
    let r2 = json(&std::fs::read(run2.join("report.json")).unwrap());
    assert_ne!(r["config_sha256"], r2["config_sha256"]);
    assert!(!run2.join("seed_0.svg").exists());
}

/// Plain time approaches Ω like 1/t, so the plain run needs a much longer
/// horizon; the attraction distances still agree within 2×.
#[test]
fn unit_speed_and_plain_time_agree() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = path(dir.path(), "eq.json");
    assert!(bin(&["synthesize", "--builtin", "equator", "--out", &bundle]).status.success());
    let directed = |args: &[&str], out: &str| -> f64 {
        let run = path(dir.path(), out);
        let mut all = vec!["simulate", bundle.as_str(), "--out-dir", run.as_str(), "--seed", "7", "--no-plot"];
        all.extend_from_slice(args);
        assert!(bin(&all).status.success());
        let r = json(&std::fs::read(Path::new(&run).join("report.json")).unwrap());
        r["runs"][0]["omega"]["directed"].as_f64().unwrap()
    };
    let unit = directed(&["--unit-speed", "--horizon", "80"], "unit");
    let plain = directed(&["--horizon", "2000"], "plain");
    assert!(unit < 1e-2 && plain < 1e-2);
    assert!(unit / plain < 2.0 && plain / unit < 2.0, "{unit:e} vs {plain:e}");
}

#[test]
fn orbits_into_an_exceptional_point_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = path(dir.path(), "arc.json");
    assert!(bin(&["synthesize", "--builtin", "arc", "--out", &bundle]).status.success());
    let run = dir.path().join("run");
    let o = bin(&["simulate", &bundle, "--out-dir", &run.display().to_string(), "--seed", "7", "--unit-speed", "--horizon", "40", "--no-plot"]);
    assert_eq!(o.status.code(), Some(3));
    let r = json(&std::fs::read(run.join("report.json")).unwrap());
    assert_eq!(r["failures"], 1);
    assert!(r["runs"][0]["error"].as_str().unwrap().contains("exceptional"));
}
