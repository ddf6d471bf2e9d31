use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smoothrig")).args(args).output().unwrap()
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["manifest"]["version"], env!("CARGO_PKG_VERSION"));
    v["report"].clone()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn decompose_annulus_with_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("a.svg");
    let r = report(&["decompose", "--config", &fixture("annulus.json"), "--svg", svg.to_str().unwrap()]);
    assert_eq!(r["domains"].as_array().unwrap().len(), 2);
    assert_eq!(num(&r["mu"]["value"]), 1.0);
    let text = std::fs::read_to_string(svg).unwrap();
    assert_eq!(text.matches(r#"class="domain""#).count(), 2);
    assert_eq!(text.matches(r#"class="oval""#).count(), 2);
}

#[test]
fn decompose_chain_svg_has_three_bands() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("c.svg");
    let r = report(&["decompose", "--config", &fixture("chain3.json"), "--svg", svg.to_str().unwrap()]);
    assert_eq!(num(&r["max_depth"]), 3.0);
    let text = std::fs::read_to_string(svg).unwrap();
    assert_eq!(text.matches(r#"class="domain""#).count(), 3);
}

#[test]
fn decompose_random_uses_seed() {
    let a = report(&["decompose", "--random", "7", "--seed", "3"]);
    let b = report(&["decompose", "--random", "7", "--seed", "3"]);
    let c = report(&["decompose", "--random", "7", "--seed", "4"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a["domains"].as_array().unwrap().len(), 7);
}

#[test]
fn bounds_annulus() {
    let r = report(&["bounds", "--config", &fixture("annulus.json"), "--degree", "2"]);
    assert_eq!(num(&r["remez_topological"]["value"]), 64.0);
    assert_eq!(r["remez_topological"]["formula"], "(4n/mu)^d");
    let ids: Vec<&str> = r["rigidity"]["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["formula_id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["topological_literal", "topological_composed"]);

    // three ovals needed in degree 3 are not there
    let r = report(&["bounds", "--config", &fixture("annulus.json"), "--degree", "3", "--lambda", "0.5"]);
    assert!(r["remez_topological"]["value"].is_null());
    assert!(num(&r["brudnyi_ganzburg"]["value"]) > 1.0);
}

#[test]
fn remez_lp_halfline() {
    let r = report(&["remez-lp", "--degree", "2", "--z", &fixture("halfline.csv"), "--grid", "1024"]);
    let v = num(&r["remez_constant"]["value"]);
    assert!((v - 17.0).abs() <= 0.05 * 17.0, "{v}");
    assert!((num(&r["inverse_remez"]["value"]) - 1.0 / v).abs() < 1e-12);
}

#[test]
fn remez_lp_on_configuration_boundaries() {
    let r = report(&[
        "remez-lp", "--degree", "1", "--z", &fixture("disk.json"), "--grid", "16", "--samples-per-oval", "64",
    ]);
    let v = num(&r["remez_constant"]["value"]);
    // linear functions: |a + <b, x>| peaks at |a| + |b| on the disk and
    // |a| + 0.9|b| on the circle, so the ratio is 1/0.9 up to polygon sampling
    assert!((v - 1.0 / 0.9).abs() < 2e-3, "{v}");
}

#[test]
fn rigidity_reports() {
    let r = report(&["rigidity", "--config", &fixture("ring.json"), "--degree", "2", "--lp", "--grid", "16"]);
    let bounds = r["rigidity"]["bounds"].as_array().unwrap();
    let from_remez = bounds.iter().find(|b| b["formula_id"] == "from_remez").unwrap();
    assert_eq!(from_remez["status"], "estimated");
    assert!(num(&from_remez["value"]) > 0.0);

    let r = report(&["rigidity-1d", "--zeros", "-1,0", "--z0", "1", "--fz0", "1", "--degree", "1"]);
    let b = &r["rigidity"]["bounds"][0];
    assert!((num(&b["value"]) - 1.0).abs() < 1e-15);
    assert_eq!(num(&r["floor"]["value"]), 0.5);
}

#[test]
fn curve_check_crossings() {
    let r = report(&[
        "curve-check", "--f", &fixture("paraboloid.json"), "--points", &fixture("ring_points.csv"), "--s", "3",
        "--degree", "3", "--tgrid", "128", "--config", &fixture("ring.json"),
    ]);
    assert!(num(&r["crossings"]["count"]) >= 4.0);
    assert!(r["composition"]["positivity_holds"].as_bool().unwrap());
}

#[test]
fn boxdim_square() {
    let r = report(&["boxdim", "--points", &fixture("square_points.csv"), "--scales", "0.25,0.125,0.0625,0.03125", "--degree", "1"]);
    assert!((num(&r["dimension"]["slope"]) - 2.0).abs() < 1e-12);
    assert_eq!(r["threshold"]["exceeds"], true);
}

#[test]
fn verify_proof_ring() {
    let r = report(&[
        "verify-proof", "--poly", &fixture("ring_poly.json"), "--config", &fixture("ring.json"), "--degree", "4",
        "--grid", "48", "--eps", "1e-4",
    ]);
    for d in r["pigeonhole"]["domains"].as_array().unwrap() {
        assert_eq!(d["interior_exceeds_boundary"], true);
        assert_eq!(d["has_critical_point"], true);
    }
    assert_eq!(r["bezout"]["verdict"], "consistent");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["bounds", "--degree", "2"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"ovals": [{"id": 1}]}"#).unwrap();
    let out = run(&["decompose", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vertices"));

    let far = dir.path().join("far.json");
    std::fs::write(&far, r#"{"ovals": [{"id": 1, "vertices": [[0,0],[2,0],[0,2]]}]}"#).unwrap();
    assert_eq!(run(&["decompose", "--config", far.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(
        run(&["decompose", "--config", far.to_str().unwrap(), "--allow-outside-ball"]).status.code(),
        Some(0)
    );

    let csv = dir.path().join("bad.csv");
    std::fs::write(&csv, "x,y\n0.1,0.2\n0.3,oops\n").unwrap();
    let out = run(&["boxdim", "--points", csv.to_str().unwrap(), "--degree", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column 2"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = run(&["rigidity-1d", "--zeros", "-1,1", "--z0", "0", "--degree", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(num(&v["report"]["rigidity"]["bounds"][0]["value"]), 2.0);
}
