use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvegraph")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn ntc_text_ends_with_total() {
    let o = bin(&["ntc", &data("theta.json")]);
    assert!(o.status.success());
    let last = stdout(&o).lines().last().unwrap().to_string();
    assert!(last.starts_with("ntc_total = 9.42477"), "{last}");
}

#[test]
fn ntc_json_selects_functional() {
    let o = bin(&["ntc", &data("square.json"), "--functional", "tc", "--format", "json"]);
    let v = json(&o);
    assert!((v["tc_total"].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    assert!(v.get("ntc_total").is_none());
}

#[test]
fn minimize_family() {
    let o = bin(&["minimize", "--family", "complete:5"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["ntc_star"], "6*pi");
}

#[test]
fn minimize_combinatorial_document() {
    let dir = std::env::temp_dir().join(format!("curvegraph-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("k33.json");
    let gen = bin(&["gen", "--family", "bipartite:3,3"]);
    std::fs::write(&path, &gen.stdout).unwrap();
    let o = bin(&["minimize", path.to_str().unwrap(), "--combinatorial"]);
    assert_eq!(json(&o)["ntc_star"], "5*pi");
}

#[test]
fn missing_input_exits_one() {
    assert_eq!(bin(&["crofton", "missing.json", "--seed", "1"]).status.code(), Some(1));
    assert_eq!(bin(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(bin(&["minimize", "--family", "wheel:1"]).status.code(), Some(1));
}

#[test]
fn crofton_agrees_and_is_reproducible() {
    let args = ["crofton", &data("butterfly.json"), "--samples", "20000", "--seed", "7"];
    let a = bin(&args);
    assert!(a.status.success());
    assert_eq!(json(&a)["agrees"], true);
    assert_eq!(a.stdout, bin(&args).stdout);
}

#[test]
fn mu_reports_fibers() {
    let o = bin(&["mu", &data("k4.json"), "--dir", "0.3,0.5,0.8", "--levels", "0.1"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["mu"], "2");
    let f = &v["fibers"][0];
    assert_eq!(f["crossings"], f["from_nlm"]);
}

#[test]
fn vertex_star() {
    let o = bin(&["vertex", "--tangents", "1,0,0;0,1,0"]);
    let v = json(&o);
    assert!((v["ntc"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
}

#[test]
fn heatmap_csv() {
    let o = bin(&["heatmap", &data("square.json"), "--resolution", "8"]);
    let s = stdout(&o);
    assert!(s.starts_with("lon,lat,mu_doubled,generic\n"));
    assert_eq!(s.lines().count(), 1 + 8 * 16);
}

#[test]
fn doublecover_circuits() {
    let o = bin(&["doublecover", &data("theta.json"), "--circuits", "3", "--nonreversing", "--seed", "3"]);
    let v = json(&o);
    let total = v["ntc_total"].as_f64().unwrap();
    for c in v["circuits"].as_array().unwrap() {
        assert_eq!(c["nonreversing"], true);
        assert!((c["half_curvature"].as_f64().unwrap() - total).abs() < 1e-9);
    }
}

#[test]
fn repro_single_experiment() {
    let o = bin(&["repro", "butterfly"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("PASS"));
    assert_eq!(bin(&["repro", "nothing"]).status.code(), Some(1));
}

#[test]
fn repro_failure_exits_two() {
    // The coplanar ctc values differ from the stated table.
    assert_eq!(bin(&["repro", "vertex-table"]).status.code(), Some(2));
}

#[test]
fn thread_cap_is_honoured() {
    let o = Command::new(env!("CARGO_BIN_EXE_curvegraph"))
        .args(["catalog"])
        .env("CURVEGRAPH_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_curvegraph"))
        .args(["catalog"])
        .env("CURVEGRAPH_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
