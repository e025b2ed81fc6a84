use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavefront")).current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let o = run(dir, args);
    assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn samples(v: &Value) -> Vec<(f64, f64)> {
    v["samples"].as_array().unwrap().iter().map(|p| (p[0].as_f64().unwrap(), p[1].as_f64().unwrap())).collect()
}

#[test]
fn synth_writes_provenance() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["synth", "--kind", "prescribed-wf", "--dirs", "1,0", "--L", "16", "--n", "512", "--out", "bt.json"]);
    let v = json(t.path().join("bt.json"));
    assert_eq!(v["provenance"][0]["kind"], "prescribed-wf");
    assert_eq!(v["samples"].as_array().unwrap().len(), 512);

    ok(t.path(), &["synth", "--kind", "gaussian", "--center", "2", "--mod", "3", "--out", "g.json"]);
    let v = json(t.path().join("g.json"));
    assert_eq!(v["provenance"][0]["center"][0], 2.0);
}

#[test]
fn schema_and_usage_errors_exit_2() {
    let t = TempDir::new().unwrap();
    let o = run(t.path(), &["synth", "--kind", "nosuch", "--out", "x.json"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema"));
    assert!(!t.path().join("x.json").exists());
    assert_eq!(code(&run(t.path(), &["synth", "--kind", "hermite", "--k", "1", "--sigma", "2"])), 2);
    assert_eq!(code(&run(t.path(), &["verify", "nosuch"])), 2);
    assert_eq!(code(&run(t.path(), &["synth", "--kind", "constant", "--n", "100"])), 2);
    assert_eq!(code(&run(t.path(), &["bogus"])), 2);
    assert_eq!(code(&run(t.path(), &["synth", "-k", "1"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_wavefront"))
        .args(["verify", "oracle"])
        .env("WAVEFRONT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn wf_on_constant_and_psi() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["synth", "--kind", "constant", "--out", "c.json"]);
    ok(t.path(), &["wf", "--input", "c.json", "--out", "c_wf.json", "--profiles", "c.csv", "--field-dump", "c.bin"]);
    let r = json(t.path().join("c_wf.json"));
    let arcs = r["singular_arcs"].as_array().unwrap();
    assert_eq!(arcs.len(), 2);
    let mut mids: Vec<f64> = arcs
        .iter()
        .map(|a| {
            ((a["start"].as_f64().unwrap() + a["end"].as_f64().unwrap()) / 2.0).rem_euclid(2.0 * std::f64::consts::PI)
        })
        .collect();
    mids.sort_by(f64::total_cmp);
    let step = 2.0 * std::f64::consts::PI / 360.0;
    assert!(mids[0] <= step || mids[1] >= 2.0 * std::f64::consts::PI - step);
    assert!((mids.iter().map(|m| (m - std::f64::consts::PI).abs()).fold(f64::INFINITY, f64::min)) <= step);

    let csv = std::fs::read_to_string(t.path().join("c.csv")).unwrap();
    assert!(csv.starts_with("direction_index,omega0,omega1,r,s,used\n"));
    assert_eq!(csv.lines().count(), 1 + 360 * 12);
    assert_eq!(std::fs::metadata(t.path().join("c.bin")).unwrap().len(), 8 + 4 + 4 + 8 + 4 + 8 + 512 * 512 * 16);

    ok(t.path(), &["synth", "--kind", "hermite", "--k", "0", "--out", "psi.json"]);
    ok(t.path(), &["wf", "--input", "psi.json", "--out", "psi_wf.json"]);
    assert!(json(t.path().join("psi_wf.json"))["singular_arcs"].as_array().unwrap().is_empty());

    let o = run(t.path(), &["wf", "--input", "c.json", "--radii", "2,3,4,5,6,7,8,40"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn overrides_are_applied() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["synth", "--kind", "constant", "--out", "c.json"]);
    let o = ok(t.path(), &["wf", "--input", "c.json", "--n-dir", "180", "--eps-min", "0.5"]);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["config"]["n_dir"], 180);
    assert_eq!(r["config"]["eps_min"], 0.5);
    assert_eq!(r["directions"].as_array().unwrap().len(), 180);
    assert_eq!(code(&run(t.path(), &["wf", "--input", "c.json", "--eps-min", "abc"])), 2);
    assert_eq!(code(&run(t.path(), &["wf", "--input", "c.json", "--shell-width", "2"])), 2);
}

#[test]
fn op_pipelines() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["synth", "--kind", "prescribed-wf", "--dirs", "1,0", "--out", "bt.json"]);
    let four = r#"[{"op":"fourier"},{"op":"fourier"},{"op":"fourier"},{"op":"fourier"}]"#;
    ok(t.path(), &["op", "--input", "bt.json", "--pipeline", four, "--out", "bt4.json"]);
    let (a, b) = (json(t.path().join("bt.json")), json(t.path().join("bt4.json")));
    for (x, y) in samples(&a).iter().zip(samples(&b)) {
        assert!((x.0 - y.0).hypot(x.1 - y.1) < 1e-9);
    }
    assert_eq!(b["provenance"].as_array().unwrap().len(), 5);
    assert_eq!(b["provenance"][0]["kind"], "prescribed-wf");

    std::fs::write(t.path().join("p.json"), r#"[{"op":"schrodinger","t":0.5}]"#).unwrap();
    ok(t.path(), &["op", "--input", "bt.json", "--pipeline", "@p.json", "--out", "s.json"]);

    ok(t.path(), &["synth", "--kind", "hermite", "--k", "2", "--out", "h2.json"]);
    let harm = r#"[{"op":"polyop","coeffs":[{"alpha":[2],"beta":[0],"c":[1,0]},{"alpha":[0],"beta":[2],"c":[1,0]}]}]"#;
    ok(t.path(), &["op", "--input", "h2.json", "--pipeline", harm, "--out", "ph2.json"]);
    let (h, p) = (json(t.path().join("h2.json")), json(t.path().join("ph2.json")));
    for (x, y) in samples(&h).iter().zip(samples(&p)) {
        assert!((5.0 * x.0 - y.0).hypot(5.0 * x.1 - y.1) < 1e-6);
    }

    assert_eq!(code(&run(t.path(), &["op", "--input", "bt.json", "--pipeline", r#"[{"op":"warp"}]"#])), 2);
    let bad = r#"[{"op":"dilate","A":[[0.5]]}]"#;
    assert_eq!(code(&run(t.path(), &["op", "--input", "bt.json", "--pipeline", bad])), 3);
}

#[test]
fn verify_and_report() {
    let t = TempDir::new().unwrap();
    let start = std::time::Instant::now();
    ok(t.path(), &["verify", "oracle", "--out", "oracle.json"]);
    assert!(start.elapsed().as_secs_f64() < 10.0);
    let r = json(t.path().join("oracle.json"));
    assert_eq!(r["overall"], "pass");

    let o = run(t.path(), &["verify", "density", "--corpus", "psi", "--fault", "normalization", "--out", "d.json"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(t.path().join("d.json"))["overall"], "fail");

    let o = ok(t.path(), &["report", "--input", "oracle.json"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("oracle"));

    ok(t.path(), &["synth", "--kind", "constant", "--out", "c.json"]);
    ok(t.path(), &["wf", "--input", "c.json", "--out", "c_wf.json"]);
    let o = ok(t.path(), &["report", "--input", "c_wf.json", "--csv", "dirs.csv"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("2 singular components"));
    assert_eq!(std::fs::read_to_string(t.path().join("dirs.csv")).unwrap().lines().count(), 361);
}

#[test]
fn verify_all_aggregates() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["verify", "all", "--corpus", "psi,constant,bumps_01", "--out", "all.json"]);
    let all = json(t.path().join("all.json"));
    let reports = all.as_array().unwrap();
    assert_eq!(reports.len(), 5);
    assert!(reports.iter().all(|r| r["overall"] == "pass"));
    let o = ok(t.path(), &["report", "--input", "all.json"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 5);
}
