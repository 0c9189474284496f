use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robust-pomdp")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_rocksample_summary() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["gen", "--rocksample", "-m", "2", "-g", "1", "-t", "2", "--placement", "nearby", "--formulation", "me", "--out", "rs.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "9 states, 2 envs, 7 actions, 3 obs");
    let meta = &json(&d.path().join("rs.json"))["metadata"];
    assert_eq!(meta["generator"], "rocksample");
}

#[test]
fn gen_is_deterministic() {
    let d = TempDir::new().unwrap();
    for out in ["a.json", "b.json"] {
        let o = run(d.path(), &["gen", "--bird", "-s", "5", "-a", "3", "-n", "3", "--seed", "11", "--out", out]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(d.path().join("a.json")).unwrap(), std::fs::read(d.path().join("b.json")).unwrap());
}

#[test]
fn gen_parameter_errors_name_the_flag() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["gen", "--rocksample", "-g", "3", "-t", "2", "--out", "x.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("-g/--good"), "{}", stderr(&o));
    let o = run(d.path(), &["gen", "--bird", "--states", "1", "--out", "x.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--states"));
    let o = run(d.path(), &["gen", "--out", "x.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn info_reports_structure() {
    let d = TempDir::new().unwrap();
    run(d.path(), &["gen", "--bird", "--fixture", "--out", "bird.json"]);
    let o = run(d.path(), &["info", "--model", "bird.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).lines().next().unwrap(),
        "me-pomdp, 3 states, 3 envs, 2 actions, 2 obs, PO-MEMDP: no, MO-POMDP: no"
    );
    run(d.path(), &["gen", "--bird", "-s", "4", "-a", "3", "-n", "2", "--variant", "po-memdp", "--out", "po.json"]);
    let o = run(d.path(), &["info", "--model", "po.json"]);
    assert!(stdout(&o).contains("PO-MEMDP: yes"));
}

#[test]
fn info_rejects_invalid_files() {
    let d = TempDir::new().unwrap();
    run(d.path(), &["gen", "--bird", "--fixture", "--out", "bird.json"]);
    let text = std::fs::read_to_string(d.path().join("bird.json")).unwrap();
    // break one transition row's sum
    let broken = text.replacen("0.6", "0.9", 1);
    std::fs::write(d.path().join("bad.json"), broken).unwrap();
    let o = run(d.path(), &["info", "--model", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("invalid"));
    std::fs::write(d.path().join("junk.json"), "{ not json").unwrap();
    assert_eq!(run(d.path(), &["info", "--model", "junk.json"]).status.code(), Some(2));
}

#[test]
fn solve_pennies_exactly() {
    let d = TempDir::new().unwrap();
    run(d.path(), &["gen", "--pennies", "--out", "p.json"]);
    let o = run(d.path(), &["solve", "--model", "p.json", "--exact", "--horizon", "1", "--out-dir", "out"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&d.path().join("out/result.json"));
    assert!(r["lb"].as_f64().unwrap().abs() < 1e-7);
    let p = json(&d.path().join("out/policy.json"));
    let w: Vec<f64> = p["weights"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(w.len(), 2);
    assert!(w.iter().all(|x| (x - 0.5).abs() < 1e-7));
    // the mixture is safe in both environments
    let o = run(d.path(), &["eval", "--model", "p.json", "--policy", "out/policy.json"]);
    let e: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(e["worst_case_exact"].as_f64().unwrap().abs() < 1e-7);
}

#[test]
fn solve_rocksample_converges_and_is_reproducible() {
    let d = TempDir::new().unwrap();
    run(d.path(), &["gen", "--rocksample", "--formulation", "me", "--out", "rs.json"]);
    for out in ["a", "b"] {
        let o = run(d.path(), &["solve", "--model", "rs.json", "--deterministic", "--out-dir", out]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["result.json", "trace.csv", "policy.json"] {
        let a = std::fs::read(d.path().join("a").join(f)).unwrap();
        assert_eq!(a, std::fs::read(d.path().join("b").join(f)).unwrap(), "{f}");
    }
    let r = json(&d.path().join("a/result.json"));
    assert_eq!(r["converged"], true);
    let gap = r["gap"].as_f64().unwrap();
    let eps = r["config"]["epsilon"].as_f64().unwrap();
    assert!(gap <= eps + 1e-9);
    assert!((gap - (r["ub"].as_f64().unwrap() - r["lb"].as_f64().unwrap())).abs() < 1e-9);
    let trace = std::fs::read_to_string(d.path().join("a/trace.csv")).unwrap();
    assert!(trace.starts_with("iter,elapsed_s,lb,ub,gap\n"));
}

#[test]
fn solve_time_limit_exits_3_with_partial_trace() {
    let d = TempDir::new().unwrap();
    run(d.path(), &["gen", "--rocksample", "--formulation", "me", "--out", "rs.json"]);
    let o = run(d.path(), &["solve", "--model", "rs.json", "--time-limit", "0.001", "--out-dir", "out"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let trace = std::fs::read_to_string(d.path().join("out/trace.csv")).unwrap();
    assert!(trace.lines().count() >= 2);
    assert_eq!(json(&d.path().join("out/result.json"))["converged"], false);
}

#[test]
fn solve_rejects_malformed_models() {
    let d = TempDir::new().unwrap();
    std::fs::write(d.path().join("m.json"), r#"{"type":"me-pomdp","states":[]}"#).unwrap();
    assert_eq!(run(d.path(), &["solve", "--model", "m.json", "--out-dir", "o"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["solve", "--model", "missing.json", "--out-dir", "o"]).status.code(), Some(2));
}

#[test]
fn transform_chain_and_preconditions() {
    let d = TempDir::new().unwrap();
    run(d.path(), &["gen", "--bird", "--fixture", "--out", "bird.json"]);
    let o = run(d.path(), &["transform", "--model", "bird.json", "--to", "mo", "--out", "mo.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(d.path(), &["transform", "--model", "bird.json", "--to", "ab", "--out", "ab.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // two copies of each state per expert plus one sentinel each
    assert_eq!(stdout(&o).trim(), "21 states, 3 initial states, 2 actions, 3 obs");
    assert!(d.path().join("ab.json.record.json").exists());
    let o = run(d.path(), &["transform", "--model", "ab.json", "--to", "pomemdp", "--out", "pm.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(d.path(), &["info", "--model", "pm.json"]);
    assert!(stdout(&o).contains("PO-MEMDP: yes"), "{}", stdout(&o));
    let o = run(d.path(), &["transform", "--model", "pm.json", "--to", "mo", "--out", "mo.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(d.path(), &["transform", "--model", "ab.json", "--to", "posg", "--out", "g.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&d.path().join("g.json"))["type"], "posg");
    let o = run(d.path(), &["transform", "--model", "bird.json", "--to", "posg", "--out", "g2.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_single_environment_and_mismatch() {
    let d = TempDir::new().unwrap();
    run(d.path(), &["gen", "--pennies", "--out", "p.json"]);
    let single = r#"{"nodes":[{"action":"a1","next":{"z":0}}],"root":0}"#;
    std::fs::write(d.path().join("a1.json"), single).unwrap();
    std::fs::write(d.path().join("a2.json"), single.replace("a1", "a2")).unwrap();
    let o = run(d.path(), &["eval", "--model", "p.json", "--policy", "a1.json", "--optimal", "a1.json", "--optimal", "a2.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let e: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(e["worst_case_exact"].as_f64().unwrap(), -1.0);
    assert_eq!(e["misassumption"]["correct"], serde_json::json!([1.0, 1.0]));
    assert_eq!(e["misassumption"]["incorrect"], serde_json::json!([-1.0, -1.0]));
    std::fs::write(d.path().join("bad.json"), single.replace("a1", "C")).unwrap();
    let o = run(d.path(), &["eval", "--model", "p.json", "--policy", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_monte_carlo_is_seeded() {
    let d = TempDir::new().unwrap();
    run(d.path(), &["gen", "--bird", "--fixture", "--out", "bird.json"]);
    let dn = r#"{"nodes":[{"action":"DN","next":{"oL":0,"oH":0}}],"root":0}"#;
    std::fs::write(d.path().join("dn.json"), dn).unwrap();
    let args = ["eval", "--model", "bird.json", "--policy", "dn.json", "--episodes", "500", "--seed", "3", "--exact"];
    let a = run(d.path(), &args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&run(d.path(), &args)));
    let e: Value = serde_json::from_str(&stdout(&a)).unwrap();
    let exact = e["values_exact"][0].as_f64().unwrap();
    let mc = &e["values_mc"][0];
    // truncation at 200 steps costs at most γ^200·max|r|/(1−γ)
    assert!((mc["mean"].as_f64().unwrap() - exact).abs() < 4.0 * mc["std_err"].as_f64().unwrap() + 0.01);
}
