use std::io::Write;
use std::process::{Command, Output, Stdio};

use fmw_core::json::{fm_from_json, fm_to_json, w_from_json, w_to_json};
use serde_json::Value;

fn fmw(args: &[&str], stdin: Option<&str>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fmw"));
    cmd.args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .env_remove("FMW_VERBOSE");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("binary runs");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(s) = stdin {
            pipe.write_all(s.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

const PAIR: &str = r#"{"n":1,"k":2,"rho0":0.0625,"tree":[1,2],"vertex_configs":{"[1,2]":[[-1.0],[1.0]]},"edge_u":{}}"#;

#[test]
fn enumerate_three_leaves() {
    let o = fmw(&["enumerate-strata", "--k", "3"], None, &[]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["count"], 4);
    assert_eq!(v["by_codimension"][1], 3);
    assert_eq!(v["trees"].as_array().unwrap().len(), 4);
}

#[test]
fn beta_of_boundary_composite_has_unit_edge() {
    let composite = fmw(&["compose", "--i", "1"], Some(&format!("[{PAIR},{PAIR}]")), &[]);
    assert!(composite.status.success(), "{}", String::from_utf8_lossy(&composite.stderr));
    let o = fmw(&["beta"], Some(&stdout(&composite)), &[]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(r#""lengths":[1.0]"#), "{}", stdout(&o));
    let back = fmw(&["beta-inv"], Some(&stdout(&o)), &[]);
    assert_eq!(stdout(&back), stdout(&composite));
}

#[test]
fn roundtrip_report() {
    let args = ["roundtrip", "--n", "2", "--k", "4", "--trials", "1000", "--seed", "7"];
    let o = fmw(&args, None, &[]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["passed"], 1000);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["trials"], 1000);
    assert!(v["max_error"].as_f64().unwrap() < 1e-9);
    let again = fmw(&args, None, &[]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn check_commands_pass_and_are_deterministic() {
    for cmd in ["check-axioms", "check-equivariance", "check-seams"] {
        let args = [cmd, "--n", "2", "--k", "4", "--trials", "30", "--seed", "3"];
        let a = fmw(&args, None, &[]);
        assert!(a.status.success(), "{cmd}: {}", stdout(&a));
        let b = fmw(&args, None, &[]);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        assert!(json(&a).get("parts").is_none());
    }
}

#[test]
fn verbose_reports_list_parts() {
    let args = ["check-seams", "--k", "3", "--trials", "5"];
    let o = fmw(&args, None, &[("FMW_VERBOSE", "1")]);
    assert!(o.status.success());
    assert!(json(&o)["parts"].as_array().unwrap().len() >= 4);
}

#[test]
fn failing_check_exits_nonzero() {
    let o = fmw(&["check-seams", "--k", "3", "--trials", "10", "--tol", "1e-30"], None, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(json(&o)["failed"].as_u64().unwrap() > 0);
}

#[test]
fn emitted_json_reimports_identically() {
    for region in ["interior", "collar", "boundary", "mixed"] {
        let o = fmw(&["sample", "--n", "3", "--k", "5", "--seed", "9", "--region", region], None, &[]);
        let text = stdout(&o);
        let p = fm_from_json(text.trim()).unwrap();
        assert_eq!(fm_to_json(&p), text.trim());
        let w = fmw(&["beta"], Some(&text), &[]);
        let w_text = stdout(&w);
        let wp = w_from_json(w_text.trim()).unwrap();
        assert_eq!(w_to_json(&wp), w_text.trim());
    }
    let o = fmw(&["sample", "--space", "w", "--k", "5", "--count", "3"], None, &[]);
    assert_eq!(json(&o).as_array().unwrap().len(), 3);
}

#[test]
fn w_composition() {
    let ws = fmw(&["sample", "--space", "w", "--k", "3", "--count", "2", "--seed", "4"], None, &[]);
    let o = fmw(&["compose", "--space", "w", "--i", "2"], Some(&stdout(&ws)), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["k"], 5);
    assert!(v["lengths"].as_array().unwrap().contains(&Value::from(1.0)));
}

#[test]
fn dot_export() {
    let o = fmw(&["export-dot"], Some("[[1,2],3]"), &[]);
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("shape=box").count(), 3);
    let w = fmw(&["sample", "--space", "w", "--k", "4", "--seed", "1"], None, &[]);
    let o = fmw(&["export-dot"], Some(&stdout(&w)), &[]);
    assert!(stdout(&o).contains("label=\""));
}

#[test]
fn bad_input_is_reported() {
    let o = fmw(&["beta"], Some("{not json"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));

    let unnormalized = PAIR.replace("-1.0", "0.0");
    let o = fmw(&["beta"], Some(&unnormalized), &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("invariant"), "{err}");

    let mixed = format!("[{PAIR},{}]", PAIR.replace("0.0625", "0.05"));
    let o = fmw(&["compose", "--i", "1"], Some(&mixed), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rho0"));

    assert!(!fmw(&["frobnicate"], None, &[]).status.success());
    assert!(!fmw(&["enumerate-strata", "--k", "9"], None, &[]).status.success());
}
