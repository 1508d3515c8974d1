use std::process::{Command, Output};

use serde_json::Value;

fn fodt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fodt")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn error_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("errors are printed as JSON")
}

#[test]
fn plan_for_drinkers() {
    let o = fodt(&["plan", "@drinkers"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "ΣLikes(X,Y) ≺ #_Y ≺ ΣSmokes(X) ≺ AGG(X) ≺ Σ#_Y[Popular(Y)]");
}

#[test]
fn check_agrees_with_oracle() {
    let o = fodt(&["check", "@friendship", "--size", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("relative error = 0e0"), "{out}");
    assert!(out.contains(": 6 groups"), "{out}");
}

#[test]
fn transitivity_is_rejected() {
    let o = fodt(&["infer", "@transitivity"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_json(&o)["error"], "not_liftable");
}

#[test]
fn missing_file_is_a_usage_error() {
    let o = fodt(&["parse", "/nonexistent/model.plm"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "semantic");
}

#[test]
fn oracle_cap_is_enforced() {
    let o = fodt(&["oracle", "@friendship", "--size", "6", "--cap", "10"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_json(&o)["error"], "cap_exceeded");
}

#[test]
fn scale_stays_finite_past_f64() {
    let dir = std::env::temp_dir().join(format!("fodt-scale-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("scale.json");
    let o = fodt(&["scale", "@smokers_pairwise", "--sizes", "8,32", "--emit-json", path.to_str().unwrap()]);
    assert!(o.status.success());
    let rows: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let last = &rows[1];
    assert_eq!(last["n"], 32);
    assert!(last["z"].as_str().unwrap().ends_with("e473"), "{last}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn generated_models_round_trip_through_check() {
    let dir = std::env::temp_dir().join(format!("fodt-gen-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for seed in 0..5 {
        let g = fodt(&["gen", "--seed", &seed.to_string()]);
        assert!(g.status.success());
        let path = dir.join(format!("m{seed}.plm"));
        std::fs::write(&path, &g.stdout).unwrap();
        let c = fodt(&["check", path.to_str().unwrap()]);
        assert!(c.status.success(), "seed {seed}: {}", String::from_utf8_lossy(&c.stderr));
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn analyze_names_the_offending_entry() {
    let o = fodt(&["analyze", "@transitivity"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("liftable: false"));
    assert!(out.contains("offending entry"), "{out}");
}
