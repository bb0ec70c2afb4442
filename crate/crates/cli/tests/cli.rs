use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crystal-count")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn space_reports_isotropic_count() {
    let out = run(&["space", "--p", "3", "--sigma0", "2", "--brute-force"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["isotropic_count"], "20");
    assert_eq!(v["isotropic_enumerated"], "20");
    assert_eq!(v["space"]["dim"], 4);
}

#[test]
fn ortho_generic_sigma2() {
    let v = json(&run(&["ortho", "--p", "3", "--sigma0", "2", "--a", "[[1]]"]));
    assert_eq!(v["m"], 0);
    assert_eq!(v["order"], "2");
    assert_eq!(v["elements"].as_array().unwrap().len(), 2);
}

#[test]
fn datum_over_gf9_constant() {
    let out = run(&["datum", "--p", "3", "--sigma0", "2", "--a", "[[0,1]]"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["validation"]["is_strict"], true);
    assert_eq!(v["datum"]["V"]["dim"], 4);
}

#[test]
fn fm_formula_and_brute_force() {
    let v = json(&run(&["fm", "--p", "3", "--sigma0", "2", "--a", "[[1]]", "--brute-force"]));
    assert_eq!(v["formula_count"], "11");
    assert_eq!(v["bruteforce_count"], "11");
    let v = json(&run(&["fm", "--p", "3", "--sigma0", "11", "--a", "[1,1,1,1,1,1,1,1,1,1]"]));
    assert_eq!(v["formula_count"], "5230117552");
    assert_eq!(v["bruteforce_count"], Value::Null);
}

#[test]
fn bfield_extend_restrict_twist() {
    let dir = std::env::temp_dir().join(format!("crystal-count-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let ext = run(&["bfield", "extend", "--p", "3", "--sigma0", "1", "--b", "[[0,1],[1]]"]);
    assert!(ext.status.success(), "{}", String::from_utf8_lossy(&ext.stderr));
    let path = dir.join("ext.json");
    std::fs::write(&path, &ext.stdout).unwrap();
    let p = path.to_str().unwrap();

    let back = json(&run(&["bfield", "restrict", "--input", p]));
    assert_eq!(back["B"].as_array().unwrap().len(), 2);
    let datum = dir.join("datum.json");
    std::fs::write(&datum, serde_json::to_vec(&back["base"]).unwrap()).unwrap();
    let again = run(&["bfield", "extend", "--datum", datum.to_str().unwrap(), "--b", &back["B"].to_string()]);
    assert_eq!(again.stdout, ext.stdout);

    let t1 = run(&["bfield", "twist", "--input", p, "--lambda", "2"]);
    let t2 = run(&["bfield", "twist", "--input", p, "--lambda", "2"]);
    assert!(t1.status.success());
    assert_eq!(t1.stdout, t2.stdout);
    assert_eq!(run(&["bfield", "twist", "--input", p, "--lambda", "0"]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_exit_status() {
    let ok = run(&["verify", "isotropic"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = json(&ok);
    assert_eq!(v["passed"], 5);

    let bad = run(&["verify", "all", "--corrupt-gram"]);
    assert_eq!(bad.status.code(), Some(1));
    let v = json(&bad);
    let fails: Vec<&Value> = v["checks"].as_array().unwrap().iter().filter(|c| c["status"] == "FAIL").collect();
    assert!(!fails.is_empty());
    assert!(fails.iter().all(|c| c["note"].is_string()));
}

#[test]
fn budget_env_degrades_to_skipped() {
    let out = Command::new(env!("CARGO_BIN_EXE_crystal-count"))
        .args(["verify", "isotropic"])
        .env("CRYSTAL_COUNT_BUDGET", "100")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["skipped"].as_u64().unwrap() > 0);
}

#[test]
fn usage_errors() {
    let out = run(&["fm", "--p", "9", "--sigma0", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("prime"));
    assert_eq!(run(&["verify", "bogus"]).status.code(), Some(2));
}
