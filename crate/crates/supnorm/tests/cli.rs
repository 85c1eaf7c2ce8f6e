use std::process::Command;
use supnorm::config::RunConfig;
use supnorm::suites::run;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_supnorm"))
}

#[test]
fn reports_are_byte_identical() {
    let cfg = RunConfig::default();
    let a = run("amplify", &cfg).unwrap();
    let b = run("amplify", &cfg).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.to_csv(), b.to_csv());
}

#[test]
fn seed_changes_random_draws() {
    let a = run("sl2", &RunConfig { seed: 1, ..RunConfig::default() }).unwrap();
    let b = run("sl2", &RunConfig { seed: 2, ..RunConfig::default() }).unwrap();
    assert_ne!(a.to_json(), b.to_json());
    assert!(a.passed() && b.passed());
}

#[test]
fn unknown_suite_is_rejected() {
    assert!(run("nope", &RunConfig::default()).is_err());
    let out = bin().arg("nope").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exponents_prints_ledger() {
    let out = bin().arg("exponents").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(Nλ)^5/24"));
    assert!(text.contains("exponents: 11/11 checks passed"));
}

#[test]
fn padic_at_p3_writes_reports() {
    let dir = std::env::temp_dir().join(format!("supnorm-cli-{}", std::process::id()));
    let out = bin().args(["padic", "--p", "3", "--r", "1", "--out"]).arg(&dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("padic.json")).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
    assert!(json["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    assert!(std::fs::read_to_string(dir.join("padic.csv")).unwrap().starts_with("suite,id,ref"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn config_file_and_validation() {
    let dir = std::env::temp_dir().join(format!("supnorm-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.cfg");
    std::fs::write(&path, "# bad prime\np = 15\n").unwrap();
    let out = bin().args(["padic", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // flags override the file
    let out = bin().args(["padic", "--p", "3", "--config"]).arg(&path).output().unwrap();
    assert!(out.status.success());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn failing_suite_exits_nonzero() {
    let out = bin().arg("archimedean").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL localisation.slope.smooth.A"));
}
