use std::fs;
use std::process::{Command, Output};

fn braidfan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_braidfan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn phi_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    fs::write(
        path("f.json"),
        r#"{"d":3,"constant":"1/2","terms":[{"M":[1,3],"coeff":"-2/3"},{"M":[2],"coeff":"4"}]}"#,
    )
    .unwrap();
    let o = braidfan(&["phi-inv", "-i", &path("f.json"), "-o", &path("canon.json")]);
    assert!(o.status.success());
    let o = braidfan(&["phi", "-i", &path("canon.json"), "-o", &path("F.json")]);
    assert!(o.status.success());
    let o = braidfan(&["phi-inv", "-i", &path("F.json"), "-o", &path("back.json")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(path("canon.json")).unwrap(), fs::read(path("back.json")).unwrap());
}

#[test]
fn level_of_pair_max() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s12.json");
    let f = f.to_str().unwrap();
    assert!(braidfan(&["phi", "--target", "sigma:[1,2]", "--d", "3", "-o", f]).status.success());
    let o = braidfan(&["level", "-i", f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2");
    let o = braidfan(&["eval", "-i", f, "--point", "-1,1/2,7"]);
    assert_eq!(stdout(&o).trim(), "1/2");
}

#[test]
fn certify_reports_the_full_interval() {
    let o = braidfan(&["certify", "--target", "sigma:[1..5]", "--l", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "Certificate ((∅, {1,2,3,4,5}), -1, 4, exact4)");
    let o = braidfan(&["certify", "--target", "sigma:[1,2]", "--l", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_exit_codes() {
    let o = braidfan(&["verify", "prop51"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("-2"));
    let o = braidfan(&["verify", "prop51", "--mutate"]);
    assert_eq!(o.status.code(), Some(1));
    let o = braidfan(&["--json", "verify", "dims", "--d", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["status"], "pass");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(braidfan(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(braidfan(&["bound", "--l", "8", "--rule", "closed"]).status.code(), Some(2));
    assert_eq!(
        braidfan(&["build-max-net", "--d", "4", "--M", "1,2,3,4", "--ranks", "3"]).status.code(),
        Some(2)
    );
}

#[test]
fn check_predicates() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    fs::write(&f, r#"{"interval":{"X":[],"Y":[1,2]},"values":{"":"0","1":"2","2":"0","1,2":"-1"}}"#).unwrap();
    let o = braidfan(&["check", "hc", "-i", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "false");
}
