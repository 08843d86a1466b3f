use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toricfib")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn polar_of_delta4() {
    let o = run(&["polytope", "polar", "--in", &fixture("delta4.json")]);
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    let mut want = vec!["(-1,-1,-1,-1)", "(-1,-1,-1,1)", "(-1,-1,2,-1)", "(-1,11,-1,-1)", "(23,-1,-1,-1)"];
    want.sort();
    let mut got = lines.clone();
    got.sort();
    assert_eq!(got, want);
}

#[test]
fn fibration_check_either_matrix_shape() {
    for m in ["1,1,4,6", "1;1;4;6"] {
        let o = run(&[
            "fan",
            "fibration-check",
            "--matrix",
            m,
            "--domain",
            &fixture("x4.json"),
            "--codomain",
            &fixture("p1.json"),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("fibration: true"));
        assert!(stdout(&o).contains("[x0^12 : x3^12]"));
    }
}

#[test]
fn incompatible_map_is_a_domain_error() {
    let o = run(&[
        "fan",
        "fibration-check",
        "--matrix",
        "1,0,0,0",
        "--domain",
        &fixture("x4.json"),
        "--codomain",
        &fixture("p1.json"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("\"code\": \"incompatible\""));
}

#[test]
fn polar_without_interior_point() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("simplex.json");
    std::fs::write(&p, r#"{"rank": 2, "vertices": [[0, 0], [1, 0], [0, 1]]}"#).unwrap();
    let o = run(&["polytope", "polar", "--in", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_str(&stderr(&o)).unwrap();
    assert_eq!(err["error"]["code"], "polar_undefined");
    assert!(err["error"]["message"].as_str().unwrap().contains("polar undefined"));
    assert!(err["error"]["context"].is_object());
}

#[test]
fn parse_and_io_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"rank\": 2, \"vertices\": [[1, 0], [0]]").unwrap();
    let o = run(&["polytope", "info", "--in", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("parse_error"));

    let missing = dir.path().join("missing.json");
    let o = run(&["polytope", "info", "--in", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("io_error"));

    let o = run(&["monodromy", "kodaira", "--matrix", "1,x;0,1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn outputs_are_deterministic() {
    let cases: Vec<Vec<String>> = vec![
        vec!["polytope".into(), "info".into(), "--json".into(), "--in".into(), fixture("delta5_polar.json")],
        vec!["cy".into(), "gkz".into(), "--json".into(), "--max-total".into(), "3".into()],
        vec!["fan".into(), "face-fan".into(), "--json".into(), "--in".into(), fixture("delta5_polar.json")],
        vec!["cy".into(), "nef-ci".into(), "--mode".into(), "vertices".into()],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success(), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn json_keys_are_sorted() {
    let o = run(&["polytope", "info", "--json", "--in", &fixture("delta4.json")]);
    let text = stdout(&o);
    let keys: Vec<&str> = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix('"').and_then(|r| r.split('"').next()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("hodge.txt");
    let o = run(&["cy", "hodge", "--in", &fixture("delta4.json"), "--out", p.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(p).unwrap(), "h11: 243\nh21: 3\n");
}

#[test]
fn kodaira_command() {
    let o = run(&["monodromy", "kodaira", "--matrix", "0,i;-i,-i", "--power", "6", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["power"], "[-1 0; 0 -1]");
    assert_eq!(v["type"], "I0*");
    let o = run(&["monodromy", "kodaira", "--matrix", "2,1;1,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn track_command() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("family.json");
    std::fs::write(&f, r#"{"polynomial": "y^2 - x"}"#).unwrap();
    let fam = f.to_str().unwrap();
    let o = run(&["monodromy", "track", "--family", fam, "--center", "0", "--radius", "0.5", "--base=-1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("permutation: (1 2)"));
}

#[test]
fn k3_commands() {
    let o = run(&["k3", "match", "--b", "B", "--psi0", "1", "--psi1", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("xi0: 1/1492992*B"));
    let o = run(&["k3", "params", "--model", "y", "--at", "u=1,v=1,xi1=0"]);
    assert!(stdout(&o).contains("sigma: 1\n"));
    let o = run(&["k3", "ade", "--in", &fixture("delta3.json"), "--direction", "1,2,3"]);
    assert!(stdout(&o).contains("components: 2"));
}

#[test]
fn only_gkz_runs_one_criterion() {
    let o = run(&["reproduce", "--only", "gkz"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains(" 8 gkz"));
    assert!(text.contains("all 1 criteria passed"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn reproduce_alias_and_unknown_filter() {
    let o = run(&["reproduce-paper", "--only", "hodge", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 1);
    let o = run(&["reproduce", "--only", "nothing-like-this"]);
    assert_eq!(o.status.code(), Some(1));
}

fn copy_fixtures(to: &Path) {
    for e in std::fs::read_dir(fixtures()).unwrap() {
        let e = e.unwrap();
        std::fs::copy(e.path(), to.join(e.file_name())).unwrap();
    }
}

#[test]
fn tampered_fixture_names_first_failure() {
    let dir = tempfile::tempdir().unwrap();
    copy_fixtures(dir.path());
    let p = dir.path().join("delta5_polar.json");
    let text = std::fs::read_to_string(&p).unwrap();
    let tampered = text.replacen("[0, 0, -1, -1, 1]", "[0, 0, -1, -1, 2]", 1);
    assert_ne!(text, tampered);
    std::fs::write(&p, tampered).unwrap();
    let o = run(&["reproduce", "--fixtures", dir.path().to_str().unwrap(), "--only", "fans"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["reproduce", "--fixtures", dir.path().to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["first_failure"], "reflexivity");
}

#[test]
fn tampered_polar_pair_fails_reflexivity() {
    let dir = tempfile::tempdir().unwrap();
    copy_fixtures(dir.path());
    let p = dir.path().join("delta4.json");
    let text = std::fs::read_to_string(&p).unwrap();
    let tampered = text.replacen("-12", "-10", 1);
    assert_ne!(text, tampered);
    std::fs::write(&p, tampered).unwrap();
    let o = run(&["reproduce", "--fixtures", dir.path().to_str().unwrap(), "--only", "reflexivity"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("first failure: 1 reflexivity"));
}
