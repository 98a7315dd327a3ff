use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgstokes")).args(args).output().unwrap()
}

#[test]
fn unknown_problem_is_a_config_error() {
    let out = run(&["study", "--problem", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--problem"));
}

#[test]
fn bad_mesh_kind_is_a_config_error() {
    assert_eq!(run(&["study", "--mesh", "hex"]).status.code(), Some(2));
    assert_eq!(run(&["study", "--k", "4"]).status.code(), Some(2));
}

#[test]
fn degenerate_curve_is_a_numerical_failure() {
    let out = run(&["study", "--problem", "2", "--levels", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("level 1"));
}

#[test]
fn study_writes_csv() {
    let dir = std::env::temp_dir().join(format!("wgstokes-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("study.csv");
    let out = run(&["study", "--problem", "3", "--levels", "2", "--mesh", "quad", "--output", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,h,energy_err,energy_order,l2u_err,l2u_order,l2p_err,l2p_order");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("2,"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn check_is_deterministic() {
    let a = run(&["check", "--seed", "7"]);
    let b = run(&["check", "--seed", "7"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn patch_passes() {
    let out = run(&["patch", "--k", "2", "--mesh", "quad", "--levels", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn mesh_dump_starts_with_header() {
    let out = run(&["mesh-dump", "--levels", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("WGMESH 1\n"));
    assert!(text.contains("kind tri"));
}
