use std::process::{Command, Output};

fn awayfw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_awayfw")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_writes_identical_traces() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = ["a.csv", "b.csv"].iter().map(|n| dir.path().join(n)).collect();
    for p in &paths {
        let o = awayfw(&[
            "solve",
            "--problem",
            "family:simplex_face:3:0",
            "--solver",
            "afw",
            "--step-rule",
            "line_search_exact",
            "--nu",
            "1",
            "--max-iters",
            "100",
            "--gap-tol",
            "1e-12",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("k,f_value,h_k,gap,step_type,gamma,gamma_max,active_size\n"));
}

#[test]
fn solve_accepts_problem_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(
        &path,
        r#"{"name":"tiny","polytope":{"kind":"simplex","dim":2},
            "objective":{"a":[[1,0],[0,1]],"b":[-0.25,-0.5]}}"#,
    )
    .unwrap();
    let o = awayfw(&["solve", "--problem", path.to_str().unwrap(), "--solver", "fw", "--max-iters", "20"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().count() >= 2);
}

#[test]
fn constants_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = awayfw(&[
        "constants",
        "--problem",
        "family:simplex_interior:3:0",
        "--samples",
        "300",
        "--seed",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("cf        = 2.000000000000e0  [exact]"));
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.starts_with("cf,cf_minus,cf_away,mu_fw,mu_away,delta,pdirw,rho_fw,rho_away,provenance\n2,2,2,"));
}

#[test]
fn pdirw_of_a_segment() {
    let o = awayfw(&["geometry", "pdirw", "--polytope", "simplex:2", "--directions", "50", "--seed", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("pdirw = 1.414213562373"), "{}", stdout(&o));
}

#[test]
fn audit_passes_on_face_instance() {
    let o = awayfw(&["audit", "--problem", "family:simplex_face:3:0", "--solver", "afw", "--all-theorems"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("[PASS] AFW drop steps"));
    assert!(!s.contains("[FAIL]"));
}

#[test]
fn invariance_under_random_transform() {
    let o = awayfw(&["invariance", "--problem", "family:simplex_interior:3:0", "--transform", "random:7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("[PASS]").count(), 2);
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        &["solve", "--problem", "family:simplex_face:2:0"][..],
        &["solve", "--problem", "family:simplex_face:3:0", "--step-rule", "fixed_schedule"],
        &["invariance", "--problem", "family:simplex_face:3:0", "--transform", "shear:1"],
        &["geometry", "pdirw", "--polytope", "cube:3"],
        &["frobnicate"],
    ] {
        assert_eq!(awayfw(args).status.code(), Some(2), "{args:?}");
    }
}
