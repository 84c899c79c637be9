use std::path::Path;
use std::process::{Command, Output};

fn hilfer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hilfer")).args(args).output().unwrap()
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name).to_string_lossy().into_owned()
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = hilfer(&["run", "--config", &scenario("linear.toml"), "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 101);
    assert!(csv.starts_with("t,weighted_norm,z@y_1,"));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("converged=true"));
}

#[test]
fn builtin_matches_scenario_file() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (config, dir) in [("example-sec5".to_string(), &a), (scenario("example-sec5.toml"), &b)] {
        let o = hilfer(&["run", "--config", &config, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let read = |d: &tempfile::TempDir, f: &str| std::fs::read(d.path().join(f)).unwrap();
    assert_eq!(read(&a, "trajectory.csv"), read(&b, "trajectory.csv"));
    assert_eq!(read(&a, "report.txt"), read(&b, "report.txt"));
}

#[test]
fn thread_count_does_not_change_bytes() {
    let mut csvs = Vec::new();
    for threads in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let o = Command::new(env!("CARGO_BIN_EXE_hilfer"))
            .args(["run", "--config", "example-sec5", "--out", dir.path().to_str().unwrap()])
            .env("HILFER_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        csvs.push(std::fs::read(dir.path().join("trajectory.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[fracparams]\ngamma = 1.5\n").unwrap();
    let o = hilfer(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("alpha") && err.contains("gamma"), "{err}");

    std::fs::write(&bad, "[fracparams]\nalpha = 0.5\nalpha = 0.6\n").unwrap();
    let o = hilfer(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    assert_eq!(hilfer(&["run", "--config", "/does/not/exist.toml"]).status.code(), Some(2));
    assert_eq!(hilfer(&["converge", "--config", "example-sec5", "--levels", "1"]).status.code(), Some(2));
    assert_eq!(hilfer(&["verify", "--suite", "everything"]).status.code(), Some(2));
    assert_eq!(hilfer(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn non_convergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario("example-sec5.toml")).unwrap().replace("max_iter = 50", "max_iter = 2");
    let path = dir.path().join("short.toml");
    std::fs::write(&path, text).unwrap();
    let o = hilfer(&["run", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("converged=false"));
}

#[test]
fn verify_and_converge_succeed() {
    let o = hilfer(&["verify", "--suite", "specfun"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("sigma=3.5") && text.contains("0 failed"));

    let o = hilfer(&["converge", "--config", &scenario("linear.toml"), "--levels", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("monotone residual decrease: true"));
}
