use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grahtp"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn grahtp")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_exits_zero_and_lists_flags() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["solve-logistic", "solve-precision", "simulate-logistic", "simulate-precision", "diagnose", "gen-data"] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
    let out = run(&["solve-logistic", "--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for flag in ["--input", "--k", "--eta", "--max-iters", "--tol", "--seed", "--out", "--solver", "--lambda"] {
        assert!(text.contains(flag), "{flag} missing from help");
    }
}

#[test]
fn unknown_flag_exits_two() {
    assert_eq!(code(&run(&["solve-logistic", "--bogus"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn invalid_numeric_flags_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("tiny.libsvm");
    for bad in [["--k", "0"], ["--eta", "-1"], ["--tol", "nan"], ["--lambda", "-0.5"]] {
        let mut args = vec!["solve-logistic", "--input", s(&input), "--out", s(dir.path())];
        if bad[0] != "--k" {
            args.extend(["--k", "1"]);
        }
        args.extend(bad);
        assert_eq!(code(&run(&args)), 2, "{bad:?}");
    }
    // k larger than the dimension is caught after reading the data
    let out = run(&["solve-logistic", "--input", s(&input), "--k", "9", "--out", s(dir.path())]);
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["solve-logistic", "--input", "/nonexistent/data.libsvm", "--k", "1", "--out", s(dir.path())]);
    assert_eq!(code(&out), 2);
}

#[test]
fn parse_error_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.libsvm");
    fs::write(&input, "+1 1:1.0\n-1 2:x\n").unwrap();
    let out = run(&["solve-logistic", "--input", s(&input), "--k", "1", "--out", s(dir.path())]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn tiny_logistic_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("tiny.libsvm");
    let out = run(&["solve-logistic", "--input", s(&input), "--k", "1", "--out", s(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(summary.contains("iterations=") && summary.contains("objective=") && summary.contains("seconds="));
    let weights = fs::read_to_string(dir.path().join("weights.csv")).unwrap();
    let lines: Vec<&str> = weights.lines().collect();
    assert_eq!(lines[0], "index,value");
    assert_eq!(lines.len(), 4);
    // only the first feature separates the classes on its own
    assert!(lines[1].starts_with("0,") && lines[1] != "0,0");
    assert_eq!(&lines[2..], ["1,0", "2,0"]);
}

#[test]
fn solvers_differ_in_step_type() {
    let input = fixture("tiny.libsvm");
    let mut steps = Vec::new();
    for solver in ["grahtp", "fgrahtp"] {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&[
            "solve-logistic", "--input", s(&input), "--k", "1", "--lambda", "0.1", "--solver", solver, "--out",
            s(dir.path()),
        ]);
        assert_eq!(code(&out), 0, "{solver}: {}", String::from_utf8_lossy(&out.stderr));
        let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
        let step = trace.lines().nth(1).unwrap().split(',').nth(1).unwrap().to_string();
        steps.push(step);
    }
    assert_eq!(steps, ["debias", "truncate"]);
}

#[test]
fn iteration_cap_exits_four_with_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("tiny.libsvm");
    let out = run(&[
        "solve-logistic", "--input", s(&input), "--k", "1", "--solver", "fgrahtp", "--max-iters", "3", "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 4);
    assert!(dir.path().join("weights.csv").exists());
    assert_eq!(fs::read_to_string(dir.path().join("trace.csv")).unwrap().lines().count(), 4);
}

#[test]
fn modified_solver_rejected_for_logistic() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("tiny.libsvm");
    let out = run(&["solve-logistic", "--input", s(&input), "--k", "1", "--solver", "modified", "--out", s(dir.path())]);
    assert_eq!(code(&out), 2);
}

#[test]
fn precision_fixture_respects_cardinality() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("cov5.csv");
    let out = run(&["solve-precision", "--input", s(&input), "--n", "50", "--k", "2", "--out", s(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let edges = fs::read_to_string(dir.path().join("edges.csv")).unwrap();
    let rows: Vec<&str> = edges.lines().skip(1).collect();
    assert!(rows.len() <= 2);
    for r in rows {
        let f: Vec<usize> = r.split(',').take(2).map(|v| v.parse().unwrap()).collect();
        assert!(f[0] < f[1] && f[1] < 5);
    }
    let precision = fs::read_to_string(dir.path().join("precision.csv")).unwrap();
    assert_eq!(precision.lines().next(), Some("5,5"));
    assert_eq!(precision.lines().count(), 6);
}

#[test]
fn indefinite_covariance_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("cov.csv");
    fs::write(&input, "2,2\n1,3\n3,1\n").unwrap();
    let out = run(&["solve-precision", "--input", s(&input), "--n", "10", "--k", "1", "--out", s(dir.path())]);
    assert_eq!(code(&out), 2);
}

#[test]
fn diagnose_quadratic_hand_values() {
    let input = fixture("quad_diag.csv");
    let out = run(&["diagnose", "--objective", "quadratic", "--input", s(&input), "--s", "2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let get = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key}=")))
            .unwrap_or_else(|| panic!("{key} missing"))
            .parse()
            .unwrap()
    };
    // every 2-subset of diag(1, 2, 4): extremes 1 and 4
    assert_eq!(get("m_s"), 1.0);
    assert_eq!(get("M_s"), 4.0);
    assert_eq!(get("zeta"), 1.0 / 16.0);
    let rho = (1.0f64 - 2.0 / 16.0 + 16.0 / 256.0).sqrt();
    assert!((get("rho_s") - rho).abs() < 1e-15);
}

#[test]
fn diagnose_logistic_reports_constants() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("tiny.libsvm");
    let w = dir.path().join("w.csv");
    fs::write(&w, "index,value\n0,1.0\n").unwrap();
    let out = run(&["diagnose", "--objective", "logistic", "--input", s(&input), "--s", "2", "--reference", s(&w)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    for key in ["m_s=", "M_s=", "radius_s=", "bound_rho_s=", "restricted_gradient_norm=", "ridge_term="] {
        assert!(text.contains(key), "{key} missing");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# defaults\nk = 2\nn = 50\n").unwrap();
    let input = fixture("cov5.csv");
    let edges = |extra: &[&str]| -> usize {
        let out_dir = dir.path().join(format!("out{}", extra.len()));
        let mut args = vec!["solve-precision", "--config", s(&cfg), "--input", s(&input), "--out", s(&out_dir)];
        args.extend(extra);
        let out = run(&args);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        fs::read_to_string(out_dir.join("edges.csv")).unwrap().lines().count() - 1
    };
    assert_eq!(edges(&[]), 2);
    assert_eq!(edges(&["--k", "1"]), 1);

    fs::write(&cfg, "k = 2\nbogus_key = 1\n").unwrap();
    let out = run(&["solve-precision", "--config", s(&cfg), "--input", s(&input), "--n", "5", "--out", s(dir.path())]);
    assert_eq!(code(&out), 2);
}

#[test]
fn gen_data_round_trips_through_solvers() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = run(&["gen-data", "--kind", "logistic", "--p", "20", "--n", "60", "--k-true", "3", "--seed", "5", "--out", s(d)]);
    assert_eq!(code(&out), 0);
    let sol = d.join("sol");
    let out = run(&["solve-logistic", "--input", s(&d.join("data.libsvm")), "--dim", "20", "--k", "3", "--out", s(&sol)]);
    assert!(matches!(code(&out), 0 | 4));
    assert_eq!(fs::read_to_string(sol.join("weights.csv")).unwrap().lines().count(), 21);

    let out = run(&["gen-data", "--kind", "precision", "--p", "6", "--n", "40", "--seed", "5", "--out", s(d)]);
    assert_eq!(code(&out), 0);
    let out = run(&["solve-precision", "--input", s(&d.join("covariance.csv")), "--n", "40", "--k", "3", "--out", s(&sol)]);
    assert!(matches!(code(&out), 0 | 4));

    let out = run(&[
        "gen-data", "--kind", "least-squares", "--p", "12", "--n", "8", "--k-true", "2", "--seed", "5", "--out", s(d),
    ]);
    assert_eq!(code(&out), 0);
    let out = run(&["diagnose", "--objective", "least-squares", "--input", s(&d.join("design.csv")), "--s", "2"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn missing_required_generator_flag_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["gen-data", "--kind", "logistic", "--p", "5", "--n", "5", "--out", s(dir.path())]);
    assert_eq!(code(&out), 2);
}
