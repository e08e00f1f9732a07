use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tikhreg(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tikhreg"))
        .args(args)
        .current_dir(cwd)
        .env_remove("TIKHREG_OUT")
        .output()
        .unwrap()
}

fn json(path: impl AsRef<Path>) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unknown_flag_is_a_usage_error_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tikhreg(&["sweep", "--n", "50", "--frobnicate", "--out-dir", "x"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!tmp.path().join("x").exists());
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn out_of_range_values_name_the_flag_and_range() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str, &str); 5] = [
        (&["spectrum", "--n", "1"], "--n", "[2, 20000]"),
        (&["sweep", "--delta", "-0.1"], "--delta", "[0, ∞)"),
        (&["adaptive", "--alpha", "1"], "--alpha", "(1, ∞)"),
        (&["study", "--reps", "50"], "--reps", "[100, 10000000]"),
        (&["montecarlo", "--threads", "0"], "--threads", "1..=1024"),
    ];
    for (args, flag, range) in cases {
        let o = tikhreg(args, tmp.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let msg = stderr(&o);
        assert!(msg.contains(flag) && msg.contains(range), "{args:?}: {msg}");
    }
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn cross_flag_checks_are_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tikhreg(&["sweep", "--n", "40", "--lo", "1e-2", "--hi", "1e-3"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let o = tikhreg(&["table", "--sides", "10"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let o = tikhreg(&["spectrum", "--input", "missing.prob"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let o = tikhreg(&["spectrum", "--input", "p.prob", "--n", "30"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn runtime_failures_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    // eight modes are too few for the decay fit
    let o = tikhreg(&["spectrum", "--n", "8", "--out-dir", "s"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("need at least 14"));
    assert!(!tmp.path().join("s").exists());

    fs::write(tmp.path().join("junk.prob"), b"not a problem").unwrap();
    let o = tikhreg(&["spectrum", "--input", "junk.prob"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn spectrum_of_fredholm_400() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tikhreg(&["spectrum", "--problem", "fredholm", "--n", "400", "--out-dir", "s"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let side = json(tmp.path().join("s/spectrum.json"));
    let alpha = side["alpha_hat"].as_f64().unwrap();
    assert!((3.8..=4.2).contains(&alpha), "{alpha}");
    let csv = fs::read_to_string(tmp.path().join("s/spectrum.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("k,rho,envelope"));
    assert_eq!(csv.lines().count() - 1, side["m"].as_u64().unwrap() as usize);
    let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[1].split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
}

#[test]
fn adaptive_trace_for_table_setting_is_short() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tikhreg(
        &[
            "adaptive", "--problem", "fredholm", "--n", "2000", "--delta", "0.1", "--tol", "1e-10", "--stop", "absolute",
            "--out-dir", "a",
        ],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = fs::read_to_string(tmp.path().join("a/trace.csv")).unwrap().lines().count() - 1;
    assert!(rows <= 20, "{rows} trace rows");
    let summary = json(tmp.path().join("a/adaptive.json"));
    assert_eq!(summary["terminated"], "converged");
    assert_eq!(summary["iters"].as_u64().unwrap() as usize + 1, rows);
}

#[test]
fn generated_problem_files_feed_other_commands() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(tikhreg(&["generate", "--n", "120", "--out-dir", "g"], tmp.path()).status.success());
    assert!(tikhreg(&["spectrum", "--input", "g/problem.prob", "--out-dir", "from-file"], tmp.path()).status.success());
    assert!(tikhreg(&["spectrum", "--n", "120", "--out-dir", "direct"], tmp.path()).status.success());
    let a = fs::read(tmp.path().join("from-file/spectrum.csv")).unwrap();
    let b = fs::read(tmp.path().join("direct/spectrum.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn every_output_directory_has_a_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let runs: [(&str, &[&str]); 8] = [
        ("generate", &["--n", "30"]),
        ("spectrum", &["--n", "60"]),
        ("solve", &["--n", "60", "--solver", "direct"]),
        ("sweep", &["--n", "60"]),
        ("adaptive", &["--n", "60"]),
        ("montecarlo", &["--ns", "40,60", "--deltas", "0.1,0.01", "--reps", "4"]),
        ("study", &["--n", "60", "--reps", "100", "--bins", "10"]),
        ("table", &["--ns", "40", "--deltas", "0.1"]),
    ];
    for (cmd, extra) in runs {
        let mut args = vec![cmd];
        args.extend_from_slice(extra);
        let o = tikhreg(&args, tmp.path());
        assert!(o.status.success(), "{cmd}: {}", stderr(&o));
        let stdout = String::from_utf8_lossy(&o.stdout);
        assert_eq!(stdout.lines().count(), 1, "{cmd}: {stdout}");
        let dir = tmp.path().join("tikhreg-out").join(cmd);
        let m = json(dir.join("manifest.json"));
        assert_eq!(m["command"], cmd);
        assert!(m["parameters"].is_object());
        for f in m["files"].as_array().unwrap() {
            assert!(dir.join(f.as_str().unwrap()).is_file(), "{cmd}: {f}");
        }
    }
}

#[test]
fn environment_overrides_default_output_root() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tikhreg"))
        .args(["spectrum", "--n", "40"])
        .current_dir(tmp.path())
        .env("TIKHREG_OUT", tmp.path().join("elsewhere"))
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(tmp.path().join("elsewhere/spectrum/spectrum.csv").is_file());
    assert!(!tmp.path().join("tikhreg-out").exists());
}

#[test]
fn config_files_fill_flags_and_refuse_conflicts() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("run.cfg"), "# sweep setup\nn = 80\ndelta = 0.05\nrule = w\nthreads = 2\n").unwrap();
    let o = tikhreg(&["sweep", "--config", "run.cfg", "--out-dir", "a"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let m = json(tmp.path().join("a/manifest.json"));
    assert_eq!(m["resolved"]["n"], 80);
    assert_eq!(m["parameters"]["noise"]["delta"], 0.05);
    assert_eq!(m["parameters"]["rule"]["rule"], "w");
    assert_eq!(m["threads"], 2);

    let o = tikhreg(&["sweep", "--config", "run.cfg", "--n", "90", "--out-dir", "b"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--n"));
    assert!(!tmp.path().join("b").exists());

    fs::write(tmp.path().join("bad.cfg"), "reps = 10\n").unwrap();
    let o = tikhreg(&["sweep", "--config", "bad.cfg", "--out-dir", "c"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`reps`"));

    fs::write(tmp.path().join("range.cfg"), "n = 1\n").unwrap();
    let o = tikhreg(&["sweep", "--config", "range.cfg", "--out-dir", "d"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!tmp.path().join("c").exists() && !tmp.path().join("d").exists());
}

#[test]
fn seeds_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    for (seed, dir) in [("1", "a"), ("2", "b")] {
        let o = tikhreg(&["sweep", "--n", "60", "--seed", seed, "--out-dir", dir], tmp.path());
        assert!(o.status.success());
    }
    let a = fs::read(tmp.path().join("a/sweep.csv")).unwrap();
    let b = fs::read(tmp.path().join("b/sweep.csv")).unwrap();
    assert_ne!(a, b);
}
