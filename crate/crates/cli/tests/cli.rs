use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn srm(cwd: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srm"))
        .current_dir(cwd)
        .args(args)
        .output()
        .expect("srm runs")
}

fn ok(cwd: &Path, args: &[&str]) -> String {
    let out = srm(cwd, args);
    assert!(
        out.status.success(),
        "srm {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/hand")
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn curves_for_figure_one_values() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["curves", "--b", "0.2,0.6,1.0,1.4"]);
    let table = rows(&dir.path().join("curves.csv"));
    assert_eq!(table.len(), 4 * 99);
    for row in &table {
        let (pd, rr, loss): (f64, f64, f64) =
            (row[1].parse().unwrap(), row[2].parse().unwrap(), row[3].parse().unwrap());
        assert!((loss - pd * (1.0 - rr)).abs() < 1e-12);
    }
    ok(dir.path(), &["curves", "--b", "0"]);
    assert!(rows(&dir.path().join("curves.csv")).iter().all(|r| r[2].parse::<f64>().unwrap() == 1.0));
    let out = srm(dir.path(), &["curves", "--b", "-0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(srm(dir.path(), &["nonsense"]).status.code(), Some(1));
    assert_eq!(srm(dir.path(), &["curves"]).status.code(), Some(1));
    std::fs::write(dir.path().join("bad.conf"), "b = 0.2\nunknown-key = 3\n").unwrap();
    assert_eq!(srm(dir.path(), &["--config", "bad.conf", "curves"]).status.code(), Some(1));
    assert_eq!(srm(dir.path(), &["simulate", "--sigma", "-1"]).status.code(), Some(1));
    assert_eq!(srm(dir.path(), &["--threads", "0", "curves", "--b", "1"]).status.code(), Some(1));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.conf"), "# Fig. 1\nb = 0.2, 0.6\ngrid_points = 9 # coarse\nout-dir = out\n").unwrap();
    ok(dir.path(), &["--config", "run.conf", "curves", "--grid-points", "19"]);
    assert_eq!(rows(&dir.path().join("out/curves.csv")).len(), 2 * 19);
    let echo = std::fs::read_to_string(dir.path().join("out/curves.resolved.conf")).unwrap();
    assert!(echo.contains("b = 0.2,0.6\n") && echo.contains("grid-points = 19\n"), "{echo}");
    // The echo reproduces the run.
    ok(dir.path(), &["--config", "out/curves.resolved.conf", "--out-dir", "again", "curves"]);
    assert_eq!(
        std::fs::read(dir.path().join("out/curves.csv")).unwrap(),
        std::fs::read(dir.path().join("again/curves.csv")).unwrap()
    );
}

#[test]
fn simulate_is_reproducible_and_thread_independent() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--seed", "5", "simulate", "--realizations", "10", "--firms", "2000"];
    ok(a.path(), &[&["--threads", "1"], &args[..]].concat());
    ok(b.path(), &[&["--threads", "4"], &args[..]].concat());
    assert_eq!(read_dir_bytes(a.path()), read_dir_bytes(b.path()));
    let table = rows(&a.path().join("simulate.csv"));
    assert_eq!(table.len(), 10);

    ok(a.path(), &["simulate", "--realizations", "50", "--firms", "1"]);
    for row in rows(&a.path().join("simulate.csv")) {
        assert!(row[1] == "0.0000000000000000e0" || row[1] == "1.0000000000000000e0", "{row:?}");
    }
}

#[test]
fn simulate_output_feeds_fit() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["simulate", "--realizations", "400", "--firms", "2000"]);
    let out = ok(dir.path(), &["fit", "--input", "simulate.csv"]);
    assert!(out.contains("b_hat"), "{out}");
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("fit_summary.json")).unwrap()).unwrap();
    let b_hat = summary["fits"][0]["b_hat"].as_f64().unwrap();
    assert!((b_hat - 0.08f64.sqrt()).abs() < 0.03, "{b_hat}");
    let report = std::fs::read_to_string(dir.path().join("fit_report.csv")).unwrap();
    assert!(report.starts_with("pd_mid,count,mean_loss,model_loss,mean_rr,model_rr\n"));
}

#[test]
fn hand_dataset_cohort_prints_rates() {
    let dir = tempfile::tempdir().unwrap();
    let data = fixture();
    let out = ok(
        dir.path(),
        &[
            "cohort",
            "--data-dir",
            data.to_str().unwrap(),
            "--first",
            "2000-01-01",
            "--last",
            "2000-01-01",
            "--ratings",
            "B1",
        ],
    );
    assert!(out.contains("pd=0.4 mean_rr=0.5"), "{out}");
    assert!(out.contains("n_c=6 n_w=1 n_d=2"), "{out}");
}

#[test]
fn invalid_data_exits_two_and_degenerate_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["issuers.csv", "ratings.csv", "events.csv"] {
        std::fs::copy(fixture().join(name), dir.path().join(name)).unwrap();
    }
    std::fs::write(
        dir.path().join("events.csv"),
        "issuer_id,event_type,date,recovery_rate\nA,default,2000-03-10,1.2\n",
    )
    .unwrap();
    let out = srm(dir.path(), &["cohort", "--first", "2000-01-01", "--last", "2000-01-01"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("events.csv:2"));

    std::fs::copy(fixture().join("events.csv"), dir.path().join("events.csv")).unwrap();
    // No issuer carries a Caa3 rating: every cohort is empty.
    let out = srm(dir.path(), &["cohort", "--ratings", "Caa3", "--first", "2000-01-01", "--last", "2000-06-01"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(rows(&dir.path().join("cohorts.csv")).len(), 6);

    std::fs::write(dir.path().join("flat.csv"), "pd,rr\n0.3,0.5\n0.3,0.5\n").unwrap();
    assert_eq!(srm(dir.path(), &["fit", "--input", "flat.csv"]).status.code(), Some(3));
}

#[test]
fn synthetic_round_trip_recovers_b() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(p, &["--seed", "3", "--out-dir", "data", "gen-data", "--b", "0.7", "--maturity", "1", "--issuers-per-rating", "300", "--last", "2005-12-01"]);
    ok(p, &["--out-dir", "data", "cohort", "--maturity", "1", "--last", "2005-12-01", "--split-ratings"]);
    ok(p, &["--out-dir", "data", "fit"]);
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(p.join("data/fit_summary.json")).unwrap()).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(p.join("data/manifest.json")).unwrap()).unwrap();
    let truth = manifest["b_by_maturity"]["1"].as_f64().unwrap();
    let b_hat = summary["fits"][0]["b_hat"].as_f64().unwrap();
    assert!((b_hat - truth).abs() <= 0.05, "{b_hat} vs {truth}");
    let out = ok(p, &["--out-dir", "data", "correlate"]);
    assert!(out.starts_with("pearson = -"), "{out}");
}

#[test]
fn pipeline_outputs_are_byte_identical_across_runs_and_threads() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(a.path(), "1"), (b.path(), "3")] {
        let base = ["--threads", threads, "--seed", "9"];
        let run = |extra: &[&str]| ok(dir, &[&base[..], extra].concat());
        run(&["gen-data", "--maturity", "1", "--issuers-per-rating", "50", "--last", "2001-06-01"]);
        run(&["cohort", "--last", "2001-06-01", "--split-ratings"]);
        run(&["correlate"]);
        run(&["fit", "--min-count", "2", "--bins", "10"]);
        run(&["simulate", "--realizations", "20", "--firms", "300"]);
        run(&["curves", "--b", "0.5"]);
    }
    let (x, y) = (read_dir_bytes(a.path()), read_dir_bytes(b.path()));
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 15, "{}", x.len());
    for ((nx, bx), (ny, by)) in x.iter().zip(&y) {
        assert_eq!(nx, ny);
        assert!(bx == by, "{nx} differs");
    }
}
