use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use sassenfeld_cli::mmio;
use sassenfeld_core::{fdm_matrix, ComplexMatrix, C64};
use serde_json::Value;

fn exe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sassenfeld"))
}

fn run(args: &[&str]) -> Output {
    exe().args(args).output().unwrap()
}

fn run_with_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = exe()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_text(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_writes_file_and_prints_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.mtx");
    let o = run(&["gen", "fdm", "4", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), path.to_str().unwrap());
    assert_eq!(mmio::read_matrix(&path).unwrap(), fdm_matrix(4).unwrap());

    let o = run(&["gen", "fdm", "3"]);
    let a = mmio::read_matrix_from(o.stdout.as_slice()).unwrap();
    assert_eq!(a, fdm_matrix(3).unwrap());
}

#[test]
fn index_fdm10_iterative_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = run(&[
        "index",
        "fdm:10",
        "--precond",
        "gauss-seidel",
        "--iterative",
        "--s0",
        "ones",
        "--json",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&report);
    assert_eq!(v["sassenfeld"]["mu"], 0.998046875);
    assert_eq!(v["sassenfeld"]["index_settled_at"], 9);
    assert_eq!(v["sassenfeld"]["start_vector"], "ones");
    assert_eq!(v["sassenfeld"]["certified_bound"], true);
    assert_eq!(v["condition_bound"], 1023.0);
    assert_eq!(v["preconditioner"]["strategy"], "forward-substitution");
    assert_eq!(v["input"]["generator"]["m"], 10);
    assert_eq!(v["outcome"]["exit_code"], 0);
}

#[test]
fn jacobi_fdm5_is_marginal() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = run(&[
        "index",
        "fdm:5",
        "--precond",
        "jacobi",
        "--json",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&report);
    assert_eq!(v["sassenfeld"]["mu"], 1.0);
    assert_eq!(v["sassenfeld"]["class"], "marginal");
    assert_eq!(v["condition_bound"], Value::Null);
}

#[test]
fn check_h_singular_comparison_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let ones = write_text(
        dir.path(),
        "ones.mtx",
        "%%MatrixMarket matrix array real general\n2 2\n1\n1\n1\n1\n",
    );
    let report = dir.path().join("r.json");
    let o = run(&["check-h", &ones, "--json", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("singular comparison matrix"));
    let v = json(&report);
    assert_eq!(v["h_matrix"]["verdict"], "not-h");
    assert_eq!(v["h_matrix"]["reason"], "singular comparison matrix");
}

#[test]
fn check_h_writes_witness() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("u.mtx");
    let o = run(&[
        "check-h",
        "fdm:5",
        "--witness",
        w.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let u = mmio::read_vector(&w).unwrap();
    let expected = [2.5, 4.0, 4.5, 4.0, 2.5];
    for (x, e) in u.iter().zip(expected) {
        assert!((x.re - e).abs() < 1e-12);
    }
}

#[test]
fn stdin_input() {
    let mut buf = Vec::new();
    mmio::write_matrix(&mut buf, &fdm_matrix(2).unwrap()).unwrap();
    let o = run_with_stdin(&["check-h", "-"], &buf);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: is-h"));
}

#[test]
fn custom_preconditioner_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.mtx");
    let gs = fdm_matrix(6).unwrap().lower_with_diagonal();
    mmio::write_to_path(&p, |w| mmio::write_matrix(w, &gs)).unwrap();
    let report = dir.path().join("r.json");
    let spec = format!("file:{}", p.display());
    let o = run(&[
        "index",
        "fdm:6",
        "--precond",
        &spec,
        "--json",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&report);
    assert_eq!(v["preconditioner"]["kind"], "custom");
    assert_eq!(v["sassenfeld"]["mu"], 1.0 - 2f64.powi(-5));
}

#[test]
fn preconditioner_not_h_is_negative() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_text(
        dir.path(),
        "p.mtx",
        "%%MatrixMarket matrix array real general\n2 2\n1\n1\n1\n1\n",
    );
    let spec = format!("file:{p}");
    let o = run(&["index", "fdm:2", "--precond", &spec]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("preconditioner H-verdict: not-h"));
}

#[test]
fn certify_reports_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let t = dir.path().join("t.mtx");
    let o = run(&[
        "certify",
        "fdm:2",
        "--json",
        report.to_str().unwrap(),
        "--witness",
        t.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&report);
    assert_eq!(v["certificate"]["alpha"], 1.0);
    assert_eq!(v["certificate"]["t"], serde_json::json!([1.0, 1.0]));
    assert_eq!(v["certificate"]["min_margin"], 1.0);
    let t = mmio::read_vector(&t).unwrap();
    assert_eq!(t, vec![C64::new(1.0, 0.0); 2]);

    // Jacobi on FDM is marginal, so no certificate is issued.
    let o = run(&[
        "certify",
        "fdm:4",
        "--precond",
        "jacobi",
        "--json",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&report)["certificate"], Value::Null);
}

#[test]
fn solve_modes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let x = dir.path().join("x.mtx");
    let o = run(&[
        "solve",
        "fdm:10",
        "ones",
        "--residual-tol",
        "1e-12",
        "-o",
        x.to_str().unwrap(),
        "--json",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&report);
    let bounds = v["solve"]["bounds"].as_array().unwrap();
    let residuals = v["solve"]["residuals"].as_array().unwrap();
    assert_eq!(bounds.len(), residuals.len());
    assert!(residuals.last().unwrap().as_f64().unwrap() <= 1e-12);
    assert_eq!(v["solve"]["initial_error"], "residual-surrogate");
    // Solution of the FDM system with b = e is x_i = i (m + 1 - i) / 2.
    let sol = mmio::read_vector(&x).unwrap();
    for (i, v) in sol.iter().enumerate() {
        let k = (i + 1) as f64;
        assert!((v.re - k * (11.0 - k) / 2.0).abs() < 1e-9);
    }

    let o = run(&["solve", "fdm:10", "ones", "--precond", "jacobi"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("--best-effort"));

    let o = run(&[
        "solve",
        "fdm:10",
        "ones",
        "--precond",
        "jacobi",
        "--best-effort",
        "--json",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&report)["solve"]["bounds"], Value::Null);

    let o = run(&["solve", "fdm:10", "ones", "--max-iter", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let o = run(&["certify", "fdm:7", "--json", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let ta = std::fs::read_to_string(&a).unwrap();
    assert_eq!(ta, std::fs::read_to_string(&b).unwrap());

    // Parsing and re-serializing reproduces every number bit-for-bit.
    let report: sassenfeld_cli::report::AnalysisReport = serde_json::from_str(&ta).unwrap();
    assert_eq!(report.to_json() + "\n", ta);
}

#[test]
fn json_to_stdout() {
    let o = run(&["index", "fdm:3", "--json", "-"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["sassenfeld"]["mu"], 0.75);
}

#[test]
fn errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["index", dir.path().join("missing.mtx").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error:"));

    let rect = write_text(
        dir.path(),
        "rect.mtx",
        "%%MatrixMarket matrix array real general\n2 3\n1\n2\n3\n4\n5\n6\n",
    );
    let o = run(&["check-h", &rect]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("not square"));

    let bad = write_text(
        dir.path(),
        "bad.mtx",
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n% note\n5 1 1.0\n",
    );
    let o = run(&["check-h", &bad]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));

    let o = run(&["index", "fdm:3", "--precond", "sor"]);
    assert_eq!(o.status.code(), Some(3));

    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(3));

    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn invalid_start_vector_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let s0 = dir.path().join("s0.mtx");
    mmio::write_to_path(&s0, |w| mmio::write_real_vector(w, &[0.0; 4])).unwrap();
    let o = run(&[
        "index",
        "fdm:4",
        "--iterative",
        "--s0",
        s0.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("--s0 auto"));

    let o = run(&["index", "fdm:4", "--iterative", "--s0", "auto"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn complex_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let a = ComplexMatrix::from_rows(vec![
        vec![C64::new(3.0, 1.0), C64::new(0.0, 1.0)],
        vec![C64::new(1.0, -1.0), C64::new(0.0, -4.0)],
    ])
    .unwrap();
    let path = dir.path().join("c.mtx");
    mmio::write_to_path(&path, |w| mmio::write_matrix(w, &a)).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("%%MatrixMarket matrix array complex general"));
    let o = run(&["certify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}
