use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

const RUNNING: &str = "p cnf 4 8\n1 2 0\n-1 3 0\n-3 4 0\n-4 -2 0\n1 -2 0\n-1 -3 0\n3 -4 0\n4 2 0\n";

fn fsos() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fsos"));
    c.env_remove("FSOS_THREADS").env_remove("FSOS_ORACLE_LIMIT").env_remove("RUST_LOG");
    c
}

fn run(args: &[&str]) -> Output {
    fsos().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = fsos()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Scratch(tempfile::TempDir);

impl Scratch {
    fn new() -> Scratch {
        Scratch(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_owned()
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["build", "--help"])), 0);
    assert_eq!(code(&run(&[])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["build", "--mode", "sideways", "x.cnf"])), 64);
    let missing = run(&["oracle", "/nonexistent/f.cnf"]);
    assert_eq!(code(&missing), 64);
    assert!(stderr(&missing).contains("/nonexistent/f.cnf"));
}

#[test]
fn malformed_dimacs_is_a_usage_error() {
    let o = run_stdin(&["oracle", "-"], "p cnf 2 1\n1 7 0\n");
    assert_eq!(code(&o), 64);
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn oracle_golden_output() {
    let o = run_stdin(&["oracle", "-"], RUNNING);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(&lines[..3], ["n=4 m=8", "L_min=1", "L_max=3"]);
    assert!(lines[3].starts_with("witness_min="));
    assert!(lines[4].starts_with("witness_max="));
}

#[test]
fn oracle_above_limit_is_inapplicable() {
    let o = fsos()
        .args(["oracle", "-"])
        .env("FSOS_ORACLE_LIMIT", "3")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .and_then(|mut c| {
            c.stdin.take().unwrap().write_all(RUNNING.as_bytes())?;
            c.wait_with_output()
        })
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn bad_environment_is_a_usage_error() {
    let o = fsos().args(["oracle", "x"]).env("FSOS_THREADS", "many").output().unwrap();
    assert_eq!(code(&o), 64);
    assert!(stderr(&o).contains("FSOS_THREADS"));
}

#[test]
fn build_then_validate_with_every_method() {
    let dir = Scratch::new();
    let cnf = dir.write("run.cnf", RUNNING);
    let cert = dir.path("run.json");
    let o = run(&["build", &cnf, "-o", s(&cert)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(dir.path("run.txt").exists());
    for method in ["l1", "exhaustive"] {
        let v = run(&["validate", "--method", method, s(&cert), &cnf]);
        assert_eq!(code(&v), 0, "{method}: {}", stdout(&v));
        let report: serde_json::Value = serde_json::from_str(&stdout(&v)).unwrap();
        assert_eq!(report["verdict"], "ACCEPTED");
        assert_eq!(report["method"], method.to_uppercase());
    }
    // sampling tolerates only 1/(2 N^2) pointwise, far below this certificate's error
    let v = run(&["validate", "--method", "sampling", s(&cert), &cnf]);
    assert_eq!(code(&v), 2);
    let report: serde_json::Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(report["tolerance"], "1/242");
    assert!(report["witness"].is_string());
}

#[test]
fn build_reads_stdin_and_writes_stdout() {
    let o = run_stdin(&["build", "-", "--mode", "unsat", "--reproducible"], RUNNING);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let cert: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cert["mode"], "UNSAT");
    assert_eq!(cert["L"], 1);
}

#[test]
fn reproducible_builds_are_byte_identical() {
    let a = run_stdin(&["build", "-", "--reproducible"], RUNNING);
    let b = fsos()
        .args(["build", "-", "--reproducible"])
        .env("FSOS_THREADS", "2")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .and_then(|mut c| {
            c.stdin.take().unwrap().write_all(RUNNING.as_bytes())?;
            c.wait_with_output()
        })
        .unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("build_time_ms"));
}

#[test]
fn tampered_certificate_is_rejected() {
    let dir = Scratch::new();
    let cnf = dir.write("run.cnf", RUNNING);
    let built = run(&["build", &cnf, "--reproducible"]);
    let mut cert: serde_json::Value = serde_json::from_str(&stdout(&built)).unwrap();
    cert["numerators"][0]["coeffs"][0] = serde_json::Value::String("3".into());
    let path = dir.write("bad.json", &cert.to_string());
    let v = run(&["validate", &path, &cnf]);
    assert_eq!(code(&v), 2, "{}", stdout(&v));
    let report: serde_json::Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(report["accepted"], false);
}

#[test]
fn certificate_for_another_formula_is_rejected() {
    let dir = Scratch::new();
    let cnf = dir.write("run.cnf", RUNNING);
    let other = dir.write("other.cnf", "p cnf 2 4\n1 2 0\n-1 2 0\n1 -2 0\n-1 -2 0\n");
    let built = run(&["build", &other, "--mode", "unsat"]);
    let cert = dir.write("other.json", &stdout(&built));
    let v = run(&["validate", &cert, &cnf]);
    assert_eq!(code(&v), 2);
    assert!(stderr(&v).contains("digest"), "{}", stderr(&v));
}

#[test]
fn exhaustive_above_limit_is_inapplicable() {
    let dir = Scratch::new();
    let cnf = dir.write("run.cnf", RUNNING);
    let cert = dir.write("c.json", &stdout(&run(&["build", &cnf])));
    let v = run(&["validate", "--method", "exhaustive", "--limit", "2", &cert, &cnf]);
    assert_eq!(code(&v), 3, "{}", stdout(&v));
}

#[test]
fn impossible_bound_fails_the_build_with_a_witness() {
    let o = run_stdin(&["build", "-", "--L", "2"], RUNNING);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("impossible"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn exhausted_sweep_lists_attempts() {
    let o = run_stdin(&["build", "-", "--d-max", "1", "--rho", "1/3", "--max-iters", "1"], RUNNING);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("d = 1, rho = 1/3"), "{err}");
    assert!(err.contains("build failed"));
}

#[test]
fn polynomial_and_rank_one_constructions() {
    let poly = run_stdin(&["build", "-", "--construction", "polynomial"], RUNNING);
    assert_eq!(code(&poly), 0, "{}", stderr(&poly));
    let cert: serde_json::Value = serde_json::from_str(&stdout(&poly)).unwrap();
    assert!(cert["denominators"].as_array().unwrap().is_empty());

    // the odd-parity formula is satisfiable and needs no claim checking
    let xor = "p cnf 2 2\n1 2 0\n-1 -2 0\n";
    let r1 = run_stdin(&["build", "-", "--construction", "rank-one-rational", "--mode", "maxsat"], xor);
    assert!([0, 1].contains(&code(&r1)), "{}", stderr(&r1));
}

#[test]
fn gen_is_seeded_and_commented() {
    let a = run(&["gen", "-k", "3", "-n", "10", "--seed", "7", "--unsat"]);
    let b = run(&["gen", "-k", "3", "-n", "10", "--seed", "7", "--unsat"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("c fsos gen k=3 n=10 m=90 seed=7 unsat\np cnf 10 "));
    let o = run_stdin(&["oracle", "-"], &text);
    assert!(!stdout(&o).contains("L_min=0\n"));
}

#[test]
fn gen_unsat_needs_the_oracle() {
    let o = fsos()
        .args(["gen", "-k", "3", "-n", "10", "--unsat"])
        .env("FSOS_ORACLE_LIMIT", "8")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn gen_structured_recipe() {
    let o = run(&["gen", "-k", "3", "-n", "12", "--structured", "3,4,20,8,7", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("structured=3,4,20,8,7"));
    assert_eq!(code(&run(&["gen", "-k", "3", "-n", "12", "--structured", "3,4"])), 64);
}

#[test]
fn failed_write_leaves_no_file() {
    let dir = Scratch::new();
    let target = dir.path("missing/out.cnf");
    let o = run(&["gen", "-k", "2", "-n", "4", "-o", s(&target)]);
    assert_ne!(code(&o), 0);
    assert!(!target.exists());
    let fine = dir.path("out.cnf");
    assert_eq!(code(&run(&["gen", "-k", "2", "-n", "4", "-o", s(&fine)])), 0);
    let names: Vec<_> = std::fs::read_dir(dir.0.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    // no temporary siblings survive the rename
    assert_eq!(names, vec![std::ffi::OsString::from("out.cnf")]);
}

#[test]
fn export_sdpa_layout() {
    let o = run_stdin(&["export-sdpa", "-", "--rho", "1/2"], RUNNING);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('"') && !l.starts_with('*')).collect();
    assert!(body[0].ends_with("= mDIM"), "{}", body[0]);
    assert_eq!(body[1], "3 = nBLOCK");
    // d = 1 keeps three terms of p(f) at rho = 1/2: |S| = 3, |T| = 1
    assert!(body[2].starts_with("3 1 -"), "{}", body[2]);
}

#[test]
fn bench_writes_reproducible_csv() {
    let dir = Scratch::new();
    let out = dir.path("t2.csv");
    let args = [
        "bench", "--table", "t2", "-k", "3", "-n", "8", "--instances", "2", "--seed", "5", "--reproducible",
    ];
    let a = fsos().args(args).args(["-o", s(&out)]).output().unwrap();
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("instance,seed,k,n,m,supp_f,"));
    assert!(stderr(&a).contains("verified 2/2"), "{}", stderr(&a));
    let b = run(&args);
    assert_eq!(stdout(&b), csv);
}
