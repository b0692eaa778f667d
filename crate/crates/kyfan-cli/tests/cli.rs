//! End-to-end tests of the binary: subcommand output, stdin handling, and
//! the exit-code contract.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use kyfan::state::DensityMatrix;
use kyfan::KrausChannel;
use kyfan_cli::format::{emit_channel, emit_state, emit_vector, parse_state};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kyfan"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn write_orthogonal_pair(dir: &Path) {
    let a = DensityMatrix::from_probabilities(&[1.0, 0.0]).unwrap();
    let b = DensityMatrix::from_probabilities(&[0.0, 1.0]).unwrap();
    fs::write(dir.join("a.state"), emit_state(&a)).unwrap();
    fs::write(dir.join("b.state"), emit_state(&b)).unwrap();
}

#[test]
fn dist_profile_and_single_k() {
    let dir = tempfile::tempdir().unwrap();
    write_orthogonal_pair(dir.path());

    let out = run_in(dir.path(), &["dist", "a.state", "b.state", "--profile"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("D_1 = 5.0000000000000000e-1"), "{text}");
    assert!(text.contains("D_2 = 1.0000000000000000e0"), "{text}");

    let out = run_in(dir.path(), &["dist", "a.state", "b.state", "-k", "1"]);
    assert_eq!(stdout(&out).trim(), "D_1 = 5.0000000000000000e-1");

    // Default is the whole trace distance.
    let out = run_in(dir.path(), &["dist", "a.state", "b.state"]);
    assert_eq!(stdout(&out).trim(), "D_2 = 1.0000000000000000e0");

    let out = run_in(
        dir.path(),
        &["dist", "a.state", "b.state", "--format", "csv", "--profile"],
    );
    let text = stdout(&out);
    assert!(text.starts_with("k,D_k\n"), "{text}");
}

#[test]
fn k_out_of_range_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    write_orthogonal_pair(dir.path());
    let out = run_in(dir.path(), &["dist", "a.state", "b.state", "-k", "7"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn parse_and_validation_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write_orthogonal_pair(dir.path());

    fs::write(dir.path().join("garbage.state"), "not json").unwrap();
    let out = run_in(dir.path(), &["dist", "garbage.state", "a.state"]);
    assert_eq!(out.status.code(), Some(1));

    let bad = r#"{"kind": "state", "dim": 2, "re": [[0.6, 0.0], [0.0, 0.6]], "im": [[0.0, 0.0], [0.0, 0.0]]}"#;
    fs::write(dir.path().join("badtrace.state"), bad).unwrap();
    let out = run_in(dir.path(), &["dist", "badtrace.state", "a.state"]);
    assert_eq!(out.status.code(), Some(2));

    // An explicit loose tolerance accepts the same file.
    let out = run_in(
        dir.path(),
        &["dist", "badtrace.state", "badtrace.state", "--tol", "0.5"],
    );
    assert_eq!(out.status.code(), Some(0));

    let out = run_in(
        dir.path(),
        &["suite", "bogus", "--dim", "2", "--trials", "1"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cdist_matches_hand_computation() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.vec"), emit_vector(&[0.5, 0.3, 0.2])).unwrap();
    fs::write(dir.path().join("q.vec"), emit_vector(&[0.2, 0.5, 0.3])).unwrap();
    let out = run_in(dir.path(), &["cdist", "p.vec", "q.vec", "-k", "2"]);
    assert_eq!(stdout(&out).trim(), "D_2 = 2.5000000000000000e-1");
    let out = run_in(dir.path(), &["cdist", "p.vec", "q.vec"]);
    assert_eq!(stdout(&out).trim(), "D_3 = 2.9999999999999999e-1");
}

#[test]
fn majorize_verdicts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("x.vec"), emit_vector(&[0.5, 0.3, 0.2])).unwrap();
    fs::write(dir.path().join("y.vec"), emit_vector(&[0.6, 0.3, 0.1])).unwrap();
    fs::write(dir.path().join("z.vec"), emit_vector(&[0.9, 0.3, 0.2])).unwrap();

    let out = run_in(dir.path(), &["majorize", "x.vec", "y.vec", "--strict"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("majorized: true"));

    // x ≺_w z but totals differ, so --strict fails with exit 3.
    let out = run_in(dir.path(), &["majorize", "x.vec", "z.vec"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run_in(dir.path(), &["majorize", "x.vec", "z.vec", "--strict"]);
    assert_eq!(out.status.code(), Some(3));

    // Reverse direction violates the weak relation already.
    let out = run_in(dir.path(), &["majorize", "z.vec", "x.vec"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn measure_against_optimal_pvm() {
    let dir = tempfile::tempdir().unwrap();
    write_orthogonal_pair(dir.path());
    let out = run_in(
        dir.path(),
        &["pvm-opt", "a.state", "b.state", "-o", "opt.povm"],
    );
    assert!(out.status.success(), "{}", stdout(&out));

    let out = run_in(dir.path(), &["measure", "opt.povm", "a.state", "b.state"]);
    let text = stdout(&out);
    assert!(
        text.contains("k=1: classical 5.0000000000000000e-1 quantum 5.0000000000000000e-1"),
        "{text}"
    );
    assert!(
        text.contains("k=2: classical 1.0000000000000000e0 quantum 1.0000000000000000e0"),
        "{text}"
    );
}

#[test]
fn channel_apply_reads_stdin_and_emits_state() {
    let dir = tempfile::tempdir().unwrap();
    let ch = KrausChannel::depolarizing(2, 1.0).unwrap();
    fs::write(dir.path().join("dep.kraus"), emit_channel(&ch)).unwrap();
    let plus = DensityMatrix::from_probabilities(&[1.0, 0.0]).unwrap();

    let mut child = bin()
        .current_dir(dir.path())
        .args(["channel", "apply", "dep.kraus", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(emit_state(&plus).as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let state = parse_state(&String::from_utf8_lossy(&out.stdout), None).unwrap();
    // Fully depolarized: maximally mixed output.
    assert!((state.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
    assert!((state.matrix()[(1, 1)].re - 0.5).abs() < 1e-12);
    assert!(String::from_utf8_lossy(&out.stderr).contains("success_probability"));
}

#[test]
fn channel_contract_flags_violations_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let ch = KrausChannel::coarse_graining(5, &[0, 0, 0, 1, 1]).unwrap();
    fs::write(dir.path().join("merge.kraus"), emit_channel(&ch)).unwrap();
    let rho = DensityMatrix::from_probabilities(&[0.2, 0.2, 0.2, 0.2, 0.2]).unwrap();
    let sigma = DensityMatrix::from_probabilities(&[0.0, 0.0, 0.0, 0.5, 0.5]).unwrap();
    fs::write(dir.path().join("r.state"), emit_state(&rho)).unwrap();
    fs::write(dir.path().join("s.state"), emit_state(&sigma)).unwrap();

    let out = run_in(
        dir.path(),
        &["channel", "contract", "merge.kraus", "r.state", "s.state"],
    );
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert!(text.contains("VIOLATION"), "{text}");
    assert!(text.contains("submajorized: false"), "{text}");

    // The identity channel contracts trivially: exit 0.
    let id = KrausChannel::identity(5);
    fs::write(dir.path().join("id.kraus"), emit_channel(&id)).unwrap();
    let out = run_in(
        dir.path(),
        &["channel", "contract", "id.kraus", "r.state", "s.state"],
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn probe_exec_uses_external_oracle() {
    let dir = tempfile::tempdir().unwrap();
    // `cat` is the identity channel.
    let out = run_in(
        dir.path(),
        &[
            "probe", "--exec", "cat", "--dim", "3", "--pairs", "12", "--seed", "9",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("consistent_with_subunital"));

    // An oracle that emits garbage is an oracle failure, not a crash.
    let out = run_in(
        dir.path(),
        &[
            "probe",
            "--exec",
            "echo nonsense",
            "--dim",
            "2",
            "--pairs",
            "2",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn probe_requires_dim_with_exec() {
    let out = bin().args(["probe", "--exec", "cat"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn jobs_one_forces_sequential_and_matches_parallel() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "suite",
        "povm-bound",
        "--dim",
        "3",
        "--trials",
        "40",
        "--seed",
        "11",
    ];
    let parallel = run_in(dir.path(), &args);
    let sequential = run_in(
        dir.path(),
        &[
            "suite",
            "povm-bound",
            "--dim",
            "3",
            "--trials",
            "40",
            "--seed",
            "11",
            "--jobs",
            "1",
        ],
    );
    assert!(parallel.status.success());
    assert!(sequential.status.success());
    assert_eq!(stdout(&parallel), stdout(&sequential));
}
