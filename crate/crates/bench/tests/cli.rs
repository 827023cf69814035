use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stiefelbench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stiefelbench-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const HEADER: &str = "schema=1,step,loss,riem_grad_norm,ortho_error,alpha_used,wall_ms";

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&bench(&["--help"])), 0);
    assert_eq!(code(&bench(&["optimize", "--help"])), 0);
    assert_eq!(code(&bench(&["--version"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &[][..],
        &["frobnicate"],
        &["optimize", "--problem", "subspace", "--warp-speed"],
        &["optimize", "--problem", "subspace", "--q=1.5"],
        &["optimize", "--problem", "toynet", "--scalar", "complex"],
        &["optimize", "--problem", "procrustes", "--n", "8", "--p", "3"],
        &["optimize", "--problem", "subspace", "--jobs", "3"],
        &["gradcheck", "--trials", "0"],
        &["retraction-check", "--sizes", "4x9"],
        &["speed", "--reps", "0"],
        &["unitary-check", "--p", "0"],
    ] {
        let out = bench(args);
        assert_eq!(code(&out), 1, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?} computed before validating");
    }
}

#[test]
fn zero_steps_writes_header_only() {
    let out = bench(&["optimize", "--problem", "subspace", "--steps", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), format!("{HEADER}\n"));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("summary "));
}

#[test]
fn csv_is_reproducible_apart_from_timing() {
    let (a, b) = (scratch("rep-a.csv"), scratch("rep-b.csv"));
    for path in [&a, &b] {
        let out = bench(&[
            "optimize", "--problem", "subspace", "--optimizer", "cayley-adam", "--steps", "40", "--log-every", "7",
            "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        assert!(stdout(&out).starts_with("summary problem=subspace optimizer=cayleyadam"));
    }
    let strip = |p: &PathBuf| -> Vec<String> {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    let rows = strip(&a);
    assert_eq!(rows, strip(&b));
    assert_eq!(rows[0], HEADER.rsplit_once(',').unwrap().0);
    let steps: Vec<&str> = rows[1..].iter().map(|r| r.split(',').nth(1).unwrap()).collect();
    assert_eq!(steps, ["7", "14", "21", "28", "35", "40"]);
    assert!(rows[1..].iter().all(|r| r.starts_with("1,")));
}

#[test]
fn floats_round_trip_through_the_csv() {
    let out = bench(&["optimize", "--problem", "procrustes", "--n", "5", "--steps", "3"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for line in text.lines().skip(1) {
        for field in line.split(',').skip(2) {
            let v: f64 = field.parse().unwrap();
            assert_eq!(format!("{v:?}"), field);
        }
    }
}

#[test]
fn jobs_write_one_file_per_seed() {
    let base = scratch("jobs.csv");
    let out = bench(&[
        "optimize", "--problem", "toynet", "--steps", "5", "--seed", "3", "--jobs", "2", "--out", base.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("seed=3") && text.contains("seed=4"), "{text}");
    for seed in [3, 4] {
        let file = base.with_file_name(format!("jobs-seed{seed}.csv"));
        let body = fs::read_to_string(&file).unwrap();
        assert_eq!(body.lines().count(), 6);
    }
    let single = scratch("jobs-single.csv");
    bench(&["optimize", "--problem", "toynet", "--steps", "5", "--seed", "4", "--out", single.to_str().unwrap()]);
    let strip = |s: String| -> Vec<String> { s.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect() };
    assert_eq!(
        strip(fs::read_to_string(base.with_file_name("jobs-seed4.csv")).unwrap()),
        strip(fs::read_to_string(single).unwrap())
    );
}

#[test]
fn divergence_exits_three_after_flushing() {
    let path = scratch("diverge.csv");
    let out = bench(&[
        "optimize", "--problem", "procrustes", "--optimizer", "sgd", "--lr", "0.9", "--beta", "0", "--steps", "2000",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    let body = fs::read_to_string(&path).unwrap();
    assert!(body.lines().count() > 2, "records before the failure are kept");
}

#[test]
fn drift_beyond_tolerance_is_a_property_failure() {
    let out = bench(&["optimize", "--problem", "subspace", "--lr", "0.01", "--ortho-tol", "1e-15", "--steps", "50"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn euclidean_baseline_leaves_the_manifold() {
    let out = bench(&["optimize", "--problem", "subspace", "--optimizer", "sgd", "--steps", "300", "--log-every", "300"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let ortho: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
    assert!(ortho >= 1e-2, "{ortho}");
}

#[test]
fn gradcheck_passes_and_catches_corruption() {
    let ok = bench(&["gradcheck", "--points", "3", "--trials", "2"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(stdout(&ok).lines().filter(|l| l.starts_with("PASS")).count(), 5);
    let bad = bench(&["gradcheck", "--points", "2", "--trials", "2", "--corrupt-gradient", "--scalar", "real"]);
    assert_eq!(code(&bad), 2);
    assert!(stdout(&bad).lines().all(|l| l.starts_with("FAIL")));
}

#[test]
fn retraction_check_reports_per_size() {
    let path = scratch("retraction.csv");
    let out = bench(&["retraction-check", "--sizes", "8x3,10x10", "--trials", "6", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("PASS")).count(), 2);
    let body = fs::read_to_string(&path).unwrap();
    assert_eq!(body.lines().count(), 3);
    assert!(body.starts_with("schema=1,n,p,"));

    let unguarded = bench(&["retraction-check", "--sizes", "8x3", "--trials", "4", "--no-guard"]);
    assert_eq!(code(&unguarded), 0);
    assert!(stdout(&unguarded).starts_with("EXPECTED-FAIL"));
}

#[test]
fn unitary_check_writes_one_row_per_variant() {
    let out = bench(&["unitary-check", "--sizes", "20", "--p", "4", "--steps", "30"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let labels: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(labels, ["0", "1", "2", "3", "4", "closed"]);
}

#[test]
fn speed_small_sizes_are_not_asserted() {
    let out = bench(&["speed", "--sizes", "8x2,16x16", "--reps", "3", "--warmup", "1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("schema=1,n,p,iterative_ms,closed_ms,ratio\n"));
    assert_eq!(text.lines().count(), 3);
}
