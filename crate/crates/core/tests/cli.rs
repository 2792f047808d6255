use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockkrylov"))
        .current_dir(dir)
        .env_remove("BLOCKKRYLOV_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn solve_writes_artifacts_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["solve", "--problem", "random:n1=8,n2=5", "--precond", "LT:22:user-diag", "--tol", "1e-10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("out/solve_history.csv")).unwrap();
    assert!(csv.starts_with("iter,resnorm,factor\n"));
    assert!(!csv.contains('\r'));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/solve_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["converged"], true);
    assert!(summary["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(summary["final_relative_residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn example11_a2_row_250_is_small() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["solve", "--problem", "example11-a2", "--maxiter", "500", "--tol", "1e-16"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("out/solve_history.csv")).unwrap();
    let norms: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    let rel = norms[250] / norms[0];
    assert!(rel <= 1e-4 && rel >= 1e-8, "{rel}");
}

#[test]
fn strict_non_convergence_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["solve", "--problem", "example11-a1", "--maxiter", "5", "--strict"]);
    assert_eq!(code(&o), 2);
    let o = bin(dir.path(), &["solve", "--problem", "example11-a1", "--maxiter", "5"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn invalid_inputs_exit_one_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = dir.path().join("rect.mtx");
    fs::write(&mtx, "%%MatrixMarket matrix array real general\n2 3\n1\n2\n3\n4\n5\n6\n").unwrap();
    let rhs = dir.path().join("b.mtx");
    fs::write(&rhs, "%%MatrixMarket matrix array real general\n3 1\n1\n1\n1\n").unwrap();
    let sq = dir.path().join("sq.mtx");
    fs::write(&sq, "%%MatrixMarket matrix array real general\n2 2\n2\n0\n0\n2\n").unwrap();
    for args in [
        vec!["solve", "--matrix", rect(&mtx)],
        vec!["solve", "--matrix", rect(&sq), "--rhs", rect(&rhs)],
        vec!["solve"],
        vec!["solve", "--problem", "random", "--precond", "XX:22"],
        vec!["solve", "--problem", "random", "--method", "cg"],
        vec!["solve", "--problem", "random", "--tol", "-1"],
        vec!["experiment", "fig9"],
        vec!["verify", "--suite", "thm99"],
        vec!["generate", "--problem", "galaxy"],
        vec!["frobnicate"],
        vec!["solve", "--problem", "random", "--jobs", "0"],
    ] {
        let o = bin(dir.path(), &args);
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

fn rect(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("solve") && text.contains("verify") && text.contains("experiment"));
    let o = bin(dir.path(), &["solve", "--help"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("default: 1e-8"));
}

#[test]
fn verify_failure_exits_three_and_success_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["verify", "--suite", "closedforms", "--seed", "7", "--systems", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/verify_closedforms.json")).unwrap()).unwrap();
    assert_eq!(json["suite"], "closedforms");

    // right-preconditioned block LDU with strongly coupled blocks misses the
    // 1/sqrt(2) lower bound, which the verifier reports as a failed bound
    let o = bin(dir.path(), &["verify", "--suite", "thm31", "--systems", "6"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn identical_config_and_seed_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"seed": 5, "tol": 1e-6, "maxiter": 200}"#).unwrap();
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = format!("out_{run}");
        let o = bin(dir.path(), &["--config", "cfg.json", "--out", &out, "experiment", "sign-study", "--problem", "oseen:m=6"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(fs::read(dir.path().join(out).join("sign_study.csv")).unwrap());
        let o = bin(dir.path(), &["--config", "cfg.json", "--out", &format!("solve_{run}"), "solve", "--problem", "random"]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert!(String::from_utf8(outputs[0].clone()).unwrap().starts_with("family,inner_tol,global_tol,iters,converged\n"));
    assert_eq!(
        fs::read(dir.path().join("solve_a/solve_history.csv")).unwrap(),
        fs::read(dir.path().join("solve_b/solve_history.csv")).unwrap()
    );
}

#[test]
fn seed_precedence_env_file_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"seed": 6}"#).unwrap();
    let seed_of = |o: Output| -> u64 {
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["seed"].as_u64().unwrap()
    };
    let run = |env: Option<&str>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_blockkrylov"));
        c.current_dir(dir.path()).env_remove("BLOCKKRYLOV_SEED");
        if let Some(e) = env {
            c.env("BLOCKKRYLOV_SEED", e);
        }
        c.args(args).output().unwrap()
    };
    let base = ["--print-config", "generate", "--problem", "spd"];
    assert_eq!(seed_of(run(None, &base)), 20_240_611);
    assert_eq!(seed_of(run(Some("5"), &base)), 5);
    let with_file = ["--config", "cfg.json", "--print-config", "generate", "--problem", "spd"];
    assert_eq!(seed_of(run(Some("5"), &with_file)), 6);
    let with_flag = ["--config", "cfg.json", "--seed", "7", "--print-config", "generate", "--problem", "spd"];
    assert_eq!(seed_of(run(Some("5"), &with_flag)), 7);
    assert_eq!(code(&run(Some("abc"), &base)), 1);
}

#[test]
fn generated_blocks_can_be_solved_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["generate", "--problem", "saddle:n1=10,n2=4,seed=2", "--dump", "data/sys"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for b in ["a11", "a12", "a21", "a22", "rhs"] {
        assert!(dir.path().join(format!("data/sys.{b}.mtx")).exists());
    }
    let o = bin(
        dir.path(),
        &["solve", "--blocks", "data/sys", "--rhs", "data/sys.rhs.mtx", "--precond", "BD:22:exact", "--strict", "--tol", "1e-10"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(dir.path().join("out/solve_summary.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert!(v["iterations"].as_u64().unwrap() <= 3);
}

#[test]
fn cg_and_fixed_point_run_from_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["solve", "--problem", "spd:n1=10,n2=6", "--method", "cg", "--precond", "LDU:22:jacobi", "--strict"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = bin(dir.path(), &["solve", "--problem", "random", "--method", "fixed-point", "--precond", "LT:22:exact", "--strict"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn jobs_flag_runs_a_sweep_on_a_pool() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["--jobs", "2", "experiment", "staircase", "--problem", "oseen:m=5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("out/staircase.csv")).unwrap();
    assert!(csv.starts_with("family,iter,resnorm,factor\n"));
    for label in ["BD,", "BD:neg,", "LT,", "LT:neg,"] {
        assert!(csv.contains(&format!("\n{label}")), "{label}");
    }
}
