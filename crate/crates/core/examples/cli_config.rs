//! Layered run configuration: defaults, environment seed, JSON file, flags.

use blockkrylov::cli::{run, Command, ConfigLayer, RunConfig};

fn main() -> blockkrylov::Result<()> {
    let file = ConfigLayer::from_json(r#"{"seed": 5, "tol": 1e-6, "precond": "LT:22:user-diag"}"#)?;
    let flags = ConfigLayer {
        problem: Some("random:n1=20,n2=10".into()),
        out_dir: Some(std::env::temp_dir().join("blockkrylov-cli-example")),
        ..ConfigLayer::default()
    };
    let cfg = RunConfig::resolve(Command::Solve, Some("3"), Some(file), flags)?;
    println!("seed {} (file beats environment), tol {:e}", cfg.seed, cfg.tol);
    let out = run(&cfg)?;
    for line in out.lines {
        println!("{line}");
    }
    println!("exit code {}", out.code);
    Ok(())
}
