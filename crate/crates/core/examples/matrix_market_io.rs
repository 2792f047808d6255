//! Writes a generated block system as Matrix Market files, reads it back and
//! solves it, as the CLI does with `generate --dump` and `solve --blocks`.

use blockkrylov::krylov::{fgmres, KrylovConfig};
use blockkrylov::mtx::{read_block_system, read_monolithic, write_block_system, write_matrix};
use blockkrylov::precond::{build, PreconditionerSpec};
use blockkrylov::problems::saddle_point;

fn main() -> blockkrylov::Result<()> {
    let dir = std::env::temp_dir().join("blockkrylov-io-example");
    std::fs::create_dir_all(&dir).map_err(|e| blockkrylov::Error::Io(e.to_string()))?;
    let (sys, b) = saddle_point(30, 10, 4)?;
    for p in write_block_system(dir.join("saddle"), &sys)? {
        println!("wrote {}", p.display());
    }
    write_matrix(dir.join("saddle.mtx"), &sys.assemble())?;

    let blocks = read_block_system(dir.join("saddle"))?;
    let mono = read_monolithic(dir.join("saddle.mtx"), 30)?;
    assert_eq!(blocks.assemble(), mono.assemble());

    let p = build(&blocks, &PreconditionerSpec::parse("UT:22:exact")?)?;
    let (_, h) = fgmres(&blocks, &p, &b, &vec![0.0; b.len()], &KrylovConfig::fgmres(1e-10, 50))?;
    println!("UT with exact Schur: {} iterations", h.iterations);
    print!("{}", h.to_csv());
    Ok(())
}
