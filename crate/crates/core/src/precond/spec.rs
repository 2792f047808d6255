use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::block::SchurBlock;
use crate::dense::Matrix;
use crate::error::{Error, Result};

/// Default iteration cap for inexact inner solves.
pub const DEFAULT_INNER_MAX_ITER: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    BlockDiagonal,
    LowerTriangular,
    UpperTriangular,
    BlockLdu,
    /// Lower sweep then upper sweep, `I − G⁻¹A = (I − U⁻¹A)(I − L⁻¹A)`.
    SymTriLu,
    /// Upper sweep then lower sweep, `I − H⁻¹A = (I − L⁻¹A)(I − U⁻¹A)`.
    SymTriUl,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::LowerTriangular,
        Family::UpperTriangular,
        Family::SymTriLu,
        Family::SymTriUl,
        Family::BlockDiagonal,
        Family::BlockLdu,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Family::BlockDiagonal => "BD",
            Family::LowerTriangular => "LT",
            Family::UpperTriangular => "UT",
            Family::BlockLdu => "LDU",
            Family::SymTriLu => "ST-I",
            Family::SymTriUl => "ST-II",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "BD" | "JACOBI" | "DIAG" => Ok(Family::BlockDiagonal),
            "LT" | "L" | "LOWER" => Ok(Family::LowerTriangular),
            "UT" | "U" | "UPPER" => Ok(Family::UpperTriangular),
            "LDU" | "M" => Ok(Family::BlockLdu),
            "ST-I" | "STI" | "G" => Ok(Family::SymTriLu),
            "ST-II" | "STII" | "H" => Ok(Family::SymTriUl),
            _ => Err(Error::Parse(format!("unknown preconditioner family {s:?}"))),
        }
    }
}

/// Approximation `Ŝ` placed on the Schur block.
#[derive(Debug, Clone, PartialEq)]
pub enum SchurApprox {
    /// `Ŝ_kk = A_kk`; with the block-diagonal family this is block Jacobi.
    DiagonalBlock,
    ExactSchur,
    /// `Ŝ_kk = A_kk − A_kj diag(A_jj)⁻¹ A_jk`
    DiagonalSchur,
    UserMatrix(Matrix),
    /// Matrix Market file loaded when the preconditioner is built.
    UserFile(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerSolve {
    Direct,
    /// Unpreconditioned GMRES on the non-Schur diagonal block.
    Iterative { rel_tol: f64, max_iter: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreconditionerSpec {
    pub family: Family,
    pub schur_block: SchurBlock,
    pub schur_approx: SchurApprox,
    pub inner_solve: InnerSolve,
    pub negate_schur: bool,
}

impl PreconditionerSpec {
    pub fn new(family: Family, schur_block: SchurBlock, schur_approx: SchurApprox) -> Self {
        Self {
            family,
            schur_block,
            schur_approx,
            inner_solve: InnerSolve::Direct,
            negate_schur: false,
        }
    }

    /// Block Jacobi, `blkdiag(A11, A22)`.
    pub fn block_jacobi() -> Self {
        Self::new(Family::BlockDiagonal, SchurBlock::S22, SchurApprox::DiagonalBlock)
    }

    pub fn with_user(family: Family, schur_block: SchurBlock, shat: Matrix) -> Self {
        Self::new(family, schur_block, SchurApprox::UserMatrix(shat))
    }

    pub fn inner(mut self, rel_tol: f64, max_iter: usize) -> Self {
        self.inner_solve = InnerSolve::Iterative { rel_tol, max_iter };
        self
    }

    pub fn negated(mut self) -> Self {
        self.negate_schur = !self.negate_schur;
        self
    }

    pub fn is_direct(&self) -> bool {
        self.inner_solve == InnerSolve::Direct
    }

    /// Parses `FAM[:BLOCK][:APPROX][:inner=TOL[/MAXIT]][:neg]`, for example
    /// `LT:22:exact`, `BD:jacobi` or `LDU:22:user=shat.mtx:inner=1e-4:neg`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut parts = s.split(':').map(str::trim);
        let family: Family = parts
            .next()
            .filter(|p| !p.is_empty())
            .ok_or_else(|| Error::Parse("empty preconditioner spec".into()))?
            .parse()?;
        let mut block = None;
        let mut approx = None;
        let mut inner = InnerSolve::Direct;
        let mut neg = false;
        for part in parts {
            let lower = part.to_ascii_lowercase();
            match lower.as_str() {
                "11" | "22" if block.is_none() => {
                    block = Some(if lower == "11" { SchurBlock::S11 } else { SchurBlock::S22 });
                }
                "jacobi" | "diag" | "diagonal" | "akk" => set_once(&mut approx, SchurApprox::DiagonalBlock, s)?,
                "exact" => set_once(&mut approx, SchurApprox::ExactSchur, s)?,
                "user-diag" | "diag-schur" => set_once(&mut approx, SchurApprox::DiagonalSchur, s)?,
                "neg" | "negate" | "-" => neg = true,
                "direct" => inner = InnerSolve::Direct,
                _ if lower.starts_with("user=") => {
                    let path = &part["user=".len()..];
                    if path.is_empty() {
                        return Err(Error::Parse(format!("empty user matrix path in {s:?}")));
                    }
                    set_once(&mut approx, SchurApprox::UserFile(PathBuf::from(path)), s)?;
                }
                _ if lower.starts_with("inner=") => {
                    inner = parse_inner(&lower["inner=".len()..])?;
                }
                _ => return Err(Error::Parse(format!("unrecognized field {part:?} in {s:?}"))),
            }
        }
        let schur_approx = approx.unwrap_or(match family {
            Family::BlockDiagonal => SchurApprox::DiagonalBlock,
            _ => SchurApprox::ExactSchur,
        });
        Ok(Self {
            family,
            schur_block: block.unwrap_or(SchurBlock::S22),
            schur_approx,
            inner_solve: inner,
            negate_schur: neg,
        })
    }
}

fn set_once(slot: &mut Option<SchurApprox>, value: SchurApprox, s: &str) -> Result<()> {
    if slot.is_some() {
        return Err(Error::Parse(format!("more than one Schur approximation in {s:?}")));
    }
    *slot = Some(value);
    Ok(())
}

fn parse_inner(s: &str) -> Result<InnerSolve> {
    let (tol, maxit) = match s.split_once('/') {
        Some((t, m)) => (t, Some(m)),
        None => (s, None),
    };
    let rel_tol: f64 = tol
        .parse()
        .map_err(|_| Error::Parse(format!("bad inner tolerance {tol:?}")))?;
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::Parse(format!("inner tolerance must lie in (0, 1), got {rel_tol}")));
    }
    let max_iter = match maxit {
        Some(m) => m
            .parse()
            .ok()
            .filter(|&m: &usize| m > 0)
            .ok_or_else(|| Error::Parse(format!("bad inner iteration cap {m:?}")))?,
        None => DEFAULT_INNER_MAX_ITER,
    };
    Ok(InnerSolve::Iterative { rel_tol, max_iter })
}

impl FromStr for PreconditionerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for PreconditionerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family.token(), self.schur_block)?;
        match &self.schur_approx {
            SchurApprox::DiagonalBlock => write!(f, ":jacobi")?,
            SchurApprox::ExactSchur => write!(f, ":exact")?,
            SchurApprox::DiagonalSchur => write!(f, ":user-diag")?,
            SchurApprox::UserMatrix(_) => write!(f, ":user")?,
            SchurApprox::UserFile(p) => write!(f, ":user={}", p.display())?,
        }
        if let InnerSolve::Iterative { rel_tol, max_iter } = self.inner_solve {
            write!(f, ":inner={rel_tol:e}/{max_iter}")?;
        }
        if self.negate_schur {
            write!(f, ":neg")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_forms() {
        let s = PreconditionerSpec::parse("LT:22:exact").unwrap();
        assert_eq!(s.family, Family::LowerTriangular);
        assert_eq!(s.schur_block, SchurBlock::S22);
        assert_eq!(s.schur_approx, SchurApprox::ExactSchur);

        let s = PreconditionerSpec::parse("BD:jacobi").unwrap();
        assert_eq!(s, PreconditionerSpec::block_jacobi());

        let s = PreconditionerSpec::parse("LDU:22:user=shat.mtx:inner=1e-4:neg").unwrap();
        assert_eq!(s.family, Family::BlockLdu);
        assert_eq!(s.schur_approx, SchurApprox::UserFile("shat.mtx".into()));
        assert_eq!(
            s.inner_solve,
            InnerSolve::Iterative { rel_tol: 1e-4, max_iter: DEFAULT_INNER_MAX_ITER }
        );
        assert!(s.negate_schur);

        let s = PreconditionerSpec::parse("ST-II:11:user-diag:inner=0.1/20").unwrap();
        assert_eq!(s.family, Family::SymTriUl);
        assert_eq!(s.schur_block, SchurBlock::S11);
        assert_eq!(s.inner_solve, InnerSolve::Iterative { rel_tol: 0.1, max_iter: 20 });
    }

    #[test]
    fn display_round_trips() {
        for text in ["LT:22:exact", "BD:22:jacobi", "ST-I:11:user-diag:inner=1e-6/40:neg", "UT:22:user=a b.mtx"] {
            let s = PreconditionerSpec::parse(text).unwrap();
            assert_eq!(PreconditionerSpec::parse(&s.to_string()).unwrap(), s, "{text}");
        }
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "XX:22", "LT:33", "LT:exact:jacobi", "LT:inner=2", "LT:inner=1e-3/0", "LT:user="] {
            assert!(PreconditionerSpec::parse(bad).is_err(), "{bad}");
        }
    }
}
