use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gmres,
    Fgmres,
    Cg,
    FixedPoint,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gmres" => Ok(Method::Gmres),
            "fgmres" => Ok(Method::Fgmres),
            "cg" => Ok(Method::Cg),
            "fixed-point" | "fixedpoint" | "fp" | "richardson" => Ok(Method::FixedPoint),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(Side::Left),
            "right" | "r" => Ok(Side::Right),
            other => Err(Error::InvalidConfig(format!("unknown side {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrylovConfig {
    pub method: Method,
    pub side: Side,
    pub rel_tol: f64,
    pub max_iter: usize,
    /// `None` means no restarts.
    pub restart: Option<usize>,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self {
            method: Method::Gmres,
            side: Side::Right,
            rel_tol: 1e-8,
            max_iter: 1000,
            restart: None,
        }
    }
}

impl KrylovConfig {
    pub fn gmres(side: Side, rel_tol: f64, max_iter: usize) -> Self {
        Self {
            method: Method::Gmres,
            side,
            rel_tol,
            max_iter,
            restart: None,
        }
    }

    pub fn fgmres(rel_tol: f64, max_iter: usize) -> Self {
        Self {
            method: Method::Fgmres,
            side: Side::Right,
            rel_tol,
            max_iter,
            restart: None,
        }
    }

    pub fn cg(rel_tol: f64, max_iter: usize) -> Self {
        Self {
            method: Method::Cg,
            side: Side::Left,
            rel_tol,
            max_iter,
            restart: None,
        }
    }

    pub fn fixed_point(rel_tol: f64, max_iter: usize) -> Self {
        Self {
            method: Method::FixedPoint,
            side: Side::Left,
            rel_tol,
            max_iter,
            restart: None,
        }
    }

    pub fn with_restart(mut self, restart: usize) -> Self {
        self.restart = Some(restart);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if self.restart == Some(0) {
            return Err(Error::InvalidConfig("restart length must be at least 1".into()));
        }
        match (self.method, self.side) {
            (Method::Cg, Side::Right) => Err(Error::InvalidConfig(
                "CG is only defined with left preconditioning".into(),
            )),
            (Method::Fgmres, Side::Left) => Err(Error::InvalidConfig(
                "FGMRES is right preconditioned by construction".into(),
            )),
            _ => Ok(()),
        }
    }
}
