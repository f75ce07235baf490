//! VTCP residuals and solution methods.
//!
//! An instance asks for `x` with
//! `min(q1 + A1 x^(m-1), q2 + A2 x^(m-1)) = 0` componentwise.

mod homotopy;
mod mtensor;
mod newton;
mod oracle;
mod reformulation;
mod residual;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classes::TensorPair;
use crate::error::{check_dims, Result, VtcpError};

pub use homotopy::{homotopy_map, solve_homotopy};
pub use mtensor::{mtensor_system_solve, solve_mtensor};
pub use newton::solve_newton;
pub use oracle::{boundedness_probe, solve_oracle, BoundednessReport, OracleReport, ProbeSample};
pub use reformulation::{
    fractional_reformulation_residual, recover_solution, right_inverse_verify,
};
pub use residual::{residual, residual_jacobian, verify_solution, GeneralizedJacobian, Verification};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VtcpInstance {
    pair: TensorPair,
    q1: Vec<f64>,
    q2: Vec<f64>,
}

impl VtcpInstance {
    pub fn new(pair: TensorPair, q1: Vec<f64>, q2: Vec<f64>) -> Result<Self> {
        check_dims("q1", pair.dim(), q1.len())?;
        check_dims("q2", pair.dim(), q2.len())?;
        if pair.order() < 2 {
            return Err(VtcpError::InvalidTensor(
                "instance tensors need order >= 2".into(),
            ));
        }
        for (name, q) in [("q1", &q1), ("q2", &q2)] {
            if let Some(v) = q.iter().find(|v| !v.is_finite()) {
                return Err(VtcpError::InvalidField {
                    field: name.into(),
                    reason: format!("entry {v} is not finite"),
                });
            }
        }
        Ok(VtcpInstance { pair, q1, q2 })
    }

    pub fn pair(&self) -> &TensorPair {
        &self.pair
    }

    pub fn q1(&self) -> &[f64] {
        &self.q1
    }

    pub fn q2(&self) -> &[f64] {
        &self.q2
    }

    pub fn order(&self) -> usize {
        self.pair.order()
    }

    pub fn dim(&self) -> usize {
        self.pair.dim()
    }

    /// Both shifted images `(q1 + A1 x^(m-1), q2 + A2 x^(m-1))`.
    pub fn branches(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        check_dims("point", self.dim(), x.len())?;
        let (g, f) = self.pair.images(x)?;
        let add = |a: Vec<f64>, q: &[f64]| a.iter().zip(q).map(|(u, v)| u + v).collect();
        Ok((add(g, &self.q1), add(f, &self.q2)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol_residual: f64,
    pub max_iters: usize,
    pub shrink: f64,
    pub max_backtracks: usize,
    pub homotopy_steps: usize,
    pub oracle_radius: f64,
    pub oracle_points: usize,
    pub multi_start: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_residual: 1e-10,
            max_iters: 200,
            shrink: 0.5,
            max_backtracks: 30,
            homotopy_steps: 50,
            oracle_radius: 5.0,
            oracle_points: 201,
            multi_start: 100,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tol_residual > 0.0
            && self.max_iters > 0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.max_backtracks > 0
            && self.homotopy_steps > 0
            && self.oracle_radius > 0.0
            && self.oracle_points >= 2
            && self.multi_start > 0;
        if ok {
            Ok(())
        } else {
            Err(VtcpError::Precondition(
                "solver configuration values must be positive (shrink in (0, 1), at least 2 grid points)".into(),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Newton,
    Homotopy,
    Mtensor,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Newton => "newton",
            Method::Homotopy => "homotopy",
            Method::Mtensor => "mtensor",
            Method::Oracle => "oracle",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = VtcpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "newton" => Ok(Method::Newton),
            "homotopy" => Ok(Method::Homotopy),
            "mtensor" | "m-tensor" => Ok(Method::Mtensor),
            "oracle" => Ok(Method::Oracle),
            _ => Err(VtcpError::Unknown {
                kind: "method",
                name: s.into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Converged,
    MaxIters,
    Diverged,
    PreconditionFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: Method,
    pub status: Status,
    pub x: Vec<f64>,
    pub residual_inf_norm: f64,
    pub iterations: usize,
    /// Residual norm after each accepted iteration.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<f64>,
    /// Homotopy parameter values at accepted continuation steps.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub homotopy_t: Vec<f64>,
    /// Branch-1 selectors used by successive M-tensor subproblems.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub active_sets: Vec<Vec<bool>>,
    /// Iterates of the M-tensor outer loop.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub path: Vec<Vec<f64>>,
    /// Every distinct solution (oracle only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub solutions: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub non_isolated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl SolveReport {
    pub(crate) fn new(method: Method, status: Status, x: Vec<f64>, residual_inf_norm: f64) -> Self {
        SolveReport {
            method,
            status,
            x,
            residual_inf_norm,
            iterations: 0,
            trace: Vec::new(),
            homotopy_t: Vec::new(),
            active_sets: Vec::new(),
            path: Vec::new(),
            solutions: Vec::new(),
            non_isolated: false,
            message: None,
        }
    }

    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}

/// Runs `method` on `inst`. Newton starts from `x0`, or from the ones vector when none is
/// given; the other methods choose their own starting points and reject an explicit `x0`.
pub fn solve(inst: &VtcpInstance, method: Method, x0: Option<&[f64]>, cfg: &SolverConfig) -> Result<SolveReport> {
    if x0.is_some() && method != Method::Newton {
        return Err(VtcpError::Precondition(format!(
            "method {method} does not take a starting point"
        )));
    }
    match method {
        Method::Newton => match x0 {
            Some(x0) => solve_newton(inst, x0, cfg),
            None => solve_newton(inst, &vec![1.0; inst.dim()], cfg),
        },
        Method::Homotopy => solve_homotopy(inst, cfg),
        Method::Mtensor => solve_mtensor(inst, cfg),
        Method::Oracle => solve_oracle(inst, cfg)?.into_solve_report(inst),
    }
}
