use std::collections::HashSet;

use super::{residual, Method, SolveReport, SolverConfig, Status, VtcpInstance};
use crate::classes::{diag_combination, first_positive_off_diagonal};
use crate::error::{check_dims, Result, VtcpError};
use crate::numeric::{newton, NewtonOptions};
use crate::tensor::vector::{inf_dist, inf_norm};
use crate::tensor::DenseTensor;

/// Fixed-point sweeps allowed per multilinear solve.
const JACOBI_BUDGET: usize = 20_000;

fn system_residual(m: &DenseTensor, b: &[f64], x: &[f64]) -> f64 {
    match m.power_apply(x) {
        Ok(y) => y.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    }
}

/// Newton on `M x^(m-1) = b`, accepted only if it stays strictly positive.
fn polish(m: &DenseTensor, b: &[f64], x: &[f64], cfg: &SolverConfig) -> Option<Vec<f64>> {
    let n = b.len();
    let out = newton(
        |z| match m.power_apply(z) {
            Ok(y) => y.iter().zip(b).map(|(u, v)| u - v).collect(),
            Err(_) => vec![f64::NAN; n],
        },
        |z| m.power_jacobian(z).unwrap_or_else(|_| nalgebra::DMatrix::zeros(n, n)),
        x,
        NewtonOptions {
            tol: cfg.tol_residual,
            max_iters: 50,
            shrink: cfg.shrink,
            max_backtracks: cfg.max_backtracks,
        },
    );
    (out.residual_norm <= cfg.tol_residual && out.x.iter().all(|&v| v > 0.0)).then_some(out.x)
}

fn mtensor_system_solve_counted(
    m: &DenseTensor,
    b: &[f64],
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, usize)> {
    cfg.validate()?;
    check_dims("right-hand side", m.dim(), b.len())?;
    if m.order() < 2 {
        return Err(VtcpError::Precondition("M-tensor system needs order >= 2".into()));
    }
    if let Some((idx, v)) = first_positive_off_diagonal(m) {
        return Err(VtcpError::Precondition(format!(
            "not a Z-tensor: entry {idx:?} = {v} > 0"
        )));
    }
    let d = m.diagonal_entries();
    if let Some(i) = d.iter().position(|&v| v <= 0.0) {
        return Err(VtcpError::Precondition(format!(
            "diagonal entry {i} is {} <= 0",
            d[i]
        )));
    }
    if let Some(i) = b.iter().position(|&v| v.is_nan() || v <= 0.0) {
        return Err(VtcpError::Precondition(format!(
            "right-hand side entry {i} is {} <= 0",
            b[i]
        )));
    }

    let p = 1.0 / (m.order() - 1) as f64;
    // N = D - M is the negated off-diagonal part.
    let off = m.try_add(&DenseTensor::diagonal(m.order(), &d)?.scaled(-1.0))?;
    let mut x: Vec<f64> = b.iter().zip(&d).map(|(bi, di)| (bi / di).powf(p)).collect();
    let mut polish_tried = false;
    for it in 1..=JACOBI_BUDGET {
        let nx = off.power_apply(&x)?;
        let next: Vec<f64> = (0..b.len())
            .map(|i| ((b[i] - nx[i]) / d[i]).powf(p))
            .collect();
        if !next.iter().all(|v| v.is_finite()) {
            return Err(VtcpError::NotConverged {
                iterations: it,
                reason: "fixed-point iterates blew up".into(),
            });
        }
        let step = inf_dist(&next, &x);
        x = next;
        if step < cfg.tol_residual {
            if system_residual(m, b, &x) <= cfg.tol_residual {
                return Ok((x, it));
            }
            return polish(m, b, &x, cfg).map(|z| (z, it)).ok_or(VtcpError::NotConverged {
                iterations: it,
                reason: "fixed point reached but system residual above tolerance".into(),
            });
        }
        if !polish_tried && step < 1e-6 * (1.0 + inf_norm(&x)) {
            polish_tried = true;
            if let Some(z) = polish(m, b, &x, cfg) {
                return Ok((z, it));
            }
        }
    }
    Err(VtcpError::NotConverged {
        iterations: JACOBI_BUDGET,
        reason: "fixed-point iteration did not settle (M may not be a strong M-tensor)".into(),
    })
}

/// Positive solution of `M x^(m-1) = b` for a Z-tensor `M` with positive diagonal and `b > 0`.
///
/// Splits `M = D - N` and iterates `x_i <- ((b_i + (N x^(m-1))_i) / d_i)^(1/(m-1))` from
/// `(b / d)^(1/(m-1))`, finishing with a positivity-preserving Newton polish.
pub fn mtensor_system_solve(m: &DenseTensor, b: &[f64], cfg: &SolverConfig) -> Result<Vec<f64>> {
    mtensor_system_solve_counted(m, b, cfg).map(|(x, _)| x)
}

fn selectors(inst: &VtcpInstance, x: &[f64]) -> Result<Vec<bool>> {
    let (g, f) = inst.branches(x)?;
    Ok(g.iter().zip(&f).map(|(a, b)| a <= b).collect())
}

/// Active-set iteration for Z-tensor pairs with `q1, q2 < 0`.
///
/// From `x = 1`, each round fixes the branch attaining the min (ties to the first), solves
/// `(D1 A1 + D2 A2) x^(m-1) = -D1 q1 - D2 q2` and repeats until the selection is stable. A
/// repeated selection or more than `n + 5` distinct ones ends the run with
/// [`Status::MaxIters`].
pub fn solve_mtensor(inst: &VtcpInstance, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let n = inst.dim();
    let fail = |msg: String| {
        let mut r = SolveReport::new(Method::Mtensor, Status::PreconditionFailed, vec![0.0; n], f64::NAN);
        r.message = Some(msg);
        r
    };
    for (name, t) in [("A1", &inst.pair().a1), ("A2", &inst.pair().a2)] {
        if let Some((idx, v)) = first_positive_off_diagonal(t) {
            return Ok(fail(format!("{name} is not a Z-tensor: entry {idx:?} = {v} > 0")));
        }
    }
    for (name, q) in [("q1", inst.q1()), ("q2", inst.q2())] {
        if !q.iter().all(|&v| v < 0.0) {
            return Ok(fail(format!("{name} must be componentwise negative")));
        }
    }

    let mut x = vec![1.0; n];
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    let mut active_sets = Vec::new();
    let mut path = Vec::new();
    let mut trace = Vec::new();
    let mut iterations = 0;
    let finish = |status, x: Vec<f64>, iterations, trace, active_sets, path, message| -> Result<SolveReport> {
        let r = inf_norm(&residual(inst, &x)?);
        let mut report = SolveReport::new(Method::Mtensor, status, x, r);
        report.iterations = iterations;
        report.trace = trace;
        report.active_sets = active_sets;
        report.path = path;
        report.message = message;
        Ok(report)
    };
    loop {
        let sel = selectors(inst, &x)?;
        if !seen.insert(sel.clone()) {
            return finish(Status::MaxIters, x, iterations, trace, active_sets, path, Some("active set cycled".into()));
        }
        if seen.len() > n + 5 {
            return finish(Status::MaxIters, x, iterations, trace, active_sets, path, Some("too many active sets".into()));
        }
        let d1: Vec<f64> = sel.iter().map(|&s| if s { 1.0 } else { 0.0 }).collect();
        let d2: Vec<f64> = d1.iter().map(|v| 1.0 - v).collect();
        let m = diag_combination(&d1, &d2, inst.pair())?;
        let b: Vec<f64> = (0..n)
            .map(|i| -d1[i] * inst.q1()[i] - d2[i] * inst.q2()[i])
            .collect();
        active_sets.push(sel);
        match mtensor_system_solve_counted(&m, &b, cfg) {
            Ok((next, inner)) => {
                iterations += inner;
                x = next;
            }
            Err(VtcpError::Precondition(msg)) => {
                return finish(Status::PreconditionFailed, x, iterations, trace, active_sets, path, Some(msg));
            }
            Err(e) => {
                return finish(Status::MaxIters, x, iterations, trace, active_sets, path, Some(e.to_string()));
            }
        }
        path.push(x.clone());
        let r = inf_norm(&residual(inst, &x)?);
        trace.push(r);
        if r <= cfg.tol_residual {
            return finish(Status::Converged, x, iterations, trace, active_sets, path, None);
        }
    }
}
