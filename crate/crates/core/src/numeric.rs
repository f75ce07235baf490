//! Shared numerical kernels: a regularized dense linear solve and a damped Newton
//! iteration on an `R^n -> R^n` map measured in the infinity norm.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::tensor::vector::inf_norm;

/// Deterministic random substream for task `stream` under `seed`.
pub(crate) fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn matrix_inf_norm(j: &DMatrix<f64>) -> f64 {
    j.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `J d = rhs`. A singular or non-finite solve is retried with `J + lambda I`,
/// `lambda = 1e-8 (1 + ||J||_inf)`, doubling `lambda` up to five times.
pub(crate) fn solve_regularized(j: &DMatrix<f64>, rhs: &[f64]) -> Option<Vec<f64>> {
    let b = DVector::from_column_slice(rhs);
    let finite = |v: &DVector<f64>| v.iter().all(|x| x.is_finite());
    if let Some(d) = j.clone().lu().solve(&b) {
        if finite(&d) {
            return Some(d.as_slice().to_vec());
        }
    }
    let n = j.nrows();
    let mut lambda = 1e-8 * (1.0 + matrix_inf_norm(j));
    for _ in 0..=5 {
        let bumped = j + DMatrix::<f64>::identity(n, n) * lambda;
        if let Some(d) = bumped.lu().solve(&b) {
            if finite(&d) {
                return Some(d.as_slice().to_vec());
            }
        }
        lambda *= 2.0;
    }
    None
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct NewtonOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub shrink: f64,
    pub max_backtracks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NewtonStatus {
    Converged,
    MaxIters,
    Stalled,
}

#[derive(Debug, Clone)]
pub(crate) struct NewtonOutcome {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub status: NewtonStatus,
    pub trace: Vec<f64>,
}

/// Damped Newton on `f(x) = 0` with backtracking on `||f||_inf`.
///
/// `jac` may return any element of a generalized Jacobian; the step is accepted once
/// `||f(x + a d)|| <= (1 - 1e-4 a) ||f(x)||`.
pub(crate) fn newton(
    f: impl Fn(&[f64]) -> Vec<f64>,
    jac: impl Fn(&[f64]) -> DMatrix<f64>,
    x0: &[f64],
    opts: NewtonOptions,
) -> NewtonOutcome {
    let mut x = x0.to_vec();
    let mut r = f(&x);
    let mut norm = inf_norm(&r);
    let mut trace = vec![norm];
    let finish = |x, norm, it, status, trace| NewtonOutcome {
        x,
        residual_norm: norm,
        iterations: it,
        status,
        trace,
    };
    if !norm.is_finite() {
        return finish(x, norm, 0, NewtonStatus::Stalled, trace);
    }
    for it in 0..opts.max_iters {
        if norm <= opts.tol {
            return finish(x, norm, it, NewtonStatus::Converged, trace);
        }
        let j = jac(&x);
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let Some(d) = solve_regularized(&j, &rhs) else {
            return finish(x, norm, it, NewtonStatus::Stalled, trace);
        };
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
            let rt = f(&trial);
            let nt = inf_norm(&rt);
            if nt.is_finite() && nt <= (1.0 - 1e-4 * alpha) * norm {
                accepted = Some((trial, rt, nt));
                break;
            }
            alpha *= opts.shrink;
        }
        let Some((xt, rt, nt)) = accepted else {
            return finish(x, norm, it, NewtonStatus::Stalled, trace);
        };
        x = xt;
        r = rt;
        norm = nt;
        trace.push(norm);
    }
    let status = if norm <= opts.tol {
        NewtonStatus::Converged
    } else {
        NewtonStatus::MaxIters
    };
    finish(x, norm, opts.max_iters, status, trace)
}
