use nalgebra::DMatrix;

use super::{residual, residual_jacobian, Method, SolveReport, SolverConfig, Status, VtcpInstance};
use crate::error::{check_dims, Result};
use crate::numeric::{newton, NewtonOptions, NewtonOutcome, NewtonStatus};

pub(crate) fn newton_options(cfg: &SolverConfig) -> NewtonOptions {
    NewtonOptions {
        tol: cfg.tol_residual,
        max_iters: cfg.max_iters,
        shrink: cfg.shrink,
        max_backtracks: cfg.max_backtracks,
    }
}

pub(crate) fn status_of(out: &NewtonOutcome) -> Status {
    match out.status {
        NewtonStatus::Converged => Status::Converged,
        NewtonStatus::MaxIters => Status::MaxIters,
        NewtonStatus::Stalled => Status::Diverged,
    }
}

/// Semismooth Newton on the min residual from `x0`.
///
/// Steps use the generalized Jacobian with ties assigned to the first branch and are
/// damped by backtracking on `||residual||_inf`. A stalled line search reports
/// [`Status::Diverged`].
pub fn solve_newton(inst: &VtcpInstance, x0: &[f64], cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    check_dims("starting point", inst.dim(), x0.len())?;
    let n = inst.dim();
    let out = newton(
        |x| residual(inst, x).unwrap_or_else(|_| vec![f64::NAN; n]),
        |x| {
            residual_jacobian(inst, x)
                .map(|j| j.matrix)
                .unwrap_or_else(|_| DMatrix::zeros(n, n))
        },
        x0,
        newton_options(cfg),
    );
    let mut report = SolveReport::new(Method::Newton, status_of(&out), out.x, out.residual_norm);
    report.iterations = out.iterations;
    report.trace = out.trace;
    if report.status == Status::Diverged {
        report.message = Some("line search stalled".into());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workbench::registry;

    #[test]
    fn first_example_from_ones() {
        let inst = registry::instance("4.1").unwrap();
        let r = solve_newton(&inst, &[1.0, 1.0], &SolverConfig::default()).unwrap();
        assert!(r.converged(), "{r:?}");
        assert!((r.x[0] - 2.0).abs() < 1e-8 && (r.x[1] - 1.0).abs() < 1e-8);
        assert_eq!(r.trace.len(), r.iterations + 1);
    }

    #[test]
    fn second_example_from_ones() {
        let inst = registry::instance("4.2").unwrap();
        let r = solve_newton(&inst, &[1.0, 1.0], &SolverConfig::default()).unwrap();
        assert!(r.converged(), "{r:?}");
        assert!((r.x[0] - 2.0).abs() < 1e-8);
        assert!((r.x[1] - 1.0 - 7f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn start_at_solution_takes_no_steps() {
        let inst = registry::instance("4.1").unwrap();
        let r = solve_newton(&inst, &[2.0, 1.0], &SolverConfig::default()).unwrap();
        assert!(r.converged());
        assert_eq!(r.iterations, 0);
        assert_eq!(r.x, vec![2.0, 1.0]);
    }

    #[test]
    fn wrong_start_length_is_rejected() {
        let inst = registry::instance("4.1").unwrap();
        assert!(solve_newton(&inst, &[1.0], &SolverConfig::default()).is_err());
    }
}
