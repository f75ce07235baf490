use nalgebra::DMatrix;

use super::newton::{newton_options, status_of};
use super::{Method, SolveReport, SolverConfig, Status, VtcpInstance};
use crate::error::{check_dims, Result, VtcpError};
use crate::numeric::{newton, NewtonStatus};

const MIN_STEP: f64 = 1e-10;

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(VtcpError::Domain(format!("homotopy parameter {t} outside [0, 1]")))
    }
}

/// `H(x, t) = min(t q1 + (1 - t) x + t A1 x^(m-1), t q2 + (1 - t) 1 + A2 x^(m-1))`.
///
/// `H(0, 0) = 0` and `H(., 1)` is the VTCP residual.
pub fn homotopy_map(inst: &VtcpInstance, x: &[f64], t: f64) -> Result<Vec<f64>> {
    check_dims("point", inst.dim(), x.len())?;
    check_t(t)?;
    let (g, f) = inst.pair().images(x)?;
    Ok((0..inst.dim())
        .map(|i| {
            let a = t * inst.q1()[i] + (1.0 - t) * x[i] + t * g[i];
            let b = t * inst.q2()[i] + (1.0 - t) + f[i];
            a.min(b)
        })
        .collect())
}

fn homotopy_jacobian(inst: &VtcpInstance, x: &[f64], t: f64) -> Result<DMatrix<f64>> {
    let (g, f) = inst.pair().images(x)?;
    let j1 = inst.pair().a1.power_jacobian(x)?;
    let j2 = inst.pair().a2.power_jacobian(x)?;
    let n = inst.dim();
    let first: Vec<bool> = (0..n)
        .map(|i| {
            let a = t * inst.q1()[i] + (1.0 - t) * x[i] + t * g[i];
            let b = t * inst.q2()[i] + (1.0 - t) + f[i];
            a <= b
        })
        .collect();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if first[i] {
            t * j1[(i, j)] + if i == j { 1.0 - t } else { 0.0 }
        } else {
            j2[(i, j)]
        }
    }))
}

/// Follows `H(x, t) = 0` from `(0, 0)` to `t = 1`.
///
/// Each step predicts with the previous point and corrects with semismooth Newton at
/// frozen `t`. A failed corrector halves the step; the path is declared lost
/// ([`Status::Diverged`]) once the step drops below `1e-10`.
pub fn solve_homotopy(inst: &VtcpInstance, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let n = inst.dim();
    let h0 = 1.0 / cfg.homotopy_steps as f64;
    let opts = newton_options(cfg);
    let corrector = |x: &[f64], t: f64| {
        newton(
            |z| homotopy_map(inst, z, t).unwrap_or_else(|_| vec![f64::NAN; n]),
            |z| homotopy_jacobian(inst, z, t).unwrap_or_else(|_| DMatrix::zeros(n, n)),
            x,
            opts,
        )
    };

    let mut x = vec![0.0; n];
    let mut t = 0.0;
    let mut h = h0;
    let mut iterations = 0;
    let mut ts = vec![0.0];
    let mut trace = Vec::new();
    while t < 1.0 {
        let t_next = if t + h >= 1.0 - 1e-12 { 1.0 } else { t + h };
        let out = corrector(&x, t_next);
        iterations += out.iterations;
        if out.status == NewtonStatus::Converged {
            x = out.x;
            t = t_next;
            ts.push(t);
            trace.push(out.residual_norm);
            h = (2.0 * h).min(h0);
        } else {
            h *= 0.5;
            if h < MIN_STEP {
                let r = super::residual(inst, &x)?;
                let mut report = SolveReport::new(
                    Method::Homotopy,
                    Status::Diverged,
                    x,
                    crate::tensor::vector::inf_norm(&r),
                );
                report.iterations = iterations;
                report.trace = trace;
                report.homotopy_t = ts;
                report.message = Some(format!("path lost near t = {t}"));
                return Ok(report);
            }
        }
    }

    let end = corrector(&x, 1.0);
    let mut report = SolveReport::new(Method::Homotopy, status_of(&end), end.x, end.residual_norm);
    report.iterations = iterations + end.iterations;
    report.trace = trace;
    report.homotopy_t = ts;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::TensorPair;
    use crate::solvers::residual;
    use crate::workbench::registry;
    use rand::{Rng, SeedableRng};

    #[test]
    fn map_is_zero_at_start_and_residual_at_end() {
        let inst = registry::instance("4.2").unwrap();
        assert_eq!(homotopy_map(&inst, &[0.0, 0.0], 0.0).unwrap(), vec![0.0, 0.0]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
            assert_eq!(homotopy_map(&inst, &x, 1.0).unwrap(), residual(&inst, &x).unwrap());
        }
        assert!(homotopy_map(&inst, &[0.0, 0.0], 1.5).is_err());
    }

    #[test]
    fn follows_path_on_both_examples() {
        let cfg = SolverConfig::default();
        let r = solve_homotopy(&registry::instance("4.1").unwrap(), &cfg).unwrap();
        assert!(r.converged(), "{r:?}");
        assert!((r.x[0] - 2.0).abs() < 1e-8 && (r.x[1] - 1.0).abs() < 1e-8);
        assert_eq!(*r.homotopy_t.last().unwrap(), 1.0);

        let r = solve_homotopy(&registry::instance("4.2").unwrap(), &cfg).unwrap();
        assert!(r.converged(), "{r:?}");
        assert!((r.x[0] - 2.0).abs() < 1e-8);
        assert!((r.x[1] - 1.0 - 7f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn zero_data_stays_at_origin() {
        let p = registry::pair("3.3").unwrap();
        let inst = VtcpInstance::new(TensorPair::new(p.a1, p.a2).unwrap(), vec![0.0; 2], vec![0.0; 2]).unwrap();
        let r = solve_homotopy(&inst, &SolverConfig::default()).unwrap();
        assert!(r.converged());
        assert_eq!(r.x, vec![0.0, 0.0]);
    }
}
