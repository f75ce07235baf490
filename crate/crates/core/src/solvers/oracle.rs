use serde::{Deserialize, Serialize};

use super::{residual, residual_jacobian, solve_newton, Method, SolveReport, SolverConfig, Status, VtcpInstance};
use crate::classes::TensorPair;
use crate::error::{Result, VtcpError};
use crate::numeric::solve_regularized;
use crate::tensor::vector::{euclid_norm, inf_dist, inf_norm};

/// Largest dimension the grid oracle accepts.
pub const ORACLE_MAX_DIM: usize = 3;
/// Grid local minima polished per run, smallest residual first.
const MAX_CANDIDATES: usize = 1000;
const DEDUP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub solutions: Vec<Vec<f64>>,
    /// Two neighbouring grid points are both exact zeros: the solution set is not isolated.
    pub non_isolated: bool,
    pub candidates: usize,
    pub grid_points: usize,
}

impl OracleReport {
    pub fn into_solve_report(self, inst: &VtcpInstance) -> Result<SolveReport> {
        let (status, x) = match self.solutions.first() {
            Some(x) => (Status::Converged, x.clone()),
            None => (Status::Diverged, vec![0.0; inst.dim()]),
        };
        let r = inf_norm(&residual(inst, &x)?);
        let mut report = SolveReport::new(Method::Oracle, status, x, r);
        report.iterations = self.candidates;
        report.solutions = self.solutions;
        report.non_isolated = self.non_isolated;
        if status == Status::Diverged {
            report.message = Some("no solution inside the search box".into());
        }
        Ok(report)
    }
}

fn grid_coord(radius: f64, points: usize, i: usize) -> f64 {
    let half = (points - 1) as f64;
    radius * (2.0 * i as f64 - half) / half
}

/// Newton steps until the update is negligible, so that singular zeros converge to
/// the same point from every side.
fn refine(inst: &VtcpInstance, mut x: Vec<f64>) -> Result<Vec<f64>> {
    let mut r = residual(inst, &x)?;
    for _ in 0..200 {
        let nr = inf_norm(&r);
        if nr == 0.0 {
            break;
        }
        let j = residual_jacobian(inst, &x)?;
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let Some(d) = solve_regularized(&j.matrix, &rhs) else {
            break;
        };
        let trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
        let rt = residual(inst, &trial)?;
        if inf_norm(&rt).is_nan() || inf_norm(&rt) > nr {
            break;
        }
        x = trial;
        r = rt;
        if inf_norm(&d) <= 1e-13 * (1.0 + inf_norm(&x)) {
            break;
        }
    }
    Ok(x)
}

/// Exhaustive grid search for all solutions in `[-radius, radius]^n`.
///
/// Evaluates `||residual||_inf` on a uniform grid, keeps its (non-strict) local minima,
/// polishes each with semismooth Newton and merges solutions closer than `1e-6`.
pub fn solve_oracle(inst: &VtcpInstance, cfg: &SolverConfig) -> Result<OracleReport> {
    cfg.validate()?;
    let n = inst.dim();
    if n > ORACLE_MAX_DIM {
        return Err(VtcpError::DimensionTooLarge {
            dim: n,
            limit: ORACLE_MAX_DIM,
        });
    }
    let p = cfg.oracle_points;
    let total = p.pow(n as u32);
    let point = |mut flat: usize| -> Vec<f64> {
        let mut x = vec![0.0; n];
        for slot in (0..n).rev() {
            x[slot] = grid_coord(cfg.oracle_radius, p, flat % p);
            flat /= p;
        }
        x
    };
    let mut values = Vec::with_capacity(total);
    for f in 0..total {
        values.push(inf_norm(&residual(inst, &point(f))?));
    }

    let strides: Vec<usize> = (0..n).map(|k| p.pow((n - 1 - k) as u32)).collect();
    let mut offsets: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        offsets = offsets
            .into_iter()
            .flat_map(|o| {
                [-1i64, 0, 1].into_iter().map(move |d| {
                    let mut o = o.clone();
                    o.push(d);
                    o
                })
            })
            .collect();
    }
    offsets.retain(|o| o.iter().any(|&d| d != 0));

    let mut non_isolated = false;
    let mut minima: Vec<(f64, usize)> = Vec::new();
    for f in 0..total {
        let v = values[f];
        let digits: Vec<usize> = (0..n).map(|k| (f / strides[k]) % p).collect();
        let mut is_min = true;
        for o in &offsets {
            let mut g = 0usize;
            let mut inside = true;
            for k in 0..n {
                let c = digits[k] as i64 + o[k];
                if c < 0 || c >= p as i64 {
                    inside = false;
                    break;
                }
                g += c as usize * strides[k];
            }
            if !inside {
                continue;
            }
            if values[g] < v {
                is_min = false;
            }
            if v == 0.0 && values[g] == 0.0 && o.iter().filter(|&&d| d != 0).count() == 1 {
                non_isolated = true;
            }
        }
        if is_min {
            minima.push((v, f));
        }
    }
    minima.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    minima.truncate(MAX_CANDIDATES);

    let slack = 1e-9 * (1.0 + cfg.oracle_radius);
    let mut solutions: Vec<Vec<f64>> = Vec::new();
    for &(_, f) in &minima {
        let report = solve_newton(inst, &point(f), cfg)?;
        if !report.converged() {
            continue;
        }
        let x = refine(inst, report.x)?;
        if inf_norm(&residual(inst, &x)?) > cfg.tol_residual || inf_norm(&x) > cfg.oracle_radius + slack {
            continue;
        }
        if solutions.iter().all(|s| inf_dist(s, &x) > DEDUP_TOL) {
            solutions.push(x);
        }
    }
    solutions.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(OracleReport {
        solutions,
        non_isolated,
        candidates: minima.len(),
        grid_points: total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSample {
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
    pub solutions: usize,
    pub max_norm: f64,
    pub non_isolated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub samples: Vec<ProbeSample>,
    /// Largest infinity norm of any solution found.
    pub max_norm: f64,
    /// A unit direction `x` with `k x` solving the homogeneous problem out to and beyond
    /// the box radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub escaping_ray: Option<Vec<f64>>,
    pub bounded: bool,
}

/// Empirical check of solution-set boundedness.
///
/// Every `(q1, q2)` sample is solved by the oracle. Then the homogeneous problem
/// (`q1 = q2 = 0`) is probed along rays: the normalized nonzero oracle solutions and all
/// lattice directions `{-1, 0, 1}^n`. A direction escapes when `k x` solves it for
/// `k = radius * (1/4, 1/2, 1, 2, 4)`, since the set then reaches past the box.
///
/// `bounded` holds when no ray escapes, no sample shows a non-isolated solution set and
/// every solution lies strictly inside the box.
pub fn boundedness_probe(
    pair: &TensorPair,
    q_samples: &[(Vec<f64>, Vec<f64>)],
    cfg: &SolverConfig,
) -> Result<BoundednessReport> {
    cfg.validate()?;
    let n = pair.dim();
    if n > ORACLE_MAX_DIM {
        return Err(VtcpError::DimensionTooLarge {
            dim: n,
            limit: ORACLE_MAX_DIM,
        });
    }
    let mut samples = Vec::new();
    let mut max_norm: f64 = 0.0;
    let mut inside = true;
    for (q1, q2) in q_samples {
        let inst = VtcpInstance::new(pair.clone(), q1.clone(), q2.clone())?;
        let report = solve_oracle(&inst, cfg)?;
        let m = report.solutions.iter().map(|x| inf_norm(x)).fold(0.0, f64::max);
        max_norm = max_norm.max(m);
        inside &= !report.non_isolated && m < cfg.oracle_radius;
        samples.push(ProbeSample {
            q1: q1.clone(),
            q2: q2.clone(),
            solutions: report.solutions.len(),
            max_norm: m,
            non_isolated: report.non_isolated,
        });
    }

    let homogeneous = VtcpInstance::new(pair.clone(), vec![0.0; n], vec![0.0; n])?;
    let mut directions: Vec<Vec<f64>> = solve_oracle(&homogeneous, cfg)?
        .solutions
        .into_iter()
        .filter(|x| inf_norm(x) > 1e-6)
        .take(MAX_CANDIDATES)
        .collect();
    directions.extend((1..3usize.pow(n as u32)).map(|mut c| {
        (0..n)
            .map(|_| {
                let v = (c % 3) as f64 - 1.0;
                c /= 3;
                v
            })
            .collect::<Vec<f64>>()
    }));
    directions.retain(|d| inf_norm(d) > 0.0);
    let scales = [0.25, 0.5, 1.0, 2.0, 4.0];
    let escaping_ray = directions.into_iter().find_map(|d| {
        let norm = euclid_norm(&d);
        let u: Vec<f64> = d.iter().map(|v| v / norm).collect();
        let escapes = scales.iter().all(|s| {
            let k = s * cfg.oracle_radius;
            let x: Vec<f64> = u.iter().map(|v| k * v).collect();
            let scale = 1.0 + k.powi(pair.order() as i32 - 1);
            residual(&homogeneous, &x).is_ok_and(|r| inf_norm(&r) <= cfg.tol_residual * scale)
        });
        escapes.then_some(u)
    });
    let bounded = inside && escaping_ray.is_none();
    Ok(BoundednessReport {
        samples,
        max_norm,
        escaping_ray,
        bounded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::DenseTensor;
    use crate::workbench::registry;

    fn zero_pair() -> TensorPair {
        TensorPair::new(DenseTensor::zeros(3, 2).unwrap(), DenseTensor::zeros(3, 2).unwrap()).unwrap()
    }

    #[test]
    fn grid_center_is_exactly_zero() {
        assert_eq!(grid_coord(5.0, 201, 100), 0.0);
        assert_eq!(grid_coord(5.0, 201, 0), -5.0);
        assert_eq!(grid_coord(5.0, 201, 200), 5.0);
    }

    #[test]
    fn first_example_has_one_solution() {
        let r = solve_oracle(&registry::instance("4.1").unwrap(), &SolverConfig::default()).unwrap();
        assert_eq!(r.solutions.len(), 1, "{r:?}");
        assert!(inf_dist(&r.solutions[0], &[2.0, 1.0]) < 1e-8);
        assert!(!r.non_isolated);
    }

    #[test]
    fn homogeneous_vr0_pair_has_only_zero() {
        let p = registry::pair("3.3").unwrap();
        let inst = VtcpInstance::new(p, vec![0.0; 2], vec![0.0; 2]).unwrap();
        let r = solve_oracle(&inst, &SolverConfig::default()).unwrap();
        assert_eq!(r.solutions.len(), 1, "{r:?}");
        assert!(inf_norm(&r.solutions[0]) < 1e-6);
    }

    #[test]
    fn zero_pair_is_flagged() {
        let inst = VtcpInstance::new(zero_pair(), vec![0.0; 2], vec![0.0; 2]).unwrap();
        let cfg = SolverConfig {
            oracle_points: 21,
            ..Default::default()
        };
        let r = solve_oracle(&inst, &cfg).unwrap();
        assert!(r.non_isolated);
        let probe = boundedness_probe(&zero_pair(), &[(vec![0.0; 2], vec![0.0; 2])], &cfg).unwrap();
        assert!(!probe.bounded);
        assert!(probe.escaping_ray.is_some());
    }

    #[test]
    fn dimension_guard() {
        let u = DenseTensor::unit(3, 4).unwrap();
        let inst = VtcpInstance::new(TensorPair::new(u.clone(), u).unwrap(), vec![0.0; 4], vec![0.0; 4]).unwrap();
        assert!(matches!(
            solve_oracle(&inst, &SolverConfig::default()),
            Err(VtcpError::DimensionTooLarge { dim: 4, limit: 3 })
        ));
    }
}
