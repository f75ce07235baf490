use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::VtcpInstance;
use crate::error::Result;
use crate::tensor::vector::{dot, inf_norm};

/// `min(q1 + A1 x^(m-1), q2 + A2 x^(m-1))`; zero exactly at solutions.
pub fn residual(inst: &VtcpInstance, x: &[f64]) -> Result<Vec<f64>> {
    let (g, f) = inst.branches(x)?;
    Ok(g.iter().zip(&f).map(|(a, b)| a.min(*b)).collect())
}

/// An element `D1 J1 + D2 J2` of the generalized Jacobian of [`residual`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedJacobian {
    pub matrix: DMatrix<f64>,
    /// 1 where the first branch attains the min (ties included), else 0.
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

pub fn residual_jacobian(inst: &VtcpInstance, x: &[f64]) -> Result<GeneralizedJacobian> {
    let (g, f) = inst.branches(x)?;
    let d1: Vec<f64> = g
        .iter()
        .zip(&f)
        .map(|(a, b)| if a <= b { 1.0 } else { 0.0 })
        .collect();
    let d2: Vec<f64> = d1.iter().map(|d| 1.0 - d).collect();
    let j1 = inst.pair().a1.power_jacobian(x)?;
    let j2 = inst.pair().a2.power_jacobian(x)?;
    let n = inst.dim();
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        if d1[i] == 1.0 {
            j1[(i, j)]
        } else {
            j2[(i, j)]
        }
    });
    Ok(GeneralizedJacobian { matrix, d1, d2 })
}

/// Each VTCP condition checked separately at `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    /// Smallest component of `q1 + A1 x^(m-1)`.
    pub first_min: f64,
    pub second_min: f64,
    pub inner_product: f64,
    pub residual_inf_norm: f64,
    pub first_nonnegative: bool,
    pub second_nonnegative: bool,
    pub complementary: bool,
    pub residual_ok: bool,
    pub passed: bool,
}

/// Checks `q1 + A1 x^(m-1) >= -tol`, `q2 + A2 x^(m-1) >= -tol`,
/// `|<first, second>| <= tol (1 + ||first|| + ||second||)` and `||residual||_inf <= tol`.
pub fn verify_solution(inst: &VtcpInstance, x: &[f64], tol: f64) -> Result<Verification> {
    let (g, f) = inst.branches(x)?;
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let first_min = min(&g);
    let second_min = min(&f);
    let inner_product = dot(&g, &f);
    let r: Vec<f64> = g.iter().zip(&f).map(|(a, b)| a.min(*b)).collect();
    let residual_inf_norm = inf_norm(&r);
    let first_nonnegative = first_min >= -tol;
    let second_nonnegative = second_min >= -tol;
    let complementary = inner_product.abs() <= tol * (1.0 + inf_norm(&g) + inf_norm(&f));
    let residual_ok = residual_inf_norm <= tol;
    Ok(Verification {
        first_min,
        second_min,
        inner_product,
        residual_inf_norm,
        first_nonnegative,
        second_nonnegative,
        complementary,
        residual_ok,
        passed: first_nonnegative && second_nonnegative && complementary && residual_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workbench::registry;

    #[test]
    fn residual_at_known_points() {
        let inst = registry::instance("4.1").unwrap();
        assert_eq!(residual(&inst, &[2.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(residual(&inst, &[0.0, 0.0]).unwrap(), vec![-8.0, -1.0]);
        let v = verify_solution(&inst, &[2.0, 1.0], 1e-8).unwrap();
        assert!(v.passed);
        let v = verify_solution(&inst, &[0.0, 0.0], 1e-8).unwrap();
        assert!(!v.passed && !v.residual_ok);
        assert_eq!(v.residual_inf_norm, 8.0);
    }

    #[test]
    fn example_two_solution_verifies() {
        let inst = registry::instance("4.2").unwrap();
        let x = [2.0, 1.0 + 7f64.sqrt()];
        assert!(inf_norm(&residual(&inst, &x).unwrap()) < 1e-13);
        assert!(verify_solution(&inst, &x, 1e-8).unwrap().passed);
    }

    #[test]
    fn selectors_partition_identity() {
        let inst = registry::instance("4.2").unwrap();
        for x in [[0.3, -1.2], [2.0, 1.0], [0.0, 0.0]] {
            let j = residual_jacobian(&inst, &x).unwrap();
            for i in 0..2 {
                assert_eq!(j.d1[i] + j.d2[i], 1.0);
            }
        }
    }

    #[test]
    fn second_branch_everywhere_gives_its_jacobian() {
        use crate::classes::TensorPair;
        use crate::tensor::DenseTensor;
        let p = registry::pair("3.1").unwrap();
        let inst = VtcpInstance::new(
            TensorPair::new(DenseTensor::unit(3, 2).unwrap(), p.a2.clone()).unwrap(),
            vec![50.0, 50.0],
            vec![0.0, 0.0],
        )
        .unwrap();
        let x = [0.7, -1.3];
        let j = residual_jacobian(&inst, &x).unwrap();
        assert_eq!(j.d2, vec![1.0, 1.0]);
        assert_eq!(j.matrix, p.a2.power_jacobian(&x).unwrap());
    }
}
