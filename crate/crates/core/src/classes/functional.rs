//! Violation functionals for the universal pair classes.
//!
//! Each class condition "for every admissible point some component is positive" is
//! turned into a scalar whose non-positivity at an admissible point refutes membership:
//!
//! | class    | point        | value                                          |
//! |----------|--------------|------------------------------------------------|
//! | VR0      | `x != 0`     | `‖min(A1·x, A2·x)‖∞`                           |
//! | VE       | `x != 0`     | `max_i min((A1·x)_i, (A2·x)_i)`                |
//! | VP       | `x != 0`     | `max_i (A1·x)_i (A2·x)_i`                      |
//! | VP-I     | `±x >= 0`    | as VP                                          |
//! | VP-II    | sym. `Z`     | `max_i (A1 Z)_i (A2 Z)_i`, `diag(Z) != 0`      |
//! | strong VP| `x != y`     | `max_i (G(x)-G(y))_i (F(x)-F(y))_i`            |

use serde::{Deserialize, Serialize};

use super::{Certificate, SearchConfig, TensorClass, TensorPair};
use crate::error::{Result, VtcpError};
use crate::tensor::vector::inf_norm;

/// Both images at a point together with the per-component criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    /// Componentwise min (VR0, VE) or product (the VP family).
    pub criterion: Vec<f64>,
    pub value: f64,
}

fn wrong_point(class: TensorClass, expected: &str) -> VtcpError {
    VtcpError::Precondition(format!("class {class} is evaluated at {expected}"))
}

fn check_vector_len(pair: &TensorPair, x: &[f64]) -> Result<()> {
    crate::error::check_dims("certificate vector", pair.dim(), x.len())
}

/// Evaluates the class functional at `point`, keeping the intermediate images.
pub fn evaluate(pair: &TensorPair, class: TensorClass, point: &Certificate) -> Result<Evaluation> {
    if pair.order() < 2 {
        return Err(VtcpError::Precondition(
            "pair classes need tensors of order >= 2".into(),
        ));
    }
    let (first, second) = match (class, point) {
        (
            TensorClass::Vr0 | TensorClass::Ve | TensorClass::Vp | TensorClass::Vp1,
            Certificate::Vector { x },
        ) => {
            check_vector_len(pair, x)?;
            pair.images(x)?
        }
        (TensorClass::Vp2, Certificate::Symmetric { z }) => {
            (pair.a1.sym_apply(z)?, pair.a2.sym_apply(z)?)
        }
        (TensorClass::StrongVp, Certificate::VectorPair { x, y }) => {
            check_vector_len(pair, x)?;
            check_vector_len(pair, y)?;
            let (gx, fx) = pair.images(x)?;
            let (gy, fy) = pair.images(y)?;
            let diff = |a: Vec<f64>, b: Vec<f64>| a.iter().zip(&b).map(|(u, v)| u - v).collect();
            (diff(gx, gy), diff(fx, fy))
        }
        (TensorClass::Vr0 | TensorClass::Ve | TensorClass::Vp | TensorClass::Vp1, _) => {
            return Err(wrong_point(class, "a vector"))
        }
        (TensorClass::Vp2, _) => return Err(wrong_point(class, "a symmetric tensor")),
        (TensorClass::StrongVp, _) => return Err(wrong_point(class, "a pair of vectors")),
        _ => return Err(VtcpError::UnknownClass(class.to_string())),
    };
    let criterion: Vec<f64> = match class {
        TensorClass::Vr0 | TensorClass::Ve => {
            first.iter().zip(&second).map(|(a, b)| a.min(*b)).collect()
        }
        _ => first.iter().zip(&second).map(|(a, b)| a * b).collect(),
    };
    let value = match class {
        TensorClass::Vr0 => inf_norm(&criterion),
        _ => criterion.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    Ok(Evaluation {
        first,
        second,
        criterion,
        value,
    })
}

/// The scalar whose value `<= tol_cert` at an admissible point refutes the class.
pub fn violation_functional(
    pair: &TensorPair,
    class: TensorClass,
    point: &Certificate,
) -> Result<f64> {
    Ok(evaluate(pair, class, point)?.value)
}

pub fn is_violation_value(value: f64, tol_cert: f64) -> bool {
    value <= tol_cert
}

/// Whether `point` lies in the set the class quantifies over (nonzero, sign-constrained,
/// nonzero diagonal, distinct).
pub fn certificate_admissible(
    class: TensorClass,
    point: &Certificate,
    cfg: &SearchConfig,
) -> bool {
    match (class, point) {
        (TensorClass::Vr0 | TensorClass::Ve | TensorClass::Vp, Certificate::Vector { x }) => {
            inf_norm(x) > 0.0
        }
        (TensorClass::Vp1, Certificate::Vector { x }) => {
            inf_norm(x) > 0.0 && (x.iter().all(|&v| v >= 0.0) || x.iter().all(|&v| v <= 0.0))
        }
        (TensorClass::Vp2, Certificate::Symmetric { z }) => {
            let d = inf_norm(&z.diagonal());
            d > 0.0 && d >= cfg.tol_diag * inf_norm(z.distinct())
        }
        (TensorClass::StrongVp, Certificate::VectorPair { x, y }) => {
            let diff = crate::tensor::vector::inf_dist(x, y);
            let scale = inf_norm(x).max(inf_norm(y));
            diff > 0.0 && diff >= cfg.tol_diag * scale
        }
        _ => false,
    }
}

/// Re-verifies a counterexample using only the functional and admissibility.
pub fn verify_certificate(
    pair: &TensorPair,
    class: TensorClass,
    point: &Certificate,
    cfg: &SearchConfig,
) -> Result<bool> {
    if !certificate_admissible(class, point, cfg) {
        return Ok(false);
    }
    Ok(is_violation_value(
        violation_functional(pair, class, point)?,
        cfg.tol_cert,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{DenseTensor, SymTensor};
    use crate::workbench::registry;

    fn vec_cert(x: &[f64]) -> Certificate {
        Certificate::Vector { x: x.to_vec() }
    }

    #[test]
    fn vp_value_at_stated_points() {
        let p = registry::pair("3.3").unwrap();
        let e = evaluate(&p, TensorClass::Vp, &vec_cert(&[1.0, 1.0])).unwrap();
        assert_eq!(e.criterion, vec![0.0, -8.0]);
        assert_eq!(e.value, 0.0);

        let p = registry::pair("3.5").unwrap();
        let e = evaluate(&p, TensorClass::Vp, &vec_cert(&[1.0, -1.0])).unwrap();
        assert_eq!(e.criterion, vec![-1.0, -2.0]);
        assert_eq!(e.value, -1.0);
    }

    #[test]
    fn strong_vp_value_at_stated_pair() {
        let p = registry::pair("3.7").unwrap();
        let cert = Certificate::VectorPair {
            x: vec![0.0, 1.0],
            y: vec![1.0, 0.0],
        };
        assert_eq!(violation_functional(&p, TensorClass::StrongVp, &cert).unwrap(), 0.0);
        assert!(verify_certificate(&p, TensorClass::StrongVp, &cert, &SearchConfig::default()).unwrap());
    }

    #[test]
    fn ve_certificate_values() {
        let p = registry::pair("3.2").unwrap();
        let e = evaluate(&p, TensorClass::Ve, &vec_cert(&[-1.0, -1.0])).unwrap();
        assert_eq!(e.first, vec![-1.0, -2.0]);
        assert_eq!(e.second, vec![-5.0, -3.0]);
        assert_eq!(e.value, -3.0);
    }

    #[test]
    fn vp2_products_vanish_for_auxiliary_z() {
        let z = SymTensor::new(3, 2, vec![0.0, -1.0, 0.0, 1.0]).unwrap();
        for id in ["3.2", "3.6"] {
            let p = registry::pair(id).unwrap();
            let e = evaluate(&p, TensorClass::Vp2, &Certificate::Symmetric { z: z.clone() }).unwrap();
            assert_eq!(e.criterion, vec![0.0, 0.0], "pair {id}");
        }
    }

    #[test]
    fn point_kind_and_unknown_class_errors() {
        let p = registry::pair("3.3").unwrap();
        assert!(violation_functional(&p, TensorClass::Vp2, &vec_cert(&[1.0, 1.0])).is_err());
        assert!(matches!(
            violation_functional(&p, TensorClass::SemiPositive, &vec_cert(&[1.0, 1.0])),
            Err(VtcpError::UnknownClass(_))
        ));
    }

    #[test]
    fn degenerate_points_are_not_admissible() {
        let cfg = SearchConfig::default();
        let p = TensorPair::new(
            DenseTensor::zeros(3, 2).unwrap(),
            DenseTensor::zeros(3, 2).unwrap(),
        )
        .unwrap();
        assert!(!verify_certificate(&p, TensorClass::Vp, &vec_cert(&[0.0, 0.0]), &cfg).unwrap());
        assert!(verify_certificate(&p, TensorClass::Vp, &vec_cert(&[0.0, 1.0]), &cfg).unwrap());
        assert!(!certificate_admissible(TensorClass::Vp1, &vec_cert(&[1.0, -1.0]), &cfg));
        let z = SymTensor::new(2, 2, vec![0.0, 1.0, 0.0]).unwrap();
        assert!(!certificate_admissible(TensorClass::Vp2, &Certificate::Symmetric { z }, &cfg));
        let same = Certificate::VectorPair {
            x: vec![1.0, 2.0],
            y: vec![1.0, 2.0],
        };
        assert!(!certificate_admissible(TensorClass::StrongVp, &same, &cfg));
    }
}
