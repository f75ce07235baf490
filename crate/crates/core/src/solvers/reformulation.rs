use num_rational::Ratio;

use crate::classes::TensorPair;
use crate::error::{check_dims, Result, VtcpError};
use crate::tensor::{entrywise_power, DenseTensor};

const INVERSE_TOL: f64 = 1e-12;

/// Whether `A . B` equals the delta tensor of order `(m-1)(k-1)+1` within `1e-12`.
pub fn right_inverse_verify(a: &DenseTensor, b: &DenseTensor) -> Result<bool> {
    check_dims("right inverse dimension", a.dim(), b.dim())?;
    if a.order() < 2 {
        return Err(VtcpError::Precondition(
            "right inverse needs a tensor of order >= 2".into(),
        ));
    }
    let prod = a.shao_product(b)?;
    let unit = DenseTensor::unit(prod.order(), prod.dim())?;
    Ok(prod.max_abs_diff(&unit)? <= INVERSE_TOL)
}

fn root_exponent(m: usize, k: usize) -> Result<i64> {
    if k < 2 {
        return Err(VtcpError::Precondition(
            "right inverse must have order >= 2".into(),
        ));
    }
    Ok(((m - 1) * (k - 1)) as i64)
}

/// `x = R . (y - t q1)^[1/((m-1)(k-1))]`, the VTCP point encoded by `y`.
pub fn recover_solution(
    pair: &TensorPair,
    q1: &[f64],
    right_inv: &DenseTensor,
    y: &[f64],
    t: f64,
) -> Result<Vec<f64>> {
    check_dims("q1", pair.dim(), q1.len())?;
    check_dims("y", pair.dim(), y.len())?;
    let p = root_exponent(pair.order(), right_inv.order())?;
    let shifted: Vec<f64> = y.iter().zip(q1).map(|(a, b)| a - t * b).collect();
    let u = entrywise_power(&shifted, Ratio::new(1, p))?;
    right_inv.power_apply(&u)
}

/// `y ∧ (A2 . R . (y - t q1)^[1/((m-1)(k-1))] + t q2)` for a verified right inverse `R`
/// of `A1`.
///
/// At `t = 1` this equals the VTCP residual at [`recover_solution`]`(.., y, 1)`.
pub fn fractional_reformulation_residual(
    pair: &TensorPair,
    q1: &[f64],
    q2: &[f64],
    right_inv: &DenseTensor,
    y: &[f64],
    t: f64,
) -> Result<Vec<f64>> {
    check_dims("q1", pair.dim(), q1.len())?;
    check_dims("q2", pair.dim(), q2.len())?;
    check_dims("y", pair.dim(), y.len())?;
    if !(0.0..=1.0).contains(&t) {
        return Err(VtcpError::Domain(format!("parameter t = {t} outside [0, 1]")));
    }
    if !right_inverse_verify(&pair.a1, right_inv)? {
        return Err(VtcpError::Precondition(
            "supplied tensor is not a right inverse of A1".into(),
        ));
    }
    let p = root_exponent(pair.order(), right_inv.order())?;
    let shifted: Vec<f64> = y.iter().zip(q1).map(|(a, b)| a - t * b).collect();
    let u = entrywise_power(&shifted, Ratio::new(1, p))?;
    let image = pair.a2.shao_product(right_inv)?.power_apply(&u)?;
    Ok(y.iter()
        .zip(image.iter().zip(q2))
        .map(|(yi, (a, q))| yi.min(a + t * q))
        .collect())
}
